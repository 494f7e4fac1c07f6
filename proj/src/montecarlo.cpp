/*
 * Copyright 2026 The fecam Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fecam/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "fecam/errors.hpp"
#include "fecam/random.hpp"

namespace fecam::mc {

namespace {

// Stream tags keep pattern draws and device draws apart.
constexpr std::uint64_t kPatternStream = 0x7061747465726eULL;
constexpr std::uint64_t kDeviceStream = 0x646576696365ULL;

struct Pattern {
  std::vector<Symbol> stored;
  std::vector<Symbol> query;
};

struct ScenarioSpec {
  std::string id;
  Scenario kind;
  int k = 0;
  int probe_step = 0;      // mixed: 1 or 2
  Symbol mcam_query = 1;   // mcam_worst: symbol of the perturbed cell
};

// First `k` entries of a random permutation of [0, n).
std::vector<std::size_t> choose_positions(CounterRng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.next_below(n - i)]);
  idx.resize(k);
  return idx;
}

Pattern make_pattern(const ScenarioSpec& spec, std::size_t n, CounterRng& rng) {
  Pattern p{std::vector<Symbol>(n, 0), std::vector<Symbol>(n, 0)};
  const auto k = static_cast<std::size_t>(spec.k);
  switch (spec.kind) {
    case Scenario::case_i:
      for (auto c : choose_positions(rng, n, k)) p.query[c] = 1;
      break;
    case Scenario::case_ii:
      std::fill(p.stored.begin(), p.stored.end(), 1);
      std::fill(p.query.begin(), p.query.end(), 1);
      for (auto c : choose_positions(rng, n, k)) p.query[c] = 0;
      break;
    case Scenario::random_hamming:
      for (std::size_t c = 0; c < n; ++c) p.stored[c] = static_cast<Symbol>(rng.next_u64() & 1U);
      p.query = p.stored;
      for (auto c : choose_positions(rng, n, k)) p.query[c] ^= 1;
      break;
    case Scenario::mixed: {
      // (stored, query) classes; the probed class is excluded from the fill.
      const Symbol probe_stored = spec.probe_step == 1 ? 0 : 1;
      std::vector<bool> probed(n, false);
      for (auto c : choose_positions(rng, n, k)) probed[c] = true;
      for (std::size_t c = 0; c < n; ++c) {
        if (probed[c]) {
          p.stored[c] = probe_stored;
          p.query[c] = static_cast<Symbol>(1 - probe_stored);
          continue;
        }
        // Three remaining classes: the two matches and the other mismatch.
        switch (rng.next_below(3)) {
          case 0: p.stored[c] = 0; p.query[c] = 0; break;
          case 1: p.stored[c] = 1; p.query[c] = 1; break;
          default:
            p.stored[c] = static_cast<Symbol>(1 - probe_stored);
            p.query[c] = probe_stored;
            break;
        }
      }
      break;
    }
    case Scenario::mcam_worst:
      std::fill(p.stored.begin(), p.stored.end(), 1);
      std::fill(p.query.begin(), p.query.end(), 1);
      p.query[rng.next_below(n)] = spec.mcam_query;
      break;
  }
  return p;
}

std::vector<ScenarioSpec> bcam_specs(Scenario kind, std::size_t n) {
  std::vector<ScenarioSpec> specs;
  for (std::size_t k = 0; k <= n; ++k)
    specs.push_back({fmt::format("{}-k{}", to_string(kind), k), kind, static_cast<int>(k)});
  return specs;
}

std::vector<ScenarioSpec> mixed_specs(std::size_t n) {
  std::vector<ScenarioSpec> specs;
  for (int step : {1, 2}) {
    for (std::size_t k = 0; k <= n; ++k) {
      ScenarioSpec s{fmt::format("mixed-s{}-k{}", step, k), Scenario::mixed, static_cast<int>(k)};
      s.probe_step = step;
      specs.push_back(s);
    }
  }
  return specs;
}

std::vector<ScenarioSpec> mcam_specs() {
  // Stored '01' everywhere; '00' is the only below-V_TH mismatch.
  std::vector<ScenarioSpec> specs;
  const std::pair<const char*, Symbol> cases[] = {
      {"query-00", 0}, {"match", 1}, {"query-10", 2}, {"query-11", 3}};
  for (const auto& [name, sym] : cases) {
    ScenarioSpec s{fmt::format("mcam-{}", name), Scenario::mcam_worst, sym == 1 ? 0 : 1};
    s.mcam_query = sym;
    specs.push_back(s);
  }
  return specs;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

McResult run_specs(const McExperimentConfig& cfg, const std::vector<ScenarioSpec>& specs) {
  cfg.validate();
  McResult result;
  result.config = cfg;
  result.i_on_nominal = cfg.cell.clamp_current();
  result.ladder = make_ladder(cfg.params, cfg.m_guard.value_or(default_guard(cfg.params)));

  const std::size_t n = cfg.wordlength;
  const bool binary = cfg.mode.kind == ArrayMode::Kind::binary;
  const AdcConfig adc{result.i_on_nominal, n};
  const auto& levels = cfg.params.vth_levels;

  result.scenarios.resize(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    auto& sr = result.scenarios[s];
    sr.id = specs[s].id;
    sr.k = specs[s].k;
    sr.trials.resize(cfg.trials);
  }

  parallel_for(specs.size() * cfg.trials, cfg.threads, [&](std::size_t job) {
    const std::size_t s = job / cfg.trials;
    const std::size_t t = job % cfg.trials;
    CounterRng pattern_rng(derive_seed(cfg.seed, kPatternStream, s, t));
    const Pattern p = make_pattern(specs[s], n, pattern_rng);

    TrialRecord rec;
    for (std::size_t c = 0; c < n; ++c) {
      const double eps = sample_vth_offset(cfg.params, derive_seed(cfg.seed, kDeviceStream, s, t, c));
      const double vth = levels[p.stored[c]] + eps;
      rec.i_mls1 += cell_current_at(result.ladder.v_low[p.query[c]], vth, cfg.cell, cfg.params);
      rec.i_mls2 += cell_current_at(result.ladder.v_high[p.query[c]], vth, cfg.cell, cfg.params);
      if (p.query[c] > p.stored[c]) ++rec.n_above;
      if (p.query[c] < p.stored[c]) ++rec.n_below;
    }
    const MlReading reading{rec.i_mls1, rec.i_mls2};
    if (binary) {
      rec.decoded = decode_hamming(reading, static_cast<int>(n), result.i_on_nominal).hamming;
      rec.truth = rec.n_above + rec.n_below;
      rec.code1 = thermometer_code(rec.i_mls1, adc);
      rec.code2 = thermometer_code(rec.i_mls2, adc);
    } else {
      rec.decoded = decode_mlc_match(reading, static_cast<int>(n), result.i_on_nominal,
                                     cfg.margin_fraction) ? 1 : 0;
      rec.truth = rec.n_above + rec.n_below == 0 ? 1 : 0;
    }
    result.scenarios[s].trials[t] = rec;
  });

  std::size_t errors = 0;
  std::size_t therm_ok = 0;
  std::size_t total = 0;
  std::vector<std::pair<int, double>> s1, s2;
  for (auto& sr : result.scenarios) {
    std::vector<double> a, b;
    std::size_t err = 0, ok = 0;
    for (const auto& r : sr.trials) {
      a.push_back(r.i_mls1);
      b.push_back(r.i_mls2);
      if (r.decoded != r.truth) ++err;
      if (binary && r.code1 == r.n_above && static_cast<int>(n) - r.code2 == r.n_below) ++ok;
      s1.emplace_back(r.n_above, r.i_mls1);
      s2.emplace_back(r.n_below, r.i_mls2);
    }
    sr.mean_i_mls1 = mean_of(a);
    sr.std_i_mls1 = std_of(a, sr.mean_i_mls1);
    sr.mean_i_mls2 = mean_of(b);
    sr.std_i_mls2 = std_of(b, sr.mean_i_mls2);
    const double count = static_cast<double>(sr.trials.size());
    sr.error_rate = static_cast<double>(err) / count;
    sr.thermometer_accuracy = binary ? static_cast<double>(ok) / count : 0.0;
    errors += err;
    therm_ok += ok;
    total += sr.trials.size();
  }
  result.error_rate = static_cast<double>(errors) / static_cast<double>(total);
  result.thermometer_accuracy = binary ? static_cast<double>(therm_ok) / static_cast<double>(total) : 0.0;
  result.step1 = separation(s1, true, result.i_on_nominal);
  result.step2 = separation(s2, false, result.i_on_nominal);
  return result;
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::case_i: return "case-i";
    case Scenario::case_ii: return "case-ii";
    case Scenario::random_hamming: return "random-hamming";
    case Scenario::mixed: return "mixed";
    case Scenario::mcam_worst: return "mcam-worst";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& name) {
  for (auto s : {Scenario::case_i, Scenario::case_ii, Scenario::random_hamming, Scenario::mixed,
                 Scenario::mcam_worst}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

void McExperimentConfig::validate() const {
  params.validate();
  cell.validate();
  if (wordlength < 1) throw ConfigError("wordlength must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (mode.levels() != params.levels())
    throw ConfigError(fmt::format("mode needs {} V_TH levels but parameters define {}",
                                  mode.levels(), params.levels()));
  const bool binary = mode.kind == ArrayMode::Kind::binary;
  const bool mcam = scenario == Scenario::mcam_worst;
  if (binary == mcam)
    throw ConfigError(fmt::format("scenario '{}' is not valid in {} mode", to_string(scenario),
                                  binary ? "binary" : "multilevel"));
  if (mcam && params.levels() != 4) throw ConfigError("mcam-worst needs 4 V_TH levels");
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5))
    throw ConfigError(fmt::format("margin_fraction must be in (0, 0.5) (got {})", margin_fraction));
}

Separation separation(const std::vector<std::pair<int, double>>& samples, bool increasing,
                      double i_on) {
  std::map<int, std::pair<double, double>> range;  // count -> (min, max)
  for (const auto& [count, value] : samples) {
    auto [it, fresh] = range.try_emplace(count, value, value);
    if (!fresh) {
      it->second.first = std::min(it->second.first, value);
      it->second.second = std::max(it->second.second, value);
    }
  }
  Separation sep;
  sep.groups = range.size();
  for (auto it = range.begin(); it != range.end(); ++it) {
    auto next = std::next(it);
    if (next == range.end() || next->first != it->first + 1) continue;
    const auto [lo_min, lo_max] = it->second;
    const auto [hi_min, hi_max] = next->second;
    const double gap = increasing ? hi_min - lo_max : lo_min - hi_max;
    sep.margin = std::min(sep.margin.value_or(gap / i_on), gap / i_on);
  }
  if (samples.empty()) return sep;
  std::size_t inside = 0;
  for (const auto& [count, value] : samples) {
    for (int neighbour : {count - 1, count + 1}) {
      auto it = range.find(neighbour);
      if (it != range.end() && value >= it->second.first && value <= it->second.second) {
        ++inside;
        break;
      }
    }
  }
  sep.overlap_fraction = static_cast<double>(inside) / static_cast<double>(samples.size());
  return sep;
}

McResult run_bcam_sweep(const McExperimentConfig& cfg) {
  if (cfg.mode.kind != ArrayMode::Kind::binary) throw ConfigError("bcam sweep needs binary mode");
  if (cfg.scenario != Scenario::case_i && cfg.scenario != Scenario::case_ii &&
      cfg.scenario != Scenario::random_hamming)
    throw ConfigError(fmt::format("scenario '{}' is not a bcam sweep", to_string(cfg.scenario)));
  return run_specs(cfg, bcam_specs(cfg.scenario, cfg.wordlength));
}

AblationResult run_limiter_ablation(const McExperimentConfig& cfg) {
  if (cfg.mode.kind != ArrayMode::Kind::binary) throw ConfigError("limiter ablation needs binary mode");
  McExperimentConfig on = cfg;
  on.scenario = Scenario::mixed;
  on.cell.limiter_enabled = true;
  McExperimentConfig off = on;
  off.cell.limiter_enabled = false;
  const auto specs = mixed_specs(cfg.wordlength);
  return {run_specs(on, specs), run_specs(off, specs)};
}

McResult run_mcam_worst_case(const McExperimentConfig& cfg) {
  McExperimentConfig c = cfg;
  c.scenario = Scenario::mcam_worst;
  return run_specs(c, mcam_specs());
}

void write_trials_csv(std::ostream& out, const McResult& result) {
  out << "scenario,trial,i_mls1,i_mls2,decoded,truth\n";
  for (const auto& sr : result.scenarios) {
    for (std::size_t t = 0; t < sr.trials.size(); ++t) {
      const auto& r = sr.trials[t];
      out << fmt::format("{},{},{:.9e},{:.9e},{},{}\n", sr.id, t, r.i_mls1, r.i_mls2, r.decoded, r.truth);
    }
  }
}

namespace {

nlohmann::json separation_json(const Separation& s) {
  nlohmann::json j;
  j["groups"] = s.groups;
  j["margin_ion"] = s.margin ? nlohmann::json(*s.margin) : nlohmann::json(nullptr);
  j["overlap_fraction"] = s.overlap_fraction;
  return j;
}

}  // namespace

nlohmann::json summary_json(const McResult& result) {
  const auto& cfg = result.config;
  nlohmann::json j;
  j["wordlength"] = cfg.wordlength;
  j["trials"] = cfg.trials;
  j["sigma_vth"] = cfg.params.sigma_vth;
  j["limiter_enabled"] = cfg.cell.limiter_enabled;
  j["seed"] = cfg.seed;
  j["scenario"] = to_string(cfg.scenario);
  j["i_on_nominal"] = result.i_on_nominal;
  j["ladder"] = {{"v_low", result.ladder.v_low}, {"v_high", result.ladder.v_high}};
  j["error_rate"] = result.error_rate;
  if (cfg.mode.kind == ArrayMode::Kind::binary)
    j["thermometer_accuracy"] = result.thermometer_accuracy;
  else
    j["classification_accuracy"] = 1.0 - result.error_rate;
  j["step1"] = separation_json(result.step1);
  j["step2"] = separation_json(result.step2);
  auto& scen = j["scenarios"] = nlohmann::json::array();
  for (const auto& sr : result.scenarios) {
    scen.push_back({{"id", sr.id},
                    {"k", sr.k},
                    {"mean_i_mls1", sr.mean_i_mls1},
                    {"std_i_mls1", sr.std_i_mls1},
                    {"mean_i_mls2", sr.mean_i_mls2},
                    {"std_i_mls2", sr.std_i_mls2},
                    {"error_rate", sr.error_rate}});
  }
  return j;
}

}  // namespace fecam::mc
