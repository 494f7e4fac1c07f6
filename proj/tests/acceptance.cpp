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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// checked criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fecam/cam_core.hpp"
#include "fecam/hdc_genome.hpp"
#include "fecam/montecarlo.hpp"
#include "fecam/random.hpp"
#include "fecam/sensing.hpp"

using namespace fecam;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Fit {
  double slope = 0, intercept = 0, r2 = 0;
};

Fit fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sse += std::pow(y[i] - f.slope * x[i] - f.intercept, 2);
  f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
  return f;
}

DeviceParams ideal_params() {
  DeviceParams p = DeviceParams::binary_defaults();
  p.sigma_vth = 0.0;
  return p;
}

// 1. Every 8-bit (stored, query) pair decodes to the exact Hamming distance.
Verdict exhaustive_decode() {
  const DeviceParams p = ideal_params();
  const CellConfig cell;
  const auto ladder = make_ladder(p, default_guard(p));
  CamArray array(p, cell, ArrayMode::binary(), 256, 8, 1);
  for (unsigned w = 0; w < 256; ++w) {
    std::vector<Symbol> s(8);
    for (int c = 0; c < 8; ++c) s[c] = (w >> c) & 1U;
    array.write_word(w, s);
  }
  std::size_t bad = 0, pairs = 0;
  for (unsigned q = 0; q < 256; ++q) {
    SearchQuery query{std::vector<Symbol>(8)};
    for (int c = 0; c < 8; ++c) query.symbols[c] = (q >> c) & 1U;
    const auto readings = array.search_all(query, ladder);
    for (unsigned w = 0; w < 256; ++w, ++pairs) {
      const auto d = decode_hamming(readings[w], 8, cell.clamp_current());
      const int above = std::popcount(~w & q & 0xFFu), below = std::popcount(w & ~q & 0xFFu);
      if (d.hamming != std::popcount(w ^ q) || d.n_st0sr1 != above || d.n_st1sr0 != below) ++bad;
    }
  }
  return {bad == 0, fmt::format("{} pairs, {} mismatching decodes", pairs, bad)};
}

// 2. Matchline currents are affine in the mismatch count with slope I_on.
Verdict linearity() {
  mc::McExperimentConfig cfg;
  cfg.params = ideal_params();
  cfg.trials = 10;
  const double i_on = cfg.cell.clamp_current();
  const double n = static_cast<double>(cfg.wordlength);
  bool ok = true;
  std::string detail;
  for (auto scen : {mc::Scenario::case_i, mc::Scenario::case_ii}) {
    cfg.scenario = scen;
    const auto r = mc::run_bcam_sweep(cfg);
    std::vector<double> k, y;
    for (const auto& sc : r.scenarios) {
      for (const auto& t : sc.trials) {
        k.push_back(sc.k);
        y.push_back(scen == mc::Scenario::case_i ? t.i_mls1 : n * i_on - t.i_mls2);
      }
    }
    const Fit f = fit(k, y);
    const double slope_err = std::abs(f.slope / i_on - 1.0);
    const double icpt = std::abs(f.intercept) / i_on;
    ok = ok && slope_err <= 0.01 && icpt <= 0.01;
    detail += fmt::format("{}: slope/I_on-1 = {:.2e}, |intercept|/I_on = {:.2e}; ", mc::to_string(scen), slope_err,
                          icpt);
  }
  return {ok, detail};
}

// 3. 64-cell words under 50 mV variation.
Verdict robustness64() {
  mc::McExperimentConfig cfg;
  cfg.wordlength = 64;
  cfg.trials = 10000;
  cfg.scenario = mc::Scenario::random_hamming;
  const auto r = mc::run_bcam_sweep(cfg);
  const std::size_t total = r.scenarios.size() * cfg.trials;
  return {r.error_rate <= 1e-3 && r.thermometer_accuracy >= 0.999,
          fmt::format("{} trials (k = 0..64), error rate {:.2e}, thermometer accuracy {:.6f}, margins {:.3f}/{:.3f} I_on",
                      total, r.error_rate, r.thermometer_accuracy, r.step1.margin.value_or(NAN),
                      r.step2.margin.value_or(NAN))};
}

// 4. Without the limiter step 2 collapses while step 1 survives.
Verdict ablation() {
  mc::McExperimentConfig cfg;
  cfg.wordlength = 2;
  cfg.scenario = mc::Scenario::mixed;
  const auto a = mc::run_limiter_ablation(cfg);
  const auto& off = a.without_limiter;
  // Context only: range-inclusion overlap of unbounded Gaussian tails is a
  // finite-sample statistic, so report how often other seeds see any.
  int clean = 0;
  for (std::uint64_t s = 1; s <= 30; ++s) {
    mc::McExperimentConfig c = cfg;
    c.seed = s;
    if (mc::run_limiter_ablation(c).without_limiter.step1.overlap_fraction == 0.0) ++clean;
  }
  return {off.step2.overlap_fraction > 0.01 && off.step1.overlap_fraction == 0.0,
          fmt::format("seed {}, {} trials/scenario, limiter off: step-1 overlap {:.4g}, step-2 overlap {:.4g}; "
                      "limiter on: {:.4g}/{:.4g}; step-1 overlap is zero for {}/30 of seeds 1..30",
                      cfg.seed, cfg.trials, off.step1.overlap_fraction, off.step2.overlap_fraction,
                      a.with_limiter.step1.overlap_fraction, a.with_limiter.step2.overlap_fraction, clean)};
}

// 5. Multi-level exact-match classification in the one-cell worst cases.
Verdict mcam() {
  mc::McExperimentConfig cfg;
  cfg.wordlength = 64;
  cfg.mode = ArrayMode::multilevel(2);
  cfg.params = DeviceParams::multilevel_defaults();
  cfg.scenario = mc::Scenario::mcam_worst;
  const auto r = mc::run_mcam_worst_case(cfg);
  bool ok = !r.scenarios.empty();
  std::string detail = fmt::format("{} trials/scenario:", cfg.trials);
  for (const auto& sc : r.scenarios) {
    ok = ok && sc.error_rate == 0.0;
    detail += fmt::format(" {} {:.4f}", sc.id, 1.0 - sc.error_rate);
  }
  return {ok, detail};
}

// 6. Genome pattern matching agrees with a naive scan.
Verdict genome() {
  constexpr std::size_t kLen = 100000, kK = 16, kD = 1024, kQueries = 1000;
  const std::string ref = hdc::random_sequence(kLen, 2024);
  hdc::IndexOptions opts;
  opts.params = ideal_params();
  const hdc::GenomeIndex idx(ref, kK, 1, kD, opts);
  const int threshold = static_cast<int>(0.3 * kD);

  // software reference: encode every window directly
  std::vector<hdc::Hypervector> windows;
  windows.reserve(idx.entries());
  for (std::size_t e = 0; e < idx.entries(); ++e)
    windows.push_back(idx.encoder().encode(std::string_view(ref).substr(idx.offset(e), kK)));

  std::size_t compared = 0, cam_sw_mismatch = 0, planted_ok = 0, absent_ok = 0, absent = 0;
  auto check_pairs = [&](const hdc::Hypervector& hv) {
    const auto cam = idx.cam_distances(hv);
    for (std::size_t e = 0; e < cam.size(); ++e, ++compared)
      if (cam[e] != static_cast<int>(hdc::hamming_distance(windows[e], hv))) ++cam_sw_mismatch;
  };

  for (std::size_t i = 0; i < kQueries; ++i) {
    CounterRng rng(derive_seed(99, 1, i));
    const std::size_t off = rng.next_below(idx.entries());
    const std::string pat = ref.substr(off, kK);
    const auto res = hdc::query(idx, pat, 0);
    std::set<std::size_t> got, want;
    for (const auto& h : res.hits) got.insert(h.offset);
    for (auto o : hdc::oracle_match(ref, pat)) want.insert(o);
    if (got == want && got.count(off)) ++planted_ok;
    check_pairs(idx.encoder().encode(pat));
  }
  for (std::size_t i = 0; i < kQueries; ++i) {
    CounterRng rng(derive_seed(99, 2, i));
    std::string pat;
    do pat = hdc::random_sequence(kK, rng.next_u64());
    while (!hdc::oracle_match(ref, pat).empty());
    ++absent;
    if (hdc::query(idx, pat, threshold).hits.empty()) ++absent_ok;
    check_pairs(idx.encoder().encode(pat));
  }
  return {planted_ok == kQueries && absent_ok == absent && cam_sw_mismatch == 0,
          fmt::format("planted {}/{} agree with oracle, absent empty at threshold {} {}/{}, CAM vs software "
                      "{} mismatches over {} pairs",
                      planted_ok, kQueries, threshold, absent_ok, absent, cam_sw_mismatch, compared)};
}

// 7. Sense latency / energy are linear in the Hamming threshold.
Verdict sensing_model() {
  AdcConfig adc;
  adc.n_stages = stages_for_threshold(64);
  std::vector<double> t, lat, en;
  for (std::size_t th = 1; th <= 64; ++th) {
    const auto c = sense_cost(stages_for_threshold(th), adc);
    t.push_back(static_cast<double>(th));
    lat.push_back(c.latency);
    en.push_back(c.energy);
  }
  const Fit fl = fit(t, lat), fe = fit(t, en);
  const double eps = 1e-12;
  return {std::abs(fl.r2 - 1.0) <= eps && std::abs(fe.r2 - 1.0) <= eps,
          fmt::format("R^2 latency {:.15f}, energy {:.15f}; slopes {:.3g} s, {:.3g} J per threshold step", fl.r2,
                      fe.r2, fl.slope, fe.slope)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"ideal decode equals popcount over all 8-bit pairs", exhaustive_decode},
      {"matchline current linear in mismatch count", linearity},
      {"64-cell words robust at sigma_vth = 50 mV", robustness64},
      {"limiter ablation: step 2 fails, step 1 holds", ablation},
      {"multi-level worst cases classified exactly", mcam},
      {"genome pattern matching agrees with naive scan", genome},
      {"linear sensing cost model", sensing_model},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    fmt::print("[{}] {} {} ({:.1f} s): {}\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, secs, v.detail);
    std::fflush(stdout);
  }
  fmt::print("[8] N/A  not reproducible at desk scale: cell areas, speedup/energy versus software and GPU "
             "aligners, absolute measured current magnitudes. Covered instead by criteria 1-7.\n");
  fmt::print("{} of {} checked criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
