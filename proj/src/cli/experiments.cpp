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

#include "fecam/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "fecam/cam_core.hpp"
#include "fecam/cli/svg.hpp"
#include "fecam/errors.hpp"
#include "fecam/hdc_genome.hpp"
#include "fecam/montecarlo.hpp"
#include "fecam/random.hpp"
#include "fecam/sensing.hpp"

namespace fecam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError(fmt::format("short write to '{}'", tmp.string()));
  }
  fs::rename(tmp, path);
}

namespace {

constexpr std::uint64_t kIvStream = 0x49560001;
constexpr std::uint64_t kQueryStream = 0x51520001;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

class Sink {
 public:
  Sink(const RunConfig& cfg, RunOutcome& outcome) : cfg_(cfg), outcome_(outcome) {
    outcome_.directory = fs::path(cfg.output_dir) / to_string(cfg.experiment);
  }

  void csv(const std::string& name, const std::string& content) { put(OutputFormat::csv, name, content); }
  void svg(const std::string& name, const PlotSpec& plot) {
    if (cfg_.has_format(OutputFormat::svg)) put(OutputFormat::svg, name, render_svg(plot));
  }
  void summary(json results) {
    json j;
    j["experiment"] = to_string(cfg_.experiment);
    j["config"] = to_json(cfg_);
    j["config"].erase("output_dir");  // artifacts do not depend on where they land
    j["results"] = std::move(results);
    put(OutputFormat::json, "summary.json", j.dump(2) + "\n");
  }
  bool wants(OutputFormat f) const { return cfg_.has_format(f); }

 private:
  void put(OutputFormat f, const std::string& name, const std::string& content) {
    if (!cfg_.has_format(f)) return;
    const fs::path p = outcome_.directory / name;
    write_file_atomic(p, content);
    outcome_.written.push_back(p);
  }

  const RunConfig& cfg_;
  RunOutcome& outcome_;
};

struct Stats {
  double mean = 0.0, std = 0.0;
  double cv() const { return mean != 0.0 ? std / mean : 0.0; }
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

std::string margin_text(const mc::Separation& s) {
  return s.margin ? fmt::format("{:.3f}", *s.margin) : std::string("n/a");
}

// ---------------------------------------------------------------- device-iv

void run_device_iv(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  const DeviceParams params = cfg.effective_device();
  params.validate();
  cfg.cell.validate();
  const auto& iv = cfg.device_iv;
  if (iv.devices == 0) throw InvalidParameter("device_iv.devices must be >= 1");
  if (!(iv.vg_step > 0.0) || !(iv.vg_stop >= iv.vg_start))
    throw InvalidParameter("device_iv needs vg_step > 0 and vg_stop >= vg_start");
  const auto points = static_cast<std::size_t>(std::floor((iv.vg_stop - iv.vg_start) / iv.vg_step + 1e-9)) + 1;
  const std::size_t levels = params.levels();

  std::string curve = "device,state,vg,i_fet,i_cell\n";
  std::string reads = "device,state,overdrive,vg,i_fet,i_cell\n";
  // [state][overdrive] -> samples over devices
  std::vector<std::vector<std::vector<double>>> fet(levels), lim(levels);
  for (std::size_t s = 0; s < levels; ++s) {
    fet[s].resize(iv.read_overdrives.size());
    lim[s].resize(iv.read_overdrives.size());
  }
  PlotSpec plot{"I_D-V_G of sampled devices", "V_G (V)", "I_D (A)", true, {}};

  for (std::size_t d = 0; d < iv.devices; ++d) {
    const std::uint64_t key = derive_seed(cfg.seed, kIvStream, d);
    for (std::size_t s = 0; s < levels; ++s) {
      const DeviceInstance dev = sample_device(params, s, key);
      Series bare{d == 0 && s == 0 ? "FeFET" : "", {}, false, "#aaaaaa", d == 0 && s == 0};
      Series cell{d == 0 && s == 0 ? "1FeFET1R" : "", {}, false, "#1f77b4", d == 0 && s == 0};
      for (std::size_t i = 0; i < points; ++i) {
        const double vg = iv.vg_start + static_cast<double>(i) * iv.vg_step;
        const double a = fet_current(vg, cfg.cell.vd, dev.vth(), params);
        const double b = cell_current(vg, dev, cfg.cell, params);
        curve += fmt::format("{},{},{:.4f},{:.9e},{:.9e}\n", d, s, vg, a, b);
        if (sink.wants(OutputFormat::svg)) {
          bare.points.emplace_back(vg, a);
          cell.points.emplace_back(vg, b);
        }
      }
      plot.series.push_back(std::move(bare));
      plot.series.push_back(std::move(cell));
      for (std::size_t o = 0; o < iv.read_overdrives.size(); ++o) {
        const double vg = params.vth_levels[s] + iv.read_overdrives[o];
        const double a = fet_current(vg, cfg.cell.vd, dev.vth(), params);
        const double b = cell_current(vg, dev, cfg.cell, params);
        fet[s][o].push_back(a);
        lim[s][o].push_back(b);
        reads += fmt::format("{},{},{:.4f},{:.4f},{:.9e},{:.9e}\n", d, s, iv.read_overdrives[o], vg, a, b);
      }
    }
  }

  json res;
  res["devices"] = iv.devices;
  res["points_per_curve"] = points;
  res["clamp_current"] = cfg.cell.clamp_current();
  auto& rd = res["reads"] = json::array();
  double headline_fet = 0.0, headline_cell = 0.0;
  for (std::size_t s = 0; s < levels; ++s) {
    for (std::size_t o = 0; o < iv.read_overdrives.size(); ++o) {
      const Stats a = stats(fet[s][o]), b = stats(lim[s][o]);
      rd.push_back({{"state", s},
                    {"overdrive", iv.read_overdrives[o]},
                    {"vg", params.vth_levels[s] + iv.read_overdrives[o]},
                    {"fet_mean", a.mean},
                    {"fet_cv", a.cv()},
                    {"cell_mean", b.mean},
                    {"cell_cv", b.cv()},
                    {"cv_suppression", b.cv() > 0.0 ? json(a.cv() / b.cv()) : json(nullptr)}});
      if (s == 0 && o == 0) headline_fet = a.cv(), headline_cell = b.cv();
    }
  }
  sink.csv("iv.csv", curve);
  sink.csv("reads.csv", reads);
  sink.summary(std::move(res));
  sink.svg("iv.svg", plot);
  outcome.summary_line =
      fmt::format("device-iv: {} devices x {} states, {} points/curve; ON-read CV FeFET {:.2f}% vs 1FeFET1R {:.4f}%",
                  iv.devices, levels, points, 100.0 * headline_fet, 100.0 * headline_cell);
}

// ------------------------------------------------------- Monte Carlo plots

PlotSpec staircase_plot(const mc::McResult& r) {
  PlotSpec p{fmt::format("Matchline current vs mismatch count (N = {})", r.config.wordlength), "k",
             "I_ML / I_on", false, {}};
  Series s1{"I_MLS1 mean", {}, false, kPalette[0]}, s2{"I_MLS2 mean", {}, false, kPalette[1]};
  Series d1{"", {}, true, kPalette[0], false}, d2{"", {}, true, kPalette[1], false};
  for (const auto& sc : r.scenarios) {
    s1.points.emplace_back(sc.k, sc.mean_i_mls1 / r.i_on_nominal);
    s2.points.emplace_back(sc.k, sc.mean_i_mls2 / r.i_on_nominal);
    const std::size_t shown = std::min<std::size_t>(sc.trials.size(), 50);
    for (std::size_t t = 0; t < shown; ++t) {
      d1.points.emplace_back(sc.k, sc.trials[t].i_mls1 / r.i_on_nominal);
      d2.points.emplace_back(sc.k, sc.trials[t].i_mls2 / r.i_on_nominal);
    }
  }
  p.series = {d1, d2, s1, s2};
  return p;
}

PlotSpec distribution_plot(const std::string& title, const std::vector<std::pair<std::string, const mc::McResult*>>& runs,
                           bool step2) {
  PlotSpec p{title, step2 ? "stored-1 / searched-0 count" : "stored-0 / searched-1 count", "I_ML / I_on", false, {}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& [label, r] = runs[i];
    Series s{label, {}, true, kPalette[i % 6]};
    const double dx = 0.15 * static_cast<double>(i);
    for (const auto& sc : r->scenarios) {
      const std::size_t shown = std::min<std::size_t>(sc.trials.size(), 200);
      for (std::size_t t = 0; t < shown; ++t) {
        const auto& tr = sc.trials[t];
        s.points.emplace_back((step2 ? tr.n_below : tr.n_above) + dx,
                              (step2 ? tr.i_mls2 : tr.i_mls1) / r->i_on_nominal);
      }
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

std::string trials_csv(const mc::McResult& r) {
  std::ostringstream os;
  mc::write_trials_csv(os, r);
  return os.str();
}

void run_bcam(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  const mc::McResult r = mc::run_bcam_sweep(cfg.mc_config());
  sink.csv("trials.csv", trials_csv(r));
  std::string table = "scenario,k,mean_i_mls1,std_i_mls1,mean_i_mls2,std_i_mls2,error_rate\n";
  for (const auto& sc : r.scenarios)
    table += fmt::format("{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.6f}\n", sc.id, sc.k, sc.mean_i_mls1, sc.std_i_mls1,
                         sc.mean_i_mls2, sc.std_i_mls2, sc.error_rate);
  sink.csv("staircase.csv", table);
  sink.summary(mc::summary_json(r));
  sink.svg("staircase.svg", staircase_plot(r));
  sink.svg("distributions.svg", distribution_plot("Step-1 current distributions", {{"step 1", &r}}, false));
  outcome.summary_line = fmt::format(
      "bcam-sweep: N={}, {} scenarios x {} trials, error rate {:.4g}, thermometer accuracy {:.4g}, margins "
      "{}/{} I_on",
      r.config.wordlength, r.scenarios.size(), r.config.trials, r.error_rate, r.thermometer_accuracy,
      margin_text(r.step1), margin_text(r.step2));
}

void run_ablation(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  const mc::AblationResult a = mc::run_limiter_ablation(cfg.mc_config());
  sink.csv("trials_limiter_on.csv", trials_csv(a.with_limiter));
  sink.csv("trials_limiter_off.csv", trials_csv(a.without_limiter));
  json res;
  res["with_limiter"] = mc::summary_json(a.with_limiter);
  res["without_limiter"] = mc::summary_json(a.without_limiter);
  sink.summary(std::move(res));
  const std::vector<std::pair<std::string, const mc::McResult*>> runs{{"limiter on", &a.with_limiter},
                                                                      {"limiter off", &a.without_limiter}};
  sink.svg("step1.svg", distribution_plot("Step-1 search currents", runs, false));
  sink.svg("step2.svg", distribution_plot("Step-2 search currents", runs, true));
  outcome.summary_line = fmt::format(
      "limiter-ablation: N={}, overlap step1/step2 with limiter {:.4g}/{:.4g}, without {:.4g}/{:.4g}",
      a.with_limiter.config.wordlength, a.with_limiter.step1.overlap_fraction,
      a.with_limiter.step2.overlap_fraction, a.without_limiter.step1.overlap_fraction,
      a.without_limiter.step2.overlap_fraction);
}

void run_mcam(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  const mc::McResult r = mc::run_mcam_worst_case(cfg.mc_config());
  sink.csv("trials.csv", trials_csv(r));
  sink.summary(mc::summary_json(r));
  PlotSpec p{"Multi-level worst cases", "scenario", "I_ML / I_on", false, {}};
  Series s1{"I_MLS1", {}, true, kPalette[0]}, s2{"I_MLS2", {}, true, kPalette[1]};
  for (std::size_t i = 0; i < r.scenarios.size(); ++i) {
    const auto& sc = r.scenarios[i];
    for (std::size_t t = 0; t < std::min<std::size_t>(sc.trials.size(), 200); ++t) {
      s1.points.emplace_back(static_cast<double>(i), sc.trials[t].i_mls1 / r.i_on_nominal);
      s2.points.emplace_back(static_cast<double>(i) + 0.2, sc.trials[t].i_mls2 / r.i_on_nominal);
    }
  }
  p.series = {s1, s2};
  sink.svg("distributions.svg", p);
  std::string detail;
  for (const auto& sc : r.scenarios) detail += fmt::format(" {}={:.4g}", sc.id, 1.0 - sc.error_rate);
  outcome.summary_line = fmt::format("mcam-worst: N={}, {} levels, {} trials/scenario, accuracy{}",
                                     r.config.wordlength, r.config.mode.levels(), r.config.trials, detail);
}

// ---------------------------------------------------------------- adc-sweep

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    sse += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

void run_adc(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  if (cfg.max_threshold < 1) throw InvalidParameter("sensing.max_threshold must be >= 1");
  AdcConfig adc = cfg.adc;
  adc.i_on_nominal = cfg.cell.clamp_current();
  adc.n_stages = stages_for_threshold(cfg.max_threshold);
  adc.validate();
  std::vector<double> th, lat, en;
  std::string table = "threshold,stages,latency_s,energy_j\n";
  for (std::size_t t = 1; t <= cfg.max_threshold; ++t) {
    const std::size_t stages = stages_for_threshold(t);
    const SenseCost c = sense_cost(stages, adc);
    th.push_back(static_cast<double>(t));
    lat.push_back(c.latency);
    en.push_back(c.energy);
    table += fmt::format("{},{},{:.9e},{:.9e}\n", t, stages, c.latency, c.energy);
  }
  const LineFit fl = fit_line(th, lat), fe = fit_line(th, en);
  json res;
  res["n_stages"] = adc.n_stages;
  res["latency_fit"] = {{"slope", fl.slope}, {"intercept", fl.intercept}, {"r2", fl.r2}};
  res["energy_fit"] = {{"slope", fe.slope}, {"intercept", fe.intercept}, {"r2", fe.r2}};
  sink.csv("sense_cost.csv", table);
  sink.summary(std::move(res));
  PlotSpec pl{"Sense latency vs Hamming threshold", "threshold", "latency (ns)", false, {}};
  PlotSpec pe{"Sense energy vs Hamming threshold", "threshold", "energy (fJ)", false, {}};
  Series sl{"latency", {}, false, kPalette[0]}, se{"energy", {}, false, kPalette[1]};
  for (std::size_t i = 0; i < th.size(); ++i) {
    sl.points.emplace_back(th[i], lat[i] * 1e9);
    se.points.emplace_back(th[i], en[i] * 1e15);
  }
  pl.series = {sl};
  pe.series = {se};
  sink.svg("latency.svg", pl);
  sink.svg("energy.svg", pe);
  outcome.summary_line =
      fmt::format("adc-sweep: thresholds 1..{}, latency {:.3g} s/threshold (R^2 {:.6f}), energy {:.3g} J/threshold",
                  cfg.max_threshold, fl.slope, fl.r2, fe.slope);
}

// ------------------------------------------------------------------- genome

std::string load_reference(const RunConfig& cfg) {
  if (cfg.hdc.reference_fasta.empty()) return hdc::random_sequence(cfg.hdc.synthetic_length, cfg.seed);
  std::ifstream in(cfg.hdc.reference_fasta);
  if (!in) throw ConfigError(fmt::format("cannot read hdc.reference_fasta '{}'", cfg.hdc.reference_fasta));
  return hdc::read_fasta(in);
}

hdc::GenomeIndex make_index(const RunConfig& cfg, const std::string& reference) {
  hdc::IndexOptions o;
  o.params = cfg.effective_device();
  o.params.sigma_vth = cfg.hdc.sigma_vth;
  o.cell = cfg.cell;
  o.m_guard = cfg.m_guard;
  o.item_seed = cfg.hdc.item_seed;
  o.device_seed = cfg.seed;
  return hdc::GenomeIndex(reference, cfg.hdc.k, cfg.hdc.stride, cfg.hdc.dimension, o);
}

json index_json(const hdc::GenomeIndex& idx, std::size_t reference_length) {
  return {{"reference_length", reference_length},
          {"entries", idx.entries()},
          {"segments_per_entry", idx.segments_per_entry()},
          {"physical_words", idx.entries() * idx.segments_per_entry()},
          {"cells", idx.entries() * idx.segments_per_entry() * hdc::kSegmentWidth}};
}

void run_genome_build(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  const std::string ref = load_reference(cfg);
  const hdc::GenomeIndex idx = make_index(cfg, ref);
  std::size_t mismatches = 0;
  std::string table = "entry,offset\n";
  for (std::size_t e = 0; e < idx.entries(); ++e) {
    const std::size_t off = idx.offset(e);
    if (idx.reassemble(e) != idx.encoder().encode(std::string_view(ref).substr(off, idx.k()))) ++mismatches;
    table += fmt::format("{},{}\n", e, off);
  }
  json res = index_json(idx, ref.size());
  res["roundtrip_mismatches"] = mismatches;
  sink.csv("entries.csv", table);
  sink.summary(std::move(res));
  outcome.summary_line = fmt::format(
      "genome-build: {} bases -> {} entries x {} segments ({} cells), round-trip mismatches {}", ref.size(),
      idx.entries(), idx.segments_per_entry(), idx.entries() * idx.segments_per_entry() * hdc::kSegmentWidth,
      mismatches);
}

struct QuerySet {
  std::vector<std::string> patterns;
  std::vector<std::optional<std::size_t>> planted;  ///< synthetic only
  bool synthetic = false;
};

QuerySet load_queries(const RunConfig& cfg, const std::string& ref) {
  QuerySet qs;
  if (!cfg.hdc.queries_file.empty()) {
    std::ifstream in(cfg.hdc.queries_file);
    if (!in) throw ConfigError(fmt::format("cannot read hdc.queries_file '{}'", cfg.hdc.queries_file));
    qs.patterns = hdc::read_patterns(in);
    qs.planted.assign(qs.patterns.size(), std::nullopt);
    return qs;
  }
  qs.synthetic = true;
  const std::size_t k = cfg.hdc.k;
  if (ref.size() < k) throw ConfigError("hdc.synthetic_length must be >= hdc.k");
  const std::size_t n = cfg.hdc.synthetic_queries;
  const std::size_t planted = (n + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(derive_seed(cfg.seed, kQueryStream, i));
    if (i < planted) {
      // planted at window starts so every one is indexed
      const std::size_t windows = (ref.size() - k) / cfg.hdc.stride + 1;
      const std::size_t off = rng.next_below(windows) * cfg.hdc.stride;
      qs.patterns.push_back(ref.substr(off, k));
      qs.planted.emplace_back(off);
    } else {
      std::string p;
      for (int attempt = 0; attempt < 64; ++attempt) {
        p = hdc::random_sequence(k, rng.next_u64());
        if (hdc::oracle_match(ref, p).empty()) break;
      }
      qs.patterns.push_back(std::move(p));
      qs.planted.emplace_back(std::nullopt);
    }
  }
  return qs;
}

void run_genome_query(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  const std::string ref = load_reference(cfg);
  const hdc::GenomeIndex idx = make_index(cfg, ref);
  const QuerySet qs = load_queries(cfg, ref);
  const int threshold = cfg.hdc.effective_threshold();

  std::string table = "query,offset,distance\n";
  std::size_t total_hits = 0, agree = 0, planted = 0, planted_found = 0, absent = 0, absent_clean = 0;
  for (std::size_t q = 0; q < qs.patterns.size(); ++q) {
    const hdc::QueryResult r = hdc::query(idx, qs.patterns[q], threshold);
    total_hits += r.hits.size();
    for (const auto& h : r.hits) table += fmt::format("{},{},{}\n", q, h.offset, h.distance);

    std::set<std::size_t> exact, truth;
    for (const auto& h : r.hits)
      if (h.distance == 0) exact.insert(h.offset);
    for (std::size_t off : hdc::oracle_match(ref, qs.patterns[q]))
      if (off % idx.stride() == 0) truth.insert(off);
    if (exact == truth) ++agree;

    if (qs.synthetic) {
      if (qs.planted[q]) {
        ++planted;
        if (exact.count(*qs.planted[q])) ++planted_found;
      } else {
        ++absent;
        if (r.hits.empty()) ++absent_clean;
      }
    }
  }

  AdcConfig adc = cfg.adc;
  adc.i_on_nominal = cfg.cell.clamp_current();
  adc.n_stages = hdc::kSegmentWidth;
  const std::size_t stages = std::min(stages_for_threshold(static_cast<std::size_t>(threshold)), hdc::kSegmentWidth);
  const SenseCost per_word = sense_cost(stages, adc);
  const double words = static_cast<double>(idx.segments_per_entry() * idx.entries());

  json res = index_json(idx, ref.size());
  res["threshold"] = threshold;
  res["queries"] = qs.patterns.size();
  res["total_hits"] = total_hits;
  res["oracle_agreement"] = qs.patterns.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(qs.patterns.size());
  if (qs.synthetic) {
    res["planted"] = {{"queries", planted}, {"found", planted_found}};
    res["absent"] = {{"queries", absent}, {"empty", absent_clean}};
  }
  res["query_cost"] = {{"stages_per_segment", stages},
                       {"segments_per_entry", idx.segments_per_entry()},
                       {"entries", idx.entries()},
                       {"latency_s", per_word.latency * words},
                       {"energy_j", per_word.energy * words},
                       {"note", "stages x segments x entries, one sense operation at a time"}};
  sink.csv("hits.csv", table);
  sink.summary(std::move(res));
  outcome.summary_line = fmt::format(
      "genome-query: {} queries over {} entries at threshold {}, {} hits, oracle agreement {}/{}{}", qs.patterns.size(),
      idx.entries(), threshold, total_hits, agree, qs.patterns.size(),
      qs.synthetic ? fmt::format(", planted found {}/{}, absent empty {}/{}", planted_found, planted, absent_clean,
                                 absent)
                   : std::string());
}

// ------------------------------------------------------------- bench-report

const json* find(const json& j, std::initializer_list<const char*> path) {
  const json* cur = &j;
  for (const char* k : path) {
    if (!cur->is_object() || !cur->contains(k)) return nullptr;
    cur = &(*cur)[k];
  }
  return cur;
}

json margins(const json& mc) {
  json m;
  m["error_rate"] = mc.value("error_rate", 0.0);
  m["step1_margin_ion"] = mc["step1"]["margin_ion"];
  m["step2_margin_ion"] = mc["step2"]["margin_ion"];
  m["step1_overlap"] = mc["step1"]["overlap_fraction"];
  m["step2_overlap"] = mc["step2"]["overlap_fraction"];
  return m;
}

json report_entry(const std::string& source, const json& s) {
  const json* exp = find(s, {"experiment"});
  const json* wl = find(s, {"config", "array", "wordlength"});
  const json* ts = find(s, {"config", "sensing", "t_stage"});
  const json* es = find(s, {"config", "sensing", "e_stage"});
  if (!exp || !exp->is_string() || !wl || !ts || !es || !find(s, {"results"}))
    throw ConfigError("not an experiment summary (missing experiment/config/results)");
  const json& res = s["results"];
  json e;
  e["source"] = source;
  e["experiment"] = *exp;
  const std::string kind = exp->get<std::string>();
  // genome banks are always segment-wide
  const std::size_t n = kind.rfind("genome", 0) == 0 ? hdc::kSegmentWidth : wl->get<std::size_t>();
  e["wordlength"] = n;
  // full-resolution decode of one word: one stage per cell
  e["sense_latency_s"] = static_cast<double>(n) * ts->get<double>();
  e["sense_energy_j"] = static_cast<double>(n) * es->get<double>();
  if (kind == "bcam-sweep" || kind == "mcam-worst") {
    e.update(margins(res));
  } else if (kind == "limiter-ablation") {
    e["with_limiter"] = margins(res["with_limiter"]);
    e["without_limiter"] = margins(res["without_limiter"]);
  } else if (kind == "genome-query") {
    const json& qc = res["query_cost"];
    e["query_latency_s"] = qc["latency_s"];
    e["query_energy_j"] = qc["energy_j"];
    e["entries"] = res["entries"];
    e["segments_per_entry"] = res["segments_per_entry"];
    e["stages_per_segment"] = qc["stages_per_segment"];
    e["oracle_agreement"] = res["oracle_agreement"];
  } else if (kind == "adc-sweep") {
    e["latency_fit_r2"] = res["latency_fit"]["r2"];
    e["energy_fit_r2"] = res["energy_fit"]["r2"];
  }
  return e;
}

void run_bench_report(const RunConfig& cfg, Sink& sink, RunOutcome& outcome) {
  json report = bench_report(cfg.report_inputs, outcome.warnings);
  std::string table = "source,experiment,wordlength,sense_latency_s,sense_energy_j,error_rate,query_latency_s,query_energy_j\n";
  auto cell = [](const json& e, const char* key) {
    return e.contains(key) && !e[key].is_null() ? e[key].dump() : std::string();
  };
  for (const auto& e : report["runs"]) {
    table += fmt::format("{},{},{},{},{},{},{},{}\n", e["source"].get<std::string>(), e["experiment"].get<std::string>(),
                         cell(e, "wordlength"), cell(e, "sense_latency_s"), cell(e, "sense_energy_j"),
                         cell(e, "error_rate"), cell(e, "query_latency_s"), cell(e, "query_energy_j"));
  }
  sink.csv("report.csv", table);
  if (sink.wants(OutputFormat::json)) sink.summary(report);
  outcome.summary_line = fmt::format("bench-report: {} runs aggregated, {} warnings", report["runs"].size(),
                                     outcome.warnings.size());
}

}  // namespace

json bench_report(const std::vector<std::string>& inputs, std::vector<std::string>& warnings) {
  json report;
  report["label"] = "model-derived, not paper-validated";
  report["runs"] = json::array();
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) {
      warnings.push_back(fmt::format("skipping '{}': cannot read", path));
      continue;
    }
    try {
      report["runs"].push_back(report_entry(path, json::parse(in)));
    } catch (const std::exception& e) {
      warnings.push_back(fmt::format("skipping '{}': {}", path, e.what()));
    }
  }
  report["warnings"] = warnings;
  return report;
}

RunOutcome run_experiment(const RunConfig& cfg) {
  RunOutcome outcome;
  Sink sink(cfg, outcome);
  switch (cfg.experiment) {
    case ExperimentKind::device_iv: run_device_iv(cfg, sink, outcome); break;
    case ExperimentKind::bcam_sweep: run_bcam(cfg, sink, outcome); break;
    case ExperimentKind::limiter_ablation: run_ablation(cfg, sink, outcome); break;
    case ExperimentKind::mcam_worst: run_mcam(cfg, sink, outcome); break;
    case ExperimentKind::adc_sweep: run_adc(cfg, sink, outcome); break;
    case ExperimentKind::genome_build: run_genome_build(cfg, sink, outcome); break;
    case ExperimentKind::genome_query: run_genome_query(cfg, sink, outcome); break;
    case ExperimentKind::bench_report: run_bench_report(cfg, sink, outcome); break;
  }
  return outcome;
}

}  // namespace fecam::cli
