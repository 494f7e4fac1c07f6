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

#include "fecam/cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "fecam/cam_core.hpp"
#include "fecam/errors.hpp"

namespace fecam::cli {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::device_iv, "device-iv"},
    {ExperimentKind::bcam_sweep, "bcam-sweep"},
    {ExperimentKind::limiter_ablation, "limiter-ablation"},
    {ExperimentKind::mcam_worst, "mcam-worst"},
    {ExperimentKind::adc_sweep, "adc-sweep"},
    {ExperimentKind::genome_build, "genome-build"},
    {ExperimentKind::genome_query, "genome-query"},
    {ExperimentKind::bench_report, "bench-report"},
};

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported with their full path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), join(key));
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ConfigError(fmt::format("{}: expected a finite number", join(key)));
    out = v.get<double>();
  }

  void number(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(fmt::format("{}: expected a non-negative integer", join(key)));
    out = static_cast<Int>(v.get<std::uint64_t>());
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(fmt::format("{}: expected true or false", join(key)));
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", join(key)));
    out = v.get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(fmt::format("{}: expected an array of numbers", join(key)));
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(fmt::format("{}[{}]: expected a number", join(key), i));
      out.push_back(v[i].get<double>());
    }
  }

  void strings(const std::string& key, std::vector<std::string>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(fmt::format("{}: expected an array of strings", join(key)));
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) throw ConfigError(fmt::format("{}[{}]: expected a string", join(key), i));
      out.push_back(v[i].get<std::string>());
    }
  }

  /// Rejects keys that no reader asked for.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("unknown key '{}'", join(key)));
    }
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto rethrow_at(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [kind, n] : kKinds)
    if (name == n) return kind;
  throw ConfigError(fmt::format("unknown experiment '{}'", name));
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& [kind, name] : kKinds) v.push_back(kind);
    return v;
  }();
  return kinds;
}

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "svg") return OutputFormat::svg;
  throw ConfigError(fmt::format("unknown output format '{}' (csv, json, svg)", name));
}

static const char* format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
  }
  return "?";
}

int HdcOptions::effective_threshold() const {
  return threshold.value_or(static_cast<int>(0.3 * static_cast<double>(dimension)));
}

bool RunConfig::has_format(OutputFormat f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

DeviceParams RunConfig::effective_device() const {
  DeviceParams p = device;
  if (!vth_levels_set) {
    p.vth_levels = multilevel() ? DeviceParams::multilevel_defaults().vth_levels
                                : DeviceParams::binary_defaults().vth_levels;
  }
  return p;
}

double RunConfig::effective_guard() const {
  return m_guard.value_or(default_guard(effective_device()));
}

mc::McExperimentConfig RunConfig::mc_config() const {
  mc::McExperimentConfig c;
  c.wordlength = wordlength;
  c.mode = multilevel() ? ArrayMode::multilevel(bits_per_cell) : ArrayMode::binary();
  c.trials = trials;
  c.params = effective_device();
  c.cell = cell;
  c.m_guard = m_guard;
  c.seed = seed;
  c.scenario = multilevel() ? mc::Scenario::mcam_worst
               : experiment == ExperimentKind::limiter_ablation ? mc::Scenario::mixed
                                                                : scenario;
  c.margin_fraction = margin_fraction;
  c.threads = threads;
  return c;
}

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  Section root(j, "");
  if (root.has("experiment")) {
    std::string name;
    root.string("experiment", name);
    cfg.experiment = rethrow_at("experiment", [&] { return experiment_from_string(name); });
  }
  root.integer("seed", cfg.seed);
  root.string("output_dir", cfg.output_dir);
  if (root.has("formats")) {
    std::vector<std::string> names;
    root.strings("formats", names);
    cfg.formats.clear();
    for (const auto& n : names) cfg.formats.push_back(rethrow_at("formats", [&] { return format_from_string(n); }));
  }

  if (root.has("device")) {
    auto s = root.child("device");
    if (s.has("vth_levels")) {
      s.numbers("vth_levels", cfg.device.vth_levels);
      cfg.vth_levels_set = true;
    }
    s.number("ss_mv_per_dec", cfg.device.ss_mv_per_dec);
    s.number("i0", cfg.device.i0);
    s.number("k_on", cfg.device.k_on);
    s.number("sigma_vth", cfg.device.sigma_vth);
    s.number("vd_char", cfg.device.vd_char);
    s.finish();
  }
  if (root.has("cell")) {
    auto s = root.child("cell");
    s.number("rs", cfg.cell.rs);
    s.number("vd", cfg.cell.vd);
    s.boolean("limiter_enabled", cfg.cell.limiter_enabled);
    s.finish();
  }
  if (root.has("ladder")) {
    auto s = root.child("ladder");
    s.number("m_guard", cfg.m_guard);
    s.finish();
  }
  if (root.has("array")) {
    auto s = root.child("array");
    s.integer("wordlength", cfg.wordlength);
    s.integer("bits_per_cell", cfg.bits_per_cell);
    s.finish();
  }
  if (root.has("montecarlo")) {
    auto s = root.child("montecarlo");
    s.integer("trials", cfg.trials);
    if (s.has("scenario")) {
      std::string name;
      s.string("scenario", name);
      cfg.scenario = rethrow_at(s.join("scenario"), [&] { return mc::scenario_from_string(name); });
    }
    s.number("margin_fraction", cfg.margin_fraction);
    s.integer("threads", cfg.threads);
    s.finish();
  }
  if (root.has("device_iv")) {
    auto s = root.child("device_iv");
    s.integer("devices", cfg.device_iv.devices);
    s.number("vg_start", cfg.device_iv.vg_start);
    s.number("vg_stop", cfg.device_iv.vg_stop);
    s.number("vg_step", cfg.device_iv.vg_step);
    s.numbers("read_overdrives", cfg.device_iv.read_overdrives);
    s.finish();
  }
  if (root.has("sensing")) {
    auto s = root.child("sensing");
    s.number("t_stage", cfg.adc.t_stage);
    s.number("e_stage", cfg.adc.e_stage);
    s.integer("max_threshold", cfg.max_threshold);
    s.finish();
  }
  if (root.has("hdc")) {
    auto s = root.child("hdc");
    s.integer("dimension", cfg.hdc.dimension);
    s.integer("k", cfg.hdc.k);
    s.integer("stride", cfg.hdc.stride);
    s.string("reference_fasta", cfg.hdc.reference_fasta);
    s.integer("synthetic_length", cfg.hdc.synthetic_length);
    s.string("queries_file", cfg.hdc.queries_file);
    s.integer("synthetic_queries", cfg.hdc.synthetic_queries);
    if (s.has("threshold")) {
      int t = 0;
      s.integer("threshold", t);
      cfg.hdc.threshold = t;
    }
    s.integer("item_seed", cfg.hdc.item_seed);
    s.number("sigma_vth", cfg.hdc.sigma_vth);
    s.finish();
  }
  if (root.has("report")) {
    auto s = root.child("report");
    s.strings("inputs", cfg.report_inputs);
    s.finish();
  }
  root.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  const DeviceParams d = cfg.effective_device();
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  auto& formats = j["formats"] = json::array();
  for (auto f : cfg.formats) formats.push_back(format_name(f));
  j["device"] = {{"vth_levels", d.vth_levels},
                 {"ss_mv_per_dec", d.ss_mv_per_dec},
                 {"i0", d.i0},
                 {"k_on", d.k_on},
                 {"sigma_vth", d.sigma_vth},
                 {"vd_char", d.vd_char}};
  j["cell"] = {{"rs", cfg.cell.rs}, {"vd", cfg.cell.vd}, {"limiter_enabled", cfg.cell.limiter_enabled}};
  j["ladder"] = {{"m_guard", cfg.effective_guard()}};
  j["array"] = {{"wordlength", cfg.wordlength}, {"bits_per_cell", cfg.bits_per_cell}};
  j["montecarlo"] = {{"trials", cfg.trials},
                     {"scenario", mc::to_string(cfg.scenario)},
                     {"margin_fraction", cfg.margin_fraction},
                     {"threads", cfg.threads}};
  j["device_iv"] = {{"devices", cfg.device_iv.devices},
                    {"vg_start", cfg.device_iv.vg_start},
                    {"vg_stop", cfg.device_iv.vg_stop},
                    {"vg_step", cfg.device_iv.vg_step},
                    {"read_overdrives", cfg.device_iv.read_overdrives}};
  j["sensing"] = {{"t_stage", cfg.adc.t_stage}, {"e_stage", cfg.adc.e_stage}, {"max_threshold", cfg.max_threshold}};
  j["hdc"] = {{"dimension", cfg.hdc.dimension},
              {"k", cfg.hdc.k},
              {"stride", cfg.hdc.stride},
              {"reference_fasta", cfg.hdc.reference_fasta},
              {"synthetic_length", cfg.hdc.synthetic_length},
              {"queries_file", cfg.hdc.queries_file},
              {"synthetic_queries", cfg.hdc.synthetic_queries},
              {"threshold", cfg.hdc.effective_threshold()},
              {"item_seed", cfg.hdc.item_seed},
              {"sigma_vth", cfg.hdc.sigma_vth}};
  j["report"] = {{"inputs", cfg.report_inputs}};
  return j;
}

}  // namespace fecam::cli
