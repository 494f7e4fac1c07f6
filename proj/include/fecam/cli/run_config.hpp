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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fecam/device_model.hpp"
#include "fecam/hdc_genome.hpp"
#include "fecam/montecarlo.hpp"
#include "fecam/sensing.hpp"

namespace fecam::cli {

enum class ExperimentKind {
  device_iv,
  bcam_sweep,
  limiter_ablation,
  mcam_worst,
  adc_sweep,
  genome_build,
  genome_query,
  bench_report,
};

const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& name);
const std::vector<ExperimentKind>& all_experiments();

enum class OutputFormat { csv, json, svg };
OutputFormat format_from_string(const std::string& name);

struct DeviceIvOptions {
  std::size_t devices = 60;
  double vg_start = -0.5;
  double vg_stop = 2.5;
  double vg_step = 0.01;
  /// Gate overdrives above each nominal level at which ON currents are read.
  std::vector<double> read_overdrives{0.4, 0.7};
};

struct HdcOptions {
  std::size_t dimension = 1024;
  std::size_t k = 16;
  std::size_t stride = 1;
  std::string reference_fasta;  ///< empty: synthetic reference
  std::size_t synthetic_length = 100000;
  std::string queries_file;     ///< empty: synthetic planted + absent queries
  std::size_t synthetic_queries = 100;
  std::optional<int> threshold;  ///< unset: 0.3 * dimension
  std::uint64_t item_seed = hdc::IndexOptions{}.item_seed;
  /// Device variation inside the index banks; other device knobs are shared.
  double sigma_vth = hdc::IndexOptions{}.params.sigma_vth;

  int effective_threshold() const;
};

/// Every knob of a CLI run. Module defaults are copied in, never restated.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::bcam_sweep;
  std::uint64_t seed = 1;
  std::string output_dir = "fecam-out";
  std::vector<OutputFormat> formats{OutputFormat::csv, OutputFormat::json};

  DeviceParams device = DeviceParams::binary_defaults();
  bool vth_levels_set = false;  ///< false: per-mode default levels
  CellConfig cell;
  std::optional<double> m_guard;
  std::size_t wordlength = mc::McExperimentConfig{}.wordlength;
  unsigned bits_per_cell = 2;  ///< multi-level experiments

  std::size_t trials = mc::McExperimentConfig{}.trials;
  mc::Scenario scenario = mc::McExperimentConfig{}.scenario;
  double margin_fraction = mc::McExperimentConfig{}.margin_fraction;
  unsigned threads = mc::McExperimentConfig{}.threads;

  DeviceIvOptions device_iv;
  AdcConfig adc;  ///< i_on_nominal and n_stages are derived per run
  std::size_t max_threshold = 64;
  HdcOptions hdc;
  std::vector<std::string> report_inputs;

  bool has_format(OutputFormat f) const;
  bool multilevel() const noexcept { return experiment == ExperimentKind::mcam_worst; }
  /// Device parameters with the per-mode V_TH default applied.
  DeviceParams effective_device() const;
  double effective_guard() const;
  mc::McExperimentConfig mc_config() const;
};

/// Parses a JSON config; unknown keys and type errors raise ConfigError
/// naming the full key path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Effective configuration with every default resolved.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace fecam::cli
