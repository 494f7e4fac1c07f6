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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fecam/cam_core.hpp"
#include "fecam/device_model.hpp"
#include "fecam/sensing.hpp"

namespace fecam::mc {

/// Stored/query pattern generators.
enum class Scenario {
  case_i,          ///< stored all 0, k cells searched with 1 (k St0Sr1)
  case_ii,         ///< stored all 1, k cells searched with 0 (k St1Sr0)
  random_hamming,  ///< random stored word, k random cells flipped in the query
  mixed,           ///< k cells of the probed mismatch class, other cells random among the rest
  mcam_worst,      ///< stored all '01', at most one mismatching cell
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct McExperimentConfig {
  std::size_t wordlength = 8;
  ArrayMode mode = ArrayMode::binary();
  std::size_t trials = 1000;
  DeviceParams params = DeviceParams::binary_defaults();
  CellConfig cell;
  std::optional<double> m_guard;  ///< unset: default_guard(params)
  std::uint64_t seed = 1;
  Scenario scenario = Scenario::case_i;
  double margin_fraction = 0.4;
  unsigned threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

/// One search of one sampled word.
struct TrialRecord {
  double i_mls1 = 0.0;
  double i_mls2 = 0.0;
  int n_above = 0;  ///< query symbol above stored (St0Sr1 for binary)
  int n_below = 0;  ///< query symbol below stored (St1Sr0 for binary)
  int decoded = 0;  ///< Hamming distance, or 1/0 match for multi-level
  int truth = 0;
  int code1 = 0;    ///< thermometer code of step 1
  int code2 = 0;    ///< thermometer code of step 2
};

struct ScenarioResult {
  std::string id;
  int k = 0;
  std::vector<TrialRecord> trials;
  double mean_i_mls1 = 0.0, std_i_mls1 = 0.0;
  double mean_i_mls2 = 0.0, std_i_mls2 = 0.0;
  double error_rate = 0.0;             ///< decoded != truth
  double thermometer_accuracy = 0.0;   ///< binary only; codes reproduce both counts
};

/// Separation of matchline-current groups that differ by one mismatch.
struct Separation {
  std::size_t groups = 0;
  /// Minimum gap between adjacent groups in units of i_on (negative: overlap).
  /// Unset when fewer than two groups exist.
  std::optional<double> margin;
  /// Fraction of samples inside the range of an adjacent group.
  double overlap_fraction = 0.0;
};

struct McResult {
  McExperimentConfig config;
  double i_on_nominal = 0.0;
  SearchVoltageLadder ladder;
  std::vector<ScenarioResult> scenarios;
  double error_rate = 0.0;
  double thermometer_accuracy = 0.0;
  Separation step1;  ///< step-1 currents grouped by n_above
  Separation step2;  ///< step-2 currents grouped by n_below
};

struct AblationResult {
  McResult with_limiter;
  McResult without_limiter;
};

McResult run_bcam_sweep(const McExperimentConfig& cfg);
AblationResult run_limiter_ablation(const McExperimentConfig& cfg);
McResult run_mcam_worst_case(const McExperimentConfig& cfg);

/// Step-1 grouping uses increasing current with the count, step 2 decreasing.
Separation separation(const std::vector<std::pair<int, double>>& samples, bool increasing,
                      double i_on);

/// One row per trial per scenario.
void write_trials_csv(std::ostream& out, const McResult& result);
nlohmann::json summary_json(const McResult& result);

}  // namespace fecam::mc
