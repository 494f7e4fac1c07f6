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

namespace fecam {

/// Serial thermometer-code ADC on the matchline.
///
/// Stage k compares against (k + 0.5) * i_on_nominal, so the output code is
/// the nearest multiple of i_on, saturating at n_stages. The defaults for
/// t_stage / e_stage are model placeholders, not measured figures.
struct AdcConfig {
  double i_on_nominal = 1e-7;  ///< A
  std::size_t n_stages = 64;
  double t_stage = 100e-12;  ///< s per stage
  double e_stage = 1e-15;    ///< J per stage

  void validate() const;
};

int thermometer_code(double i_ml, const AdcConfig& cfg);

struct SenseCost {
  double latency = 0.0;  ///< s
  double energy = 0.0;   ///< J
};

SenseCost sense_cost(std::size_t stages_used, const AdcConfig& cfg);

/// Stages needed to tell "distance <= threshold" from "> threshold".
constexpr std::size_t stages_for_threshold(std::size_t threshold) noexcept { return threshold + 1; }

}  // namespace fecam
