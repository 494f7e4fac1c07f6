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

#include "fecam/sensing.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fecam/errors.hpp"

namespace fecam {

void AdcConfig::validate() const {
  if (!(std::isfinite(i_on_nominal) && i_on_nominal > 0.0))
    throw InvalidParameter(fmt::format("adc i_on_nominal must be > 0 (got {})", i_on_nominal));
  if (n_stages < 1) throw InvalidParameter("adc needs at least one stage");
  if (!(std::isfinite(t_stage) && t_stage > 0.0))
    throw InvalidParameter(fmt::format("t_stage must be > 0 (got {})", t_stage));
  if (!(std::isfinite(e_stage) && e_stage > 0.0))
    throw InvalidParameter(fmt::format("e_stage must be > 0 (got {})", e_stage));
}

int thermometer_code(double i_ml, const AdcConfig& cfg) {
  if (!(i_ml >= 0.0)) throw InvalidParameter(fmt::format("matchline current must be >= 0 (got {})", i_ml));
  int code = 0;
  for (std::size_t k = 0; k < cfg.n_stages; ++k) {
    if (!(i_ml > (static_cast<double>(k) + 0.5) * cfg.i_on_nominal)) break;
    ++code;
  }
  return code;
}

SenseCost sense_cost(std::size_t stages_used, const AdcConfig& cfg) {
  if (stages_used < 1 || stages_used > cfg.n_stages)
    throw InvalidParameter(fmt::format("stages_used {} outside [1, {}]", stages_used, cfg.n_stages));
  const double n = static_cast<double>(stages_used);
  return {n * cfg.t_stage, n * cfg.e_stage};
}

}  // namespace fecam
