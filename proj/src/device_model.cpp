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

#include "fecam/device_model.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "fecam/errors.hpp"
#include "fecam/random.hpp"

namespace fecam {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kRelTol = 1e-9;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InvalidParameter(fmt::format("{} is not finite ({})", name, v));
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw InvalidParameter(fmt::format("{} must be > 0 (got {})", name, v));
}

// Piecewise law at vd_char.
double characterized_current(double vg, double vth, const DeviceParams& p) {
  const double overdrive = vg - vth;
  if (overdrive < 0.0) return p.i0 * std::pow(10.0, overdrive * 1000.0 / p.ss_mv_per_dec);
  return p.i0 + p.k_on * overdrive;
}

}  // namespace

DeviceParams DeviceParams::binary_defaults() { return DeviceParams{}; }

DeviceParams DeviceParams::multilevel_defaults() {
  DeviceParams p;
  p.vth_levels = {0.3, 0.8, 1.3, 1.8};
  return p;
}

void DeviceParams::validate() const {
  if (vth_levels.size() < 2)
    throw InvalidParameter(fmt::format("vth_levels needs at least 2 entries (got {})", vth_levels.size()));
  for (std::size_t i = 0; i < vth_levels.size(); ++i) {
    require_finite(vth_levels[i], "vth_levels");
    if (i > 0 && !(vth_levels[i] > vth_levels[i - 1]))
      throw InvalidParameter(fmt::format("vth_levels must be strictly increasing (index {})", i));
  }
  require_positive(ss_mv_per_dec, "ss");
  require_positive(i0, "i0");
  require_positive(k_on, "k_on");
  require_positive(vd_char, "vd_char");
  require_finite(sigma_vth, "sigma_vth");
  if (sigma_vth < 0.0) throw InvalidParameter(fmt::format("sigma_vth must be >= 0 (got {})", sigma_vth));
}

void CellConfig::validate() const {
  require_positive(rs, "rs");
  require_positive(vd, "vd");
}

double fet_current(double vg, double vd, double vth, const DeviceParams& params) {
  require_finite(vg, "vg");
  require_finite(vth, "vth");
  require_finite(vd, "vd");
  if (vd < 0.0) throw InvalidParameter(fmt::format("vd must be >= 0 (got {})", vd));
  return characterized_current(vg, vth, params) * (vd / params.vd_char);
}

double on_resistance(double vg, double vth, const DeviceParams& params) {
  return params.vd_char / characterized_current(vg, vth, params);
}

double cell_current_at(double vg, double vth, const CellConfig& cell, const DeviceParams& params) {
  if (!cell.limiter_enabled) return fet_current(vg, cell.vd, vth, params);
  require_finite(vg, "vg");
  require_finite(vth, "vth");

  // Residual of the series node: channel current minus resistor current.
  // Increasing in the channel voltage v; negative at 0, positive at vd.
  const double conductance = characterized_current(vg, vth, params) / params.vd_char;
  auto residual = [&](double v) { return conductance * v - (cell.vd - v) / cell.rs; };

  double lo = 0.0;
  double hi = cell.vd;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= kRelTol * hi) {
      // Evaluating at the lower bracket keeps I <= vd / rs.
      return conductance * lo;
    }
  }
  throw NumericalError(fmt::format("series solve did not converge (vg={}, vth={})", vg, vth));
}

double cell_current(double vg, const DeviceInstance& device, const CellConfig& cell,
                    const DeviceParams& params) {
  return cell_current_at(vg, device.vth(), cell, params);
}

double sample_vth_offset(const DeviceParams& params, std::uint64_t seed) {
  if (params.sigma_vth == 0.0) return 0.0;
  CounterRng rng(derive_seed(seed));
  return params.sigma_vth * rng.next_normal();
}

DeviceInstance sample_device(const DeviceParams& params, std::size_t stored_state,
                             std::uint64_t seed) {
  if (stored_state >= params.levels())
    throw InvalidParameter(fmt::format("stored_state {} out of range for {} levels", stored_state, params.levels()));
  const double eps = sample_vth_offset(params, seed);
  DeviceInstance d;
  d.stored_state = stored_state;
  d.sampled_vth.reserve(params.levels());
  for (double v : params.vth_levels) d.sampled_vth.push_back(v + eps);
  return d;
}

DeviceInstance nominal_device(const DeviceParams& params, std::size_t stored_state) {
  if (stored_state >= params.levels())
    throw InvalidParameter(fmt::format("stored_state {} out of range for {} levels", stored_state, params.levels()));
  return DeviceInstance{params.vth_levels, stored_state};
}

}  // namespace fecam
