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
#include <vector>

namespace fecam {

/// Nominal FeFET parameters shared by every device of an array.
///
/// The piecewise I-V law gives the channel current at the characterization
/// drain bias `vd_char`. Away from it the channel is treated as a linear
/// (triode) conductance, which is what makes the series-resistor solve
/// non-trivial: I(vg, vd) = I_char(vg) * vd / vd_char.
struct DeviceParams {
  std::vector<double> vth_levels{0.4, 1.4};  ///< V, strictly increasing
  double ss_mv_per_dec = 100.0;              ///< subthreshold swing
  double i0 = 1e-9;                          ///< A at vg == vth
  double k_on = 1e-3;                        ///< A/V above threshold
  double sigma_vth = 0.05;                   ///< V, device-to-device
  double vd_char = 0.1;                      ///< V, bias of the I-V law

  static DeviceParams binary_defaults();
  static DeviceParams multilevel_defaults();  ///< 4 levels, 2 bits/cell

  std::size_t levels() const noexcept { return vth_levels.size(); }

  /// Throws InvalidParameter when any invariant is violated.
  void validate() const;
};

struct CellConfig {
  double rs = 1e6;   ///< series limiter, ohm
  double vd = 0.1;   ///< matchline drain bias, V
  bool limiter_enabled = true;

  void validate() const;

  /// Clamp current vd / rs; the decode reference for matchline sensing.
  double clamp_current() const noexcept { return vd / rs; }
};

/// One sampled device: all levels shifted by a single Gaussian offset.
struct DeviceInstance {
  std::vector<double> sampled_vth;
  std::size_t stored_state = 0;

  double vth() const { return sampled_vth.at(stored_state); }
  /// Rigid shift relative to the nominal levels.
  double offset(const DeviceParams& params) const { return sampled_vth.front() - params.vth_levels.front(); }

  bool operator==(const DeviceInstance&) const = default;
};

/// Bare FeFET drain current.
double fet_current(double vg, double vd, double vth, const DeviceParams& params);

/// Channel resistance vd / I at the characterization bias.
double on_resistance(double vg, double vth, const DeviceParams& params);

/// Current through the FeFET + series resistor, or the bare FeFET when the
/// limiter is disabled. The series node is found by bisection.
double cell_current(double vg, const DeviceInstance& device, const CellConfig& cell,
                    const DeviceParams& params);

/// Same as cell_current for a device whose threshold is already known.
double cell_current_at(double vg, double vth, const CellConfig& cell, const DeviceParams& params);

/// Draws one device. Deterministic in `seed`.
DeviceInstance sample_device(const DeviceParams& params, std::size_t stored_state,
                             std::uint64_t seed);

/// The Gaussian offset sample_device would apply for `seed`.
double sample_vth_offset(const DeviceParams& params, std::uint64_t seed);

/// Device with the nominal levels (sigma ignored).
DeviceInstance nominal_device(const DeviceParams& params, std::size_t stored_state);

}  // namespace fecam
