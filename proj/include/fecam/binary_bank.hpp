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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fecam/cam_core.hpp"

namespace fecam {

/// Bit-packed binary CAM for large banks of words up to 64 cells.
///
/// Devices are not stored. The V_TH offset of cell (row, col) is re-derived
/// from the bank seed on demand, using the same key CamArray uses, so a bank
/// and a CamArray built from the same seed hold identical devices. With
/// sigma_vth == 0 every cell is nominal and a matchline current reduces to
/// the four (stored, searched) class counts times their cell currents.
class BinaryCamBank {
 public:
  BinaryCamBank(DeviceParams params, CellConfig cell, SearchVoltageLadder ladder,
                std::size_t wordlength, std::uint64_t seed);

  std::size_t rows() const noexcept { return bits_.size(); }
  std::size_t wordlength() const noexcept { return wordlength_; }
  const DeviceParams& params() const noexcept { return params_; }
  const CellConfig& cell() const noexcept { return cell_; }
  const SearchVoltageLadder& ladder() const noexcept { return ladder_; }
  double i_on_nominal() const noexcept { return cell_.clamp_current(); }

  void reserve(std::size_t rows) { bits_.reserve(rows); }
  /// Bit c of `bits` is cell c. Returns the new row index.
  std::size_t append(std::uint64_t bits);
  void write(std::size_t row, std::uint64_t bits);
  std::uint64_t stored(std::size_t row) const { return bits_.at(row); }

  /// The device at (row, col) as CamArray would sample it.
  DeviceInstance device(std::size_t row, std::size_t col) const;

  MlReading search(std::size_t row, std::uint64_t query) const;
  HammingDecode search_decode(std::size_t row, std::uint64_t query) const;

 private:
  MlReading search_ideal(std::uint64_t stored, std::uint64_t query) const;
  MlReading search_sampled(std::size_t row, std::uint64_t stored, std::uint64_t query) const;

  DeviceParams params_;
  CellConfig cell_;
  SearchVoltageLadder ladder_;
  std::size_t wordlength_;
  std::uint64_t seed_;
  std::uint64_t mask_;
  // [stored][searched] cell currents of nominal devices.
  std::array<std::array<double, 2>, 2> step1_{};
  std::array<std::array<double, 2>, 2> step2_{};
  std::vector<std::uint64_t> bits_;
};

}  // namespace fecam
