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

#include "fecam/binary_bank.hpp"

#include <bit>

#include <fmt/format.h>

#include "fecam/errors.hpp"
#include "fecam/random.hpp"

namespace fecam {

BinaryCamBank::BinaryCamBank(DeviceParams params, CellConfig cell, SearchVoltageLadder ladder,
                             std::size_t wordlength, std::uint64_t seed)
    : params_(std::move(params)),
      cell_(cell),
      ladder_(std::move(ladder)),
      wordlength_(wordlength),
      seed_(seed),
      mask_(wordlength >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << wordlength) - 1) {
  params_.validate();
  cell_.validate();
  if (params_.levels() != 2 || !ladder_.is_binary())
    throw ConfigError("a binary bank needs 2 V_TH levels and a binary ladder");
  if (wordlength_ < 1 || wordlength_ > 64)
    throw ConfigError(fmt::format("bank wordlength must be in [1, 64] (got {})", wordlength_));
  for (int s = 0; s < 2; ++s) {
    for (int q = 0; q < 2; ++q) {
      step1_[s][q] = cell_current_at(ladder_.v_low[q], params_.vth_levels[s], cell_, params_);
      step2_[s][q] = cell_current_at(ladder_.v_high[q], params_.vth_levels[s], cell_, params_);
    }
  }
}

std::size_t BinaryCamBank::append(std::uint64_t bits) {
  bits_.push_back(bits & mask_);
  return bits_.size() - 1;
}

void BinaryCamBank::write(std::size_t row, std::uint64_t bits) {
  if (row >= rows()) throw InvalidWrite(fmt::format("row {} out of range ({} rows)", row, rows()));
  bits_[row] = bits & mask_;
}

DeviceInstance BinaryCamBank::device(std::size_t row, std::size_t col) const {
  const std::size_t state = (stored(row) >> col) & 1U;
  return sample_device(params_, state, derive_seed(seed_, row, col));
}

MlReading BinaryCamBank::search(std::size_t row, std::uint64_t query) const {
  const std::uint64_t s = stored(row);
  const std::uint64_t q = query & mask_;
  if (params_.sigma_vth == 0.0) return search_ideal(s, q);
  return search_sampled(row, s, q);
}

HammingDecode BinaryCamBank::search_decode(std::size_t row, std::uint64_t query) const {
  return decode_hamming(search(row, query), static_cast<int>(wordlength_), i_on_nominal());
}

MlReading BinaryCamBank::search_ideal(std::uint64_t s, std::uint64_t q) const {
  const double n00 = std::popcount(~s & ~q & mask_);
  const double n01 = std::popcount(~s & q);
  const double n10 = std::popcount(s & ~q);
  const double n11 = std::popcount(s & q);
  MlReading r;
  r.i_mls1 = n00 * step1_[0][0] + n01 * step1_[0][1] + n10 * step1_[1][0] + n11 * step1_[1][1];
  r.i_mls2 = n00 * step2_[0][0] + n01 * step2_[0][1] + n10 * step2_[1][0] + n11 * step2_[1][1];
  return r;
}

MlReading BinaryCamBank::search_sampled(std::size_t row, std::uint64_t s, std::uint64_t q) const {
  MlReading r;
  for (std::size_t c = 0; c < wordlength_; ++c) {
    const std::size_t state = (s >> c) & 1U;
    const std::size_t bit = (q >> c) & 1U;
    const double vth =
        params_.vth_levels[state] + sample_vth_offset(params_, derive_seed(seed_, row, c));
    r.i_mls1 += cell_current_at(ladder_.v_low[bit], vth, cell_, params_);
    r.i_mls2 += cell_current_at(ladder_.v_high[bit], vth, cell_, params_);
  }
  return r;
}

}  // namespace fecam
