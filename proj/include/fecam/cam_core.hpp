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
#include <span>
#include <vector>

#include "fecam/device_model.hpp"

namespace fecam {

using Symbol = std::uint8_t;

/// Binary (1 bit/cell, 2 V_TH levels) or multi-level (2^bits levels).
struct ArrayMode {
  enum class Kind { binary, multilevel };
  Kind kind = Kind::binary;
  unsigned bits_per_cell = 1;

  static ArrayMode binary() { return {Kind::binary, 1}; }
  static ArrayMode multilevel(unsigned bits) { return {Kind::multilevel, bits}; }

  std::size_t levels() const noexcept { return std::size_t{1} << bits_per_cell; }
  bool operator==(const ArrayMode&) const = default;
};

/// Per-symbol gate voltages of the two search steps.
///
/// Step 1 applies v_low[s], which sits just below the V_TH of level s; step 2
/// applies v_high[s], just above it. A binary ladder is the two-level case:
/// vsl1 = v_low[0], vsl2 = v_high[0] = v_low[1], vsl3 = v_high[1].
struct SearchVoltageLadder {
  std::vector<double> v_low;
  std::vector<double> v_high;

  std::size_t symbols() const noexcept { return v_low.size(); }
  bool is_binary() const noexcept { return v_low.size() == 2; }
  double vsl1() const { return v_low.at(0); }
  double vsl2() const { return v_low.at(1); }
  double vsl3() const { return v_high.at(1); }
};

/// Guard used when none is configured: 0.4 of the smallest level spacing.
double default_guard(const DeviceParams& params);

/// Midpoint placement with `m_guard` outside the outermost levels.
/// Throws ConfigError when adjacent levels are not more than 2*m_guard apart.
SearchVoltageLadder make_ladder(const DeviceParams& params, double m_guard);
inline SearchVoltageLadder make_ladder(const DeviceParams& params) {
  return make_ladder(params, default_guard(params));
}

/// Checks the ordering invariants of a ladder against `params`.
bool ladder_is_valid(const SearchVoltageLadder& ladder, const DeviceParams& params, double m_guard);

struct SearchQuery {
  std::vector<Symbol> symbols;
};

struct StepVoltages {
  std::vector<double> step1;
  std::vector<double> step2;
};

/// Matchline currents of the two search steps.
struct MlReading {
  double i_mls1 = 0.0;
  double i_mls2 = 0.0;
};

StepVoltages encode_query_binary(const SearchQuery& query, const SearchVoltageLadder& ladder);
StepVoltages encode_query_mlc(const SearchQuery& query, const SearchVoltageLadder& ladder);

/// Cells of one matchline.
struct CamWord {
  std::vector<DeviceInstance> cells;
  CellConfig cell;

  std::size_t size() const noexcept { return cells.size(); }
};

/// Ideal current sum over the cells of a word.
double search_word(const CamWord& word, std::span<const double> step_voltages,
                   const DeviceParams& params);

MlReading two_step_search(const CamWord& word, const SearchQuery& query,
                          const SearchVoltageLadder& ladder, const DeviceParams& params);

struct HammingDecode {
  int n_st0sr1 = 0;
  int n_st1sr0 = 0;
  int hamming = 0;
};

HammingDecode decode_hamming(const MlReading& reading, int wordlength, double i_on_nominal);

/// Exact-match rule for multi-level words. margin_fraction in (0, 0.5).
bool decode_mlc_match(const MlReading& reading, int wordlength, double i_on_nominal,
                      double margin_fraction = 0.4);

struct WritePolicy {
  bool fresh_device = false;  ///< redraw V_TH on write
  std::uint64_t seed = 0;     ///< used only when fresh_device is set
};

/// A bank of words with uniform wordlength.
class CamArray {
 public:
  /// Samples rows*wordlength devices, all storing symbol 0.
  CamArray(DeviceParams params, CellConfig cell, ArrayMode mode, std::size_t rows,
           std::size_t wordlength, std::uint64_t seed);

  std::size_t rows() const noexcept { return words_.size(); }
  std::size_t wordlength() const noexcept { return wordlength_; }
  const DeviceParams& params() const noexcept { return params_; }
  const CellConfig& cell() const noexcept { return cell_; }
  ArrayMode mode() const noexcept { return mode_; }
  const CamWord& word(std::size_t row) const { return words_.at(row); }

  /// Throws InvalidWrite on bad row, length or symbol.
  void write_word(std::size_t row, std::span<const Symbol> symbols, WritePolicy policy = {});
  std::vector<Symbol> stored_symbols(std::size_t row) const;

  MlReading search(std::size_t row, const SearchQuery& query,
                   const SearchVoltageLadder& ladder) const;
  std::vector<MlReading> search_all(const SearchQuery& query,
                                    const SearchVoltageLadder& ladder) const;

 private:
  DeviceParams params_;
  CellConfig cell_;
  ArrayMode mode_;
  std::size_t wordlength_;
  std::vector<CamWord> words_;
};

/// CSV with one row per word and one symbol per column, no header.
void write_symbols_csv(std::ostream& out, const CamArray& array);
std::vector<std::vector<Symbol>> read_symbols_csv(std::istream& in);
/// Writes every CSV row into `array`; row count must not exceed rows().
void load_symbols(CamArray& array, const std::vector<std::vector<Symbol>>& rows);

}  // namespace fecam
