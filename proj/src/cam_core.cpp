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

#include "fecam/cam_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "fecam/errors.hpp"
#include "fecam/random.hpp"

namespace fecam {

double default_guard(const DeviceParams& params) {
  params.validate();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < params.levels(); ++i)
    min_gap = std::min(min_gap, params.vth_levels[i] - params.vth_levels[i - 1]);
  return 0.4 * min_gap;
}

SearchVoltageLadder make_ladder(const DeviceParams& params, double m_guard) {
  params.validate();
  if (!std::isfinite(m_guard) || !(m_guard > 0.0))
    throw ConfigError(fmt::format("m_guard must be a positive voltage (got {})", m_guard));
  const auto& vth = params.vth_levels;
  const std::size_t n = vth.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (!(vth[i] - vth[i - 1] > 2.0 * m_guard))
      throw ConfigError(fmt::format(
          "levels {} V and {} V are too close for m_guard = {} V (need spacing > {} V)",
          vth[i - 1], vth[i], m_guard, 2.0 * m_guard));
  }
  SearchVoltageLadder ladder;
  ladder.v_low.resize(n);
  ladder.v_high.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    ladder.v_low[s] = s == 0 ? vth[0] - m_guard : 0.5 * (vth[s - 1] + vth[s]);
    ladder.v_high[s] = s + 1 == n ? vth[n - 1] + m_guard : 0.5 * (vth[s] + vth[s + 1]);
  }
  return ladder;
}

bool ladder_is_valid(const SearchVoltageLadder& ladder, const DeviceParams& params, double m_guard) {
  const auto& vth = params.vth_levels;
  const std::size_t n = vth.size();
  if (ladder.v_low.size() != n || ladder.v_high.size() != n) return false;
  // Guard comparisons allow for rounding in the midpoint arithmetic.
  const double guard = m_guard * (1.0 - 1e-12);
  for (std::size_t s = 0; s < n; ++s) {
    const double lo = ladder.v_low[s];
    const double hi = ladder.v_high[s];
    if (!(vth[s] - lo >= guard)) return false;
    if (s > 0 && !(lo - vth[s - 1] >= guard)) return false;
    if (!(hi - vth[s] >= guard)) return false;
    if (s + 1 < n && !(vth[s + 1] - hi >= guard)) return false;
  }
  return true;
}

namespace {

StepVoltages encode_with(const SearchQuery& query, const SearchVoltageLadder& ladder) {
  StepVoltages out;
  out.step1.reserve(query.symbols.size());
  out.step2.reserve(query.symbols.size());
  for (std::size_t i = 0; i < query.symbols.size(); ++i) {
    const Symbol s = query.symbols[i];
    if (s >= ladder.symbols())
      throw InvalidParameter(fmt::format("query symbol {} at cell {} exceeds alphabet of {}",
                                         static_cast<int>(s), i, ladder.symbols()));
    out.step1.push_back(ladder.v_low[s]);
    out.step2.push_back(ladder.v_high[s]);
  }
  return out;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

StepVoltages encode_query_binary(const SearchQuery& query, const SearchVoltageLadder& ladder) {
  if (!ladder.is_binary())
    throw InvalidParameter(fmt::format("binary encoding needs a 2-level ladder (got {})", ladder.symbols()));
  // bit 0 -> (vsl1, vsl2), bit 1 -> (vsl2, vsl3)
  return encode_with(query, ladder);
}

StepVoltages encode_query_mlc(const SearchQuery& query, const SearchVoltageLadder& ladder) {
  return encode_with(query, ladder);
}

double search_word(const CamWord& word, std::span<const double> step_voltages,
                   const DeviceParams& params) {
  if (step_voltages.size() != word.size())
    throw InvalidParameter(fmt::format("{} search voltages for a word of {} cells",
                                       step_voltages.size(), word.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i)
    sum += cell_current(step_voltages[i], word.cells[i], word.cell, params);
  return sum;
}

MlReading two_step_search(const CamWord& word, const SearchQuery& query,
                          const SearchVoltageLadder& ladder, const DeviceParams& params) {
  const StepVoltages v =
      ladder.is_binary() ? encode_query_binary(query, ladder) : encode_query_mlc(query, ladder);
  return {search_word(word, v.step1, params), search_word(word, v.step2, params)};
}

HammingDecode decode_hamming(const MlReading& reading, int wordlength, double i_on_nominal) {
  if (!(i_on_nominal > 0.0)) throw InvalidParameter("i_on_nominal must be > 0");
  HammingDecode d;
  d.n_st0sr1 = std::clamp(round_half_up(reading.i_mls1 / i_on_nominal), 0, wordlength);
  d.n_st1sr0 = std::clamp(round_half_up(wordlength - reading.i_mls2 / i_on_nominal), 0, wordlength);
  d.hamming = d.n_st0sr1 + d.n_st1sr0;
  return d;
}

bool decode_mlc_match(const MlReading& reading, int wordlength, double i_on_nominal,
                      double margin_fraction) {
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5))
    throw InvalidParameter(fmt::format("margin_fraction must be in (0, 0.5) (got {})", margin_fraction));
  if (!(i_on_nominal > 0.0)) throw InvalidParameter("i_on_nominal must be > 0");
  return reading.i_mls1 < margin_fraction * i_on_nominal &&
         reading.i_mls2 > (wordlength - margin_fraction) * i_on_nominal;
}

CamArray::CamArray(DeviceParams params, CellConfig cell, ArrayMode mode, std::size_t rows,
                   std::size_t wordlength, std::uint64_t seed)
    : params_(std::move(params)), cell_(cell), mode_(mode), wordlength_(wordlength) {
  params_.validate();
  cell_.validate();
  if (mode_.kind == ArrayMode::Kind::binary && mode_.bits_per_cell != 1)
    throw ConfigError("binary mode stores exactly 1 bit per cell");
  if (mode_.bits_per_cell < 1 || mode_.bits_per_cell > 4)
    throw ConfigError(fmt::format("bits_per_cell must be in [1, 4] (got {})", mode_.bits_per_cell));
  if (mode_.levels() != params_.levels())
    throw ConfigError(fmt::format("mode needs {} V_TH levels but parameters define {}",
                                  mode_.levels(), params_.levels()));
  if (wordlength_ < 1) throw ConfigError("wordlength must be >= 1");
  words_.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    words_[r].cell = cell_;
    words_[r].cells.reserve(wordlength_);
    for (std::size_t c = 0; c < wordlength_; ++c)
      words_[r].cells.push_back(sample_device(params_, 0, derive_seed(seed, r, c)));
  }
}

void CamArray::write_word(std::size_t row, std::span<const Symbol> symbols, WritePolicy policy) {
  if (row >= rows()) throw InvalidWrite(fmt::format("row {} out of range ({} rows)", row, rows()));
  if (symbols.size() != wordlength_)
    throw InvalidWrite(fmt::format("expected {} symbols, got {}", wordlength_, symbols.size()));
  for (std::size_t c = 0; c < symbols.size(); ++c) {
    if (symbols[c] >= params_.levels())
      throw InvalidWrite(fmt::format("symbol {} at cell {} not storable with {} levels",
                                     static_cast<int>(symbols[c]), c, params_.levels()));
  }
  auto& cells = words_[row].cells;
  for (std::size_t c = 0; c < symbols.size(); ++c) {
    if (policy.fresh_device)
      cells[c] = sample_device(params_, symbols[c], derive_seed(policy.seed, row, c));
    else
      cells[c].stored_state = symbols[c];
  }
}

std::vector<Symbol> CamArray::stored_symbols(std::size_t row) const {
  const auto& cells = word(row).cells;
  std::vector<Symbol> out(cells.size());
  std::transform(cells.begin(), cells.end(), out.begin(),
                 [](const DeviceInstance& d) { return static_cast<Symbol>(d.stored_state); });
  return out;
}

MlReading CamArray::search(std::size_t row, const SearchQuery& query,
                           const SearchVoltageLadder& ladder) const {
  if (ladder.symbols() != params_.levels())
    throw InvalidParameter("ladder alphabet does not match the array levels");
  return two_step_search(word(row), query, ladder, params_);
}

std::vector<MlReading> CamArray::search_all(const SearchQuery& query,
                                            const SearchVoltageLadder& ladder) const {
  std::vector<MlReading> out;
  out.reserve(rows());
  for (std::size_t r = 0; r < rows(); ++r) out.push_back(search(r, query, ladder));
  return out;
}

void write_symbols_csv(std::ostream& out, const CamArray& array) {
  for (std::size_t r = 0; r < array.rows(); ++r) {
    const auto symbols = array.stored_symbols(r);
    for (std::size_t c = 0; c < symbols.size(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(symbols[c]);
    }
    out << '\n';
  }
}

std::vector<std::vector<Symbol>> read_symbols_csv(std::istream& in) {
  std::vector<std::vector<Symbol>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<Symbol> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const char* first = line.data() + pos;
      const char* last = line.data() + comma;
      while (first < last && *first == ' ') ++first;
      while (last > first && last[-1] == ' ') --last;
      unsigned value = 0;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last || first == last || value > 255)
        throw ConfigError(fmt::format("symbols csv line {}: bad field '{}'", line_no,
                                      std::string(first, last)));
      row.push_back(static_cast<Symbol>(value));
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void load_symbols(CamArray& array, const std::vector<std::vector<Symbol>>& rows) {
  if (rows.size() > array.rows())
    throw InvalidWrite(fmt::format("{} csv rows for an array of {} rows", rows.size(), array.rows()));
  for (std::size_t r = 0; r < rows.size(); ++r) array.write_word(r, rows[r]);
}

}  // namespace fecam
