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

#include <bit>
#include <vector>

#include "doctest.h"
#include "fecam/cam_core.hpp"
#include "fecam/errors.hpp"
#include "fecam/sensing.hpp"

using namespace fecam;

TEST_CASE("thermometer code") {
  AdcConfig cfg{1e-7, 8};
  CHECK(thermometer_code(0.0, cfg) == 0);
  CHECK(thermometer_code(3.2e-7, cfg) == 3);
  CHECK(thermometer_code(0.5e-7, cfg) == 0);   // reference is strict
  CHECK(thermometer_code(0.51e-7, cfg) == 1);
  CHECK(thermometer_code(100e-7, cfg) == 8);   // saturates
  for (int m = 0; m <= 8; ++m) CHECK(thermometer_code(m * 1e-7, cfg) == m);
  CHECK_THROWS_AS(thermometer_code(-1e-9, cfg), InvalidParameter);
}

TEST_CASE("thermometer code is non-decreasing") {
  AdcConfig cfg{1e-7, 16};
  int prev = 0;
  for (int i = 0; i <= 20000; ++i) {
    const int code = thermometer_code(i * 1e-10, cfg);
    REQUIRE(code >= prev);
    prev = code;
  }
  CHECK(prev == 16);
}

TEST_CASE("full-match word saturates the converter") {
  auto p = DeviceParams::binary_defaults();
  p.sigma_vth = 0.0;
  const CellConfig cell;
  const std::size_t n = 8;
  CamArray a(p, cell, ArrayMode::binary(), 1, n, 0);
  const auto r = a.search(0, SearchQuery{std::vector<Symbol>(n, 0)}, make_ladder(p));
  CHECK(thermometer_code(r.i_mls2, AdcConfig{cell.clamp_current(), n}) == int(n));
}

TEST_CASE("codes recover both mismatch counts for every 8-bit pair") {
  auto p = DeviceParams::binary_defaults();
  p.sigma_vth = 0.0;
  const CellConfig cell;
  const std::size_t n = 8;
  const auto l = make_ladder(p);
  const AdcConfig adc{cell.clamp_current(), n};
  CamArray a(p, cell, ArrayMode::binary(), 1, n, 0);
  auto bits = [n](unsigned v) {
    std::vector<Symbol> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<Symbol>((v >> i) & 1U);
    return s;
  };
  for (unsigned w = 0; w < 256; ++w) {
    a.write_word(0, bits(w));
    for (unsigned q = 0; q < 256; q += 7) {
      const auto r = a.search(0, SearchQuery{bits(q)}, l);
      REQUIRE(thermometer_code(r.i_mls1, adc) == std::popcount(~w & q & 0xFFU));
      REQUIRE(int(n) - thermometer_code(r.i_mls2, adc) == std::popcount(w & ~q & 0xFFU));
    }
  }
}

TEST_CASE("sense cost is linear in stages") {
  AdcConfig cfg;
  cfg.n_stages = 65;
  const auto one = sense_cost(1, cfg);
  CHECK(one.latency == cfg.t_stage);
  CHECK(one.energy == cfg.e_stage);
  const auto a = sense_cost(10, cfg);
  const auto b = sense_cost(20, cfg);
  CHECK(b.latency == doctest::Approx(2.0 * a.latency));
  CHECK(b.energy == doctest::Approx(2.0 * a.energy));
  CHECK(stages_for_threshold(3) == 4);
  CHECK_THROWS_AS(sense_cost(0, cfg), InvalidParameter);
  CHECK_THROWS_AS(sense_cost(66, cfg), InvalidParameter);
  AdcConfig broken;
  broken.t_stage = 0.0;
  CHECK_THROWS_AS(broken.validate(), InvalidParameter);
}
