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

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "fecam/device_model.hpp"
#include "fecam/errors.hpp"

using namespace fecam;

namespace {

// Parameters of the worked examples (i0 = 1e-7 A, k_on = 1e-5 A/V).
DeviceParams example_params() {
  DeviceParams p;
  p.i0 = 1e-7;
  p.k_on = 1e-5;
  p.ss_mv_per_dec = 100.0;
  return p;
}

// Independent route for the series node: with a triode channel of
// conductance g, g*v = (vd - v)/rs solves to I = g*vd / (1 + g*rs).
double closed_form_series(double vg, double vth, const CellConfig& cell, const DeviceParams& p) {
  const double g = fet_current(vg, p.vd_char, vth, p) / p.vd_char;
  return g * cell.vd / (1.0 + g * cell.rs);
}

}  // namespace

TEST_CASE("fet_current piecewise law") {
  const auto p = example_params();
  const double vth = 0.4;
  CHECK(fet_current(vth, p.vd_char, vth, p) == doctest::Approx(1e-7).epsilon(1e-12));
  CHECK(fet_current(vth - 0.5, p.vd_char, vth, p) == doctest::Approx(1e-12).epsilon(1e-9));
  CHECK(fet_current(vth + 1.0, p.vd_char, vth, p) == doctest::Approx(1.01e-5).epsilon(1e-12));
  // Continuity across the threshold.
  CHECK(fet_current(vth - 1e-12, p.vd_char, vth, p) == doctest::Approx(p.i0).epsilon(1e-9));
  // Triode scaling in drain bias.
  CHECK(fet_current(vth + 1.0, 0.5 * p.vd_char, vth, p) == doctest::Approx(0.505e-5));
}

TEST_CASE("fet_current rejects non-finite input") {
  const auto p = example_params();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fet_current(nan, 0.1, 0.4, p), InvalidParameter);
  CHECK_THROWS_AS(fet_current(0.5, inf, 0.4, p), InvalidParameter);
  CHECK_THROWS_AS(fet_current(0.5, 0.1, nan, p), InvalidParameter);
}

TEST_CASE("fet_current is strictly increasing on a 1 mV grid") {
  for (const auto& p : {example_params(), DeviceParams::binary_defaults()}) {
    const double vth = 0.4;
    double prev = fet_current(vth - 1.0, p.vd_char, vth, p);
    for (int mv = -999; mv <= 2000; ++mv) {
      const double cur = fet_current(vth + mv * 1e-3, p.vd_char, vth, p);
      REQUIRE(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("parameter validation") {
  DeviceParams p;
  p.vth_levels = {1.0, 0.5};
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = DeviceParams{};
  p.ss_mv_per_dec = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = DeviceParams{};
  p.sigma_vth = -0.01;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  CellConfig c;
  c.rs = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  CHECK_NOTHROW(DeviceParams::multilevel_defaults().validate());
}

TEST_CASE("cell_current with the series limiter") {
  const auto p = example_params();
  CellConfig cell;  // 1 Mohm, 0.1 V
  const DeviceInstance d = nominal_device(p, 0);
  const double vth = d.vth();

  SUBCASE("deep subthreshold is unaffected by the resistor") {
    const double vg = vth - 1.0;
    CHECK(cell_current(vg, d, cell, p) == doctest::Approx(fet_current(vg, cell.vd, vth, p)).epsilon(1e-3));
  }
  SUBCASE("on state is clamped near vd/rs") {
    const double i = cell_current(vth + 1.0, d, cell, p);
    CHECK(std::abs(i - 100e-9) / 100e-9 < 0.05);
  }
  SUBCASE("limiter disabled passes through") {
    CellConfig bare = cell;
    bare.limiter_enabled = false;
    for (double vg : {-0.5, 0.3, 0.4, 0.9, 1.7})
      CHECK(cell_current(vg, d, bare, p) == fet_current(vg, bare.vd, vth, p));
  }
  SUBCASE("bisection agrees with the closed form") {
    for (const auto& params : {p, DeviceParams::binary_defaults()}) {
      for (double rs : {1e4, 1e5, 1e6, 1e7}) {
        CellConfig c{rs, 0.1, true};
        for (int mv = -1000; mv <= 2000; mv += 7) {
          const double vg = vth + mv * 1e-3;
          const double expect = closed_form_series(vg, vth, c, params);
          REQUIRE(cell_current_at(vg, vth, c, params) == doctest::Approx(expect).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("clamp bound holds for every gate voltage") {
  for (const auto& p : {example_params(), DeviceParams::binary_defaults()}) {
    for (double rs : {1e3, 1e6, 1e8}) {
      CellConfig c{rs, 0.1, true};
      for (int mv = -2000; mv <= 4000; mv += 3) {
        const double i = cell_current_at(mv * 1e-3, 0.4, c, p);
        REQUIRE(i >= 0.0);
        REQUIRE(i <= c.vd / c.rs);
      }
    }
  }
}

TEST_CASE("ON current is independent of the gate voltage under the clamp") {
  for (const auto& p : {example_params(), DeviceParams::binary_defaults()}) {
    const CellConfig c;
    const double vth = 0.4;
    for (int a = 400; a <= 2000; a += 50) {
      const double vg1 = vth + a * 1e-3;
      if (c.rs < 20.0 * on_resistance(vg1, vth, p)) continue;
      const double i1 = cell_current_at(vg1, vth, c, p);
      for (int b = 400; b <= 2000; b += 50) {
        const double i2 = cell_current_at(vth + b * 1e-3, vth, c, p);
        REQUIRE(std::abs(i1 - i2) / i1 <= 0.02);
      }
    }
  }
}

TEST_CASE("limiter suppresses V_TH-induced current spread by more than 10x") {
  for (auto p : {example_params(), DeviceParams::binary_defaults()}) {
    p.sigma_vth = 0.05;
    CellConfig on;
    CellConfig off = on;
    off.limiter_enabled = false;
    const double vg = p.vth_levels[0] + 0.7;
    auto cv = [](const std::vector<double>& v) {
      double m = 0.0, s = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / static_cast<double>(v.size() - 1)) / m;
    };
    std::vector<double> with, without;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto d = sample_device(p, 0, seed);
      with.push_back(cell_current(vg, d, on, p));
      without.push_back(cell_current(vg, d, off, p));
    }
    CHECK(cv(with) * 10.0 <= cv(without));
  }
}

TEST_CASE("sample_device") {
  DeviceParams p;
  SUBCASE("zero variance reproduces the nominal levels") {
    p.sigma_vth = 0.0;
    const auto d = sample_device(p, 1, 42);
    CHECK(d.sampled_vth == p.vth_levels);
    CHECK(d.stored_state == 1);
  }
  SUBCASE("deterministic per seed, rigid shift") {
    const auto a = sample_device(p, 0, 1234);
    const auto b = sample_device(p, 0, 1234);
    CHECK(a == b);
    CHECK(a.sampled_vth[1] - a.sampled_vth[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sample_device(p, 0, 1235) != a);
  }
  SUBCASE("10,000 draws at 50 mV have sample sigma in [48, 52] mV") {
    p.sigma_vth = 0.05;
    double m = 0.0, s = 0.0;
    std::vector<double> eps;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) eps.push_back(sample_device(p, 0, seed).offset(p));
    for (double e : eps) m += e;
    m /= static_cast<double>(eps.size());
    for (double e : eps) s += (e - m) * (e - m);
    const double sd = std::sqrt(s / static_cast<double>(eps.size() - 1));
    CHECK(sd >= 0.048);
    CHECK(sd <= 0.052);
    CHECK(std::abs(m) < 0.002);
  }
  SUBCASE("stored state out of range") {
    CHECK_THROWS_AS(sample_device(p, 2, 0), InvalidParameter);
  }
}
