/*
 * Copyright 2026 The meanfield Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include "doctest.h"
#include "meanfield/error.hpp"
#include "meanfield/functional.hpp"
#include "meanfield/solver.hpp"
#include "oracles.hpp"

using namespace meanfield;

namespace {

double inner(const Field& a, const Field& b) { return integrate(a * b); }

}  // namespace

TEST_SUITE("functional") {
  TEST_CASE("energy at zero and constant shifts") {
    const FlatTorus t = make_torus(1.4, 32);
    const Field h = Field::constant(t, 2.0);
    const Field zero = Field::constant(t, 0.0);
    CHECK(eval_J(zero, h).total == doctest::Approx(-kEightPi * std::log(2.0)).epsilon(1e-14));
    CHECK(eval_J(zero, h, 1.0).total == doctest::Approx(-(kEightPi - 1.0) * std::log(2.0)).epsilon(1e-14));
    const Field u = random_smooth_field(t, 3, 0.5);
    const Field hv = Field::from_function(t, [](double x, double y) { return 1.0 + 0.3 * std::sin(kTwoPi * x) * std::cos(y); });
    for (double eps : {0.0, 0.5}) {
      for (double c : {-7.0, 3.0, 40.0}) {
        CHECK(std::abs(eval_J(u + c, hv, eps).total - eval_J(u, hv, eps).total) < 1e-10);
      }
    }
    CHECK_THROWS_AS(eval_J(u, Field::constant(t, -1.0)), InvalidArgument);
    CHECK_THROWS_AS(eval_J(u, h, -0.1), InvalidArgument);
  }

  TEST_CASE("breakdown sums to the total") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field u = random_smooth_field(t, 5, 1.0);
    const EnergyBreakdown e = eval_J(u, Field::constant(t, 1.0), 0.3);
    CHECK(e.total == doctest::Approx(e.dirichlet_half + e.linear + e.logterm));
    CHECK(e.dirichlet_half == doctest::Approx(0.5 * dirichlet_energy(u)));
    CHECK(e.eps == 0.3);
  }

  TEST_CASE("gradient agrees with finite differences") {
    std::mt19937_64 rng(17);
    for (int c = 0; c < 10; ++c) {
      const double v = 0.7 + 0.3 * c;
      const FlatTorus t = make_torus(v, 32);
      const Field u = random_smooth_field(t, rng(), 1.0);
      const Field w = random_smooth_field(t, rng(), 1.0);
      const Field h = Field::from_function(t, [&](double x, double y) {
        return 1.0 + 0.4 * std::cos(kTwoPi * (x + y / v));
      });
      const double eps = 0.25 * c;
      const double step = 1e-5;
      const double fd = (eval_J(u + w * step, h, eps).total - eval_J(u + w * (-step), h, eps).total) / (2 * step);
      const double an = inner(l2_gradient(u, h, eps), w);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }

  TEST_CASE("gradient has zero mean and vanishes on solutions") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field h = Field::constant(t, 1.0);
    const Field u = random_smooth_field(t, 9, 2.0);
    CHECK(std::abs(integrate(l2_gradient(u, h))) < 1e-12);
    const Field zero = Field::constant(t, 0.0);
    CHECK(l2_gradient(zero, h).max() == doctest::Approx(0.0));
  }

  TEST_CASE("normalization and the residual") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field h = Field::from_function(t, [](double x, double) { return 2.0 + std::sin(kTwoPi * x); });
    const Field u = random_smooth_field(t, 1, 1.0);
    CHECK_THROWS_WITH_AS(residual_eq5(u, h), doctest::Contains("normalize_H1"), InvalidArgument);
    const Field un = normalize_H1(u, h);
    CHECK(exp_integral(h, un) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(residual_eq5(un, h) > 0.0);
    // u = -log int h solves the equation for constant h.
    const Field hc = Field::constant(t, 3.0);
    CHECK(residual_eq5(normalize_H1(Field::constant(t, 0.0), hc), hc) < 1e-12);
  }

  TEST_CASE("truncated bubble family matches closed forms") {
    const FlatTorus t = make_torus(1.0, 16);
    for (double R0 : {0.2, 0.5}) {
      for (double delta : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const auto exact = oracle::bubble_closed_form(delta, R0);
        for (double coeff : {16.0 * kPi, 17.0 * kPi}) {
          const BubbleFamilySample s = truncated_bubble_sample(t, delta, R0, coeff);
          CHECK(s.dirichlet == doctest::Approx(exact.dirichlet).epsilon(1e-11));
          CHECK(s.mean == doctest::Approx(exact.mean).epsilon(1e-11));
          CHECK(s.log_exp_integral == doctest::Approx(std::log(exact.exp_integral) - exact.mean).epsilon(1e-11));
          CHECK(s.ratio == doctest::Approx(oracle::bubble_ratio(delta, R0, coeff)).epsilon(1e-10));
        }
      }
    }
    CHECK_THROWS_AS(truncated_bubble_sample(t, 1e-2, 0.6), InvalidArgument);
    CHECK_THROWS_AS(truncated_bubble_sample(t, 0.0, 0.3), InvalidArgument);
  }

  TEST_CASE("grid bubble agrees with the radial evaluation") {
    const FlatTorus t = make_torus(1.0, 256);
    const double delta = 0.15, R0 = 0.45;
    const Field u = truncated_bubble_field(t, delta, R0, Point{0.5, 0.5});
    const auto exact = oracle::bubble_closed_form(delta, R0);
    CHECK(integrate(u) == doctest::Approx(exact.mean).epsilon(1e-4));
    CHECK(integrate(u.map([](double x) { return std::exp(x); })) == doctest::Approx(exact.exp_integral).epsilon(1e-4));
  }

  TEST_CASE("Moser-Trudinger ratio of smooth fields") {
    const FlatTorus t = make_torus(1.0, 32);
    CHECK(mt_ratio(Field::constant(t, 5.0)) == doctest::Approx(1.0));
    const Field u = random_smooth_field(t, 2, 1.0);
    const double m = integrate(u);
    const double expected = integrate(u.map([m](double x) { return std::exp(x - m); })) *
                            std::exp(-dirichlet_energy(u) / (16.0 * kPi));
    CHECK(mt_ratio(u) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(mt_ratio(u, 17.0 * kPi) > mt_ratio(u));
  }

  TEST_CASE("local data at the maximum of h") {
    const FlatTorus t = make_torus(1.0, 64);
    const Field h = Field::from_function(t, [](double x, double) { return 1.0 + 0.2 * std::cos(kTwoPi * x); });
    const HLocalData hd = h_local_data(h);
    CHECK(hd.p0 == Point{0.0, 0.0});
    CHECK(hd.h_p0 == doctest::Approx(1.2));
    CHECK(std::abs(hd.k1) < 1e-12);
    CHECK(std::abs(hd.k2) < 1e-12);
    CHECK(hd.lap_h == doctest::Approx(-0.2 * 4.0 * kPi * kPi).epsilon(1e-10));
    CHECK(hd.tie);
    const Field bump = Field::from_function(t, [](double x, double y) {
      return 1.0 + 0.1 * (std::cos(kTwoPi * x) + std::cos(kTwoPi * y));
    });
    CHECK_FALSE(h_local_data(bump).tie);
  }

  TEST_CASE("existence conditions") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field one = Field::constant(t, 1.0);
    for (double v : {1.0, 2.0, 3.0, 5.0}) {
      const ConditionResult c = check_thm31(one, a_v(v));
      CHECK(c.margin == doctest::Approx(0.5 * (reference_A0() - a_v(v))).epsilon(1e-13));
      CHECK(c.holds == (v < 2.2262765685));
    }
    CHECK(std::abs(check_thm31(one, a_v(find_v_star().v_star)).margin) < 1e-9);
    // Scaling h leaves the condition unchanged.
    CHECK(check_thm31(one * 7.0, a_v(1.0)).margin == doctest::Approx(check_thm31(one, a_v(1.0)).margin));

    GreenExpansion flat;
    const HLocalData hd1 = h_local_data(one);
    const ConditionResult c12 = check_thm12(hd1, flat, 0.0);
    CHECK(c12.holds);
    CHECK(c12.margin == doctest::Approx(kEightPi));
    const Field h = Field::from_function(t, [](double x, double) { return 1.0 + 0.2 * std::cos(kTwoPi * x); });
    const HLocalData hd = h_local_data(h);
    CHECK(check_thm12(hd, flat, 0.0).margin == doctest::Approx(hd.lap_h + kEightPi * 1.2));
    CHECK(check_log_condition(hd, 0.0).margin == doctest::Approx(hd.lap_h / 1.2 + kEightPi));
    // A sharp peak violates the local condition.
    const Field sharp = Field::from_function(t, [](double x, double) { return 1.1 + std::cos(2.0 * kTwoPi * x); });
    CHECK_FALSE(check_thm12(h_local_data(sharp), flat, 0.0).holds);
  }

  TEST_CASE("blow-up energy level") {
    const double A = a_v(1.0);
    CHECK(blowup_energy_level(A, 1.0) == doctest::Approx(-kEightPi - kEightPi * std::log(kPi) - 4.0 * kPi * A));
    CHECK(blowup_energy_level(A, 1.0) == doctest::Approx(11.971628570747).epsilon(1e-11));
    CHECK_THROWS_AS(blowup_energy_level(A, 0.0), InvalidArgument);
  }
}
