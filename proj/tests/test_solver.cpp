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

#include "doctest.h"
#include "meanfield/error.hpp"
#include "meanfield/solver.hpp"

using namespace meanfield;

namespace {

Field modulated(const FlatTorus& t) {
  return Field::from_function(t, [](double x, double) { return 1.0 + 0.2 * std::cos(kTwoPi * x); });
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("constant weight, eps = 1, random start") {
    const FlatTorus t = make_torus(1.0, 64);
    const Field h = Field::constant(t, 1.0);
    SolverConfig cfg;
    cfg.eps = 1.0;
    cfg.init = InitKind::random;
    cfg.seed = 42;
    cfg.amplitude = 1.0;
    const SolveResult r = minimize(h, cfg);
    CHECK(r.converged);
    CHECK(r.residual < 1e-8);
    CHECK(r.energy.total <= 1e-10);
    // The minimizer is the constant solving int h e^u = 1.
    CHECK(std::abs(r.u.max()) < 1e-8);
    CHECK(std::abs(r.u.min()) < 1e-8);
    CHECK(r.stop_reason.empty());
  }

  TEST_CASE("modulated weight at the critical parameter") {
    const FlatTorus t = make_torus(1.0, 64);
    const Field h = modulated(t);
    for (StepRule rule : {StepRule::backtracking, StepRule::bb}) {
      SolverConfig cfg;
      cfg.step_rule = rule;
      const SolveResult r = minimize(h, cfg);
      CHECK(r.converged);
      CHECK(r.residual < 1e-8);
      CHECK(r.energy.total < 0.0);
      CHECK(energy_gap_vs_zero(h, r) > 0.0);
      CHECK(exp_integral(h, r.u) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.peak_point == Point{0.0, 0.0});
      CHECK(r.peak_scale == doctest::Approx(std::exp(0.5 * r.peak_value)));
      CHECK(r.max_mean_drift < 1e-12);
      if (rule == StepRule::backtracking) {
        for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
          CHECK(r.energy_history[k] <= r.energy_history[k - 1] + 1e-12);
        }
      }
    }
  }

  TEST_CASE("warm restart from a minimizer takes no iterations") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field h = modulated(t);
    const SolveResult first = minimize(h, SolverConfig{});
    SolverConfig cfg;
    cfg.init = InitKind::warm;
    cfg.warm = first.u;
    const SolveResult again = minimize(h, cfg);
    CHECK(again.converged);
    CHECK(again.iters == 0);
    CHECK(again.energy.total == doctest::Approx(first.energy.total).epsilon(1e-12));
  }

  TEST_CASE("random starts are reproducible") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field a = random_smooth_field(t, 5, 0.3);
    const Field b = random_smooth_field(t, 5, 0.3);
    const Field c = random_smooth_field(t, 6, 0.3);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    CHECK(std::max(a.max(), -a.min()) == doctest::Approx(0.3));
    CHECK(std::abs(integrate(a)) < 1e-15);
  }

  TEST_CASE("iteration cap reports non-convergence") {
    const FlatTorus t = make_torus(1.0, 32);
    SolverConfig cfg;
    cfg.max_iters = 2;
    const SolveResult r = minimize(modulated(t), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iters == 2);
    CHECK(r.stop_reason == "max_iters reached");
  }

  TEST_CASE("invalid configurations") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field h = modulated(t);
    SolverConfig cfg;
    cfg.eps = -1.0;
    CHECK_THROWS_AS(minimize(h, cfg), InvalidArgument);
    cfg = SolverConfig{};
    cfg.grad_tol = 0.0;
    CHECK_THROWS_AS(minimize(h, cfg), InvalidArgument);
    cfg = SolverConfig{};
    cfg.init = InitKind::warm;
    CHECK_THROWS_AS(minimize(h, cfg), InvalidArgument);
    CHECK_THROWS_AS(minimize(Field::constant(t, 0.0), SolverConfig{}), InvalidArgument);
    CHECK_THROWS_AS(continuation(h, {}, SolverConfig{}), InvalidArgument);
    CHECK_THROWS_AS(continuation(h, {1.0, 2.0}, SolverConfig{}), InvalidArgument);
    CHECK_THROWS_AS(continuation(h, {1.0, 0.0, 0.0}, SolverConfig{}), InvalidArgument);
  }

  TEST_CASE("continuation down to eps = 0") {
    const FlatTorus t = make_torus(1.0, 32);
    const Field h = modulated(t);
    const auto results = continuation(h, {4.0, 1.0, 0.0}, SolverConfig{});
    REQUIRE(results.size() == 3);
    CHECK(results.back().energy.eps == 0.0);
    for (const SolveResult& r : results) CHECK(r.converged);
    const SolveResult direct = minimize(h, SolverConfig{});
    CHECK(results.back().energy.total == doctest::Approx(direct.energy.total).epsilon(1e-10));
  }

  TEST_CASE("divergence carries the last finite iterate") {
    const FlatTorus t = make_torus(1.0, 16);
    const SolverDiverged e("boom", Field::constant(t, 1.0), 7);
    CHECK(e.iteration() == 7);
    CHECK(e.last_finite().max() == 1.0);
    const NumericalError& base = e;
    CHECK(std::string(base.what()) == "boom");
  }
}
