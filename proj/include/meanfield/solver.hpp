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

// Minimization of J_eps over mean-zero fields by preconditioned descent.
//
// Search directions are -(1 - Laplacian)^{-1} grad, i.e. steepest descent in
// the H^1 inner product.  Iterates are projected to mean zero after every step
// and the result is shifted into {int h e^u = 1} at the end.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meanfield/error.hpp"
#include "meanfield/functional.hpp"
#include "meanfield/torus.hpp"

namespace meanfield {

enum class StepRule { fixed, backtracking, bb };

enum class InitKind { zero, random, warm };

struct SolverConfig {
  double eps = 0.0;
  int max_iters = 5000;
  /// Sup norm of the Euler-Lagrange residual that counts as converged.
  double grad_tol = 1e-8;
  StepRule step_rule = StepRule::backtracking;
  /// Fixed step, or the first trial step of a line search.
  double step = 1.0;
  InitKind init = InitKind::zero;
  std::uint64_t seed = 0;
  /// Sup norm of the random initial field.
  double amplitude = 0.1;
  std::optional<Field> warm;
};

struct SolveResult {
  /// Minimizer, normalized so that int h e^u = 1.
  Field u;
  EnergyBreakdown energy;
  double residual = 0.0;
  int iters = 0;
  double peak_value = 0.0;
  Point peak_point;
  /// e^{peak_value / 2}.
  double peak_scale = 1.0;
  bool converged = false;
  /// Energy after each accepted step, starting with the initial iterate.
  std::vector<double> energy_history;
  /// Largest |mean(u)| seen across iterates, after projection.
  double max_mean_drift = 0.0;
  /// Empty when converged; otherwise why the iteration stopped.
  std::string stop_reason;
};

/// Thrown when an iterate stops being finite.  Carries the last finite iterate.
class SolverDiverged : public NumericalError {
 public:
  SolverDiverged(const std::string& what, Field last_finite, int iteration)
      : NumericalError(what), last_finite_(std::move(last_finite)), iteration_(iteration) {}

  [[nodiscard]] const Field& last_finite() const { return last_finite_; }
  [[nodiscard]] int iteration() const { return iteration_; }

 private:
  Field last_finite_;
  int iteration_;
};

/// Smooth random mean-zero field from low Fourier modes, scaled to the given sup norm.
Field random_smooth_field(const FlatTorus& torus, std::uint64_t seed, double amplitude);

SolveResult minimize(const Field& h, const SolverConfig& cfg);

/// Warm-started minimizations along a strictly decreasing schedule of positive
/// eps values, optionally ending at 0.  cfg.eps is ignored.
std::vector<SolveResult> continuation(const Field& h, const std::vector<double>& eps_schedule,
                                      const SolverConfig& cfg);

/// J_eps(0) - J_eps(u) with J_eps(0) = -(8 pi - eps) log int h.
double energy_gap_vs_zero(const Field& h, const SolveResult& result);

}  // namespace meanfield
