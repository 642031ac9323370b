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

// The mean-field functional
//
//   J_eps(u) = 1/2 int |grad u|^2 + (8 pi - eps) int u - (8 pi - eps) log int h e^u,
//
// its gradient, the Euler-Lagrange residual of
//
//   Laplacian u = (8 pi - eps) - (8 pi - eps) h e^u,   int h e^u = 1,
//
// the Moser-Trudinger ratio, and the existence-condition checkers.

#pragma once

#include "meanfield/green.hpp"
#include "meanfield/torus.hpp"

namespace meanfield {

struct EnergyBreakdown {
  double dirichlet_half = 0.0;
  double linear = 0.0;
  double logterm = 0.0;
  double total = 0.0;
  double eps = 0.0;
};

/// J_eps(u); eps = 0 gives J.  Throws InvalidArgument unless h > 0.
EnergyBreakdown eval_J(const Field& u, const Field& h, double eps = 0.0);

/// L2 gradient -Laplacian u + c - c h e^u / int h e^u with c = 8 pi - eps.
Field l2_gradient(const Field& u, const Field& h, double eps = 0.0);

/// Sup norm of Laplacian u - c + c h e^u.  Requires |int h e^u - 1| < 1e-10.
double residual_eq5(const Field& u, const Field& h, double eps = 0.0);

/// u + c with c chosen so that int h e^{u+c} = 1.
Field normalize_H1(const Field& u, const Field& h);

inline constexpr double kMtCoefficient = 16.0 * kPi;

/// int e^{u - mean(u)} / exp(int |grad u|^2 / coeff).
double mt_ratio(const Field& u, double coeff = kMtCoefficient);

/// One member of the truncated-bubble family u(r) = -2 log(delta^2 + min(r, R0)^2),
/// evaluated by radial quadrature rather than on a grid.
struct BubbleFamilySample {
  double delta = 0.0;
  double dirichlet = 0.0;
  double mean = 0.0;
  double log_exp_integral = 0.0;  // log int e^{u - mean}
  double ratio = 0.0;
};

/// R0 is a geodesic radius and must not exceed the injectivity radius.
BubbleFamilySample truncated_bubble_sample(const FlatTorus& torus, double delta, double R0,
                                           double coeff = kMtCoefficient);

/// The same family sampled on the grid, centred at p.
Field truncated_bubble_field(const FlatTorus& torus, double delta, double R0, Point p);

/// Local data of h at its maximum p0, in normal coordinates.
struct HLocalData {
  Point p0;
  double h_p0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double lap_h = 0.0;
  /// Set when another node attains the maximum within 1e-10.
  bool tie = false;
};

/// Data at the first maximal node in row-major order.
HLocalData h_local_data(const Field& h);

struct ConditionResult {
  bool holds = false;
  double margin = 0.0;
};

/// log int h > (1 + log pi) + (A_max + 2 log max h) / 2.
ConditionResult check_thm31(const Field& h, double A_max);

/// Laplacian h + 2 (b1 k1 + b2 k2) + (8 pi + b1^2 + b2^2 - 2K) h > 0 at p0.
ConditionResult check_thm12(const HLocalData& hd, const GreenExpansion& expansion, double K);

/// Laplacian log h > -(8 pi - 2K) at p0, a sufficient form of the previous check.
ConditionResult check_log_condition(const HLocalData& hd, double K);

/// -8 pi - 8 pi log pi - 4 pi (A + 2 log h_max), the energy level of
/// concentrating sequences.
double blowup_energy_level(double A, double h_max);

}  // namespace meanfield
