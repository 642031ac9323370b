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

// Concentrating test functions and their energy.
//
// In geodesic normal coordinates at p, with rho = alpha sqrt(eps),
// C = -2 log((alpha^2 + 1) / alpha^2) - A and beta = G + 4 log r - A,
//
//   phi = -2 log(r^2 + eps) + log eps                 r <= rho
//       = G - eta beta + C + log eps                  rho <= r <= 2 rho
//       = G + C + log eps                             r >= 2 rho
//
// where eta falls from 1 to 0 across [rho, 2 rho] as a quintic smoothstep in
// log r.  On a flat torus the linear coefficients of G vanish, so the inner
// piece carries no linear correction.
//
// J(phi) is assembled from radial closed forms, Green's identities and polar
// quadrature near p, plus one grid quadrature of a smooth far-field integrand.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "meanfield/functional.hpp"
#include "meanfield/green.hpp"
#include "meanfield/torus.hpp"

namespace meanfield {

/// alpha with alpha^4 eps = 1 / log(-log eps).  Requires 0 < eps < 1/e.
double default_alpha(double eps);

struct TestFunctionSpec {
  Point p;
  double eps = 1e-6;
  /// Gluing scale; default_alpha(eps) when empty.
  std::optional<double> alpha;
};

/// Resolved constants of a test function.
struct TestFunctionShape {
  double eps = 0.0;
  double alpha = 0.0;
  double rho = 0.0;  // alpha sqrt(eps), geodesic units
  double A = 0.0;
  double C = 0.0;
};

TestFunctionShape resolve_shape(const TestFunctionSpec& spec, double v);

/// Quintic smoothstep cutoff: 1 for r <= rho, 0 for r >= 2 rho.
double gluing_cutoff(double r, double rho);

/// phi at a point of the torus.
double test_function_value(const FlatTorus& torus, const TestFunctionSpec& spec, Point x);

/// phi sampled on the grid.  Throws InvalidArgument when rho is below two grid
/// spacings; use eval_J_testfunction, which does not sample phi on the grid.
Field build_test_function(const FlatTorus& torus, const TestFunctionSpec& spec);

/// The separately computed pieces of J(phi).
struct TestFunctionTerms {
  double dirichlet_inner = 0.0;   // int_{B_rho} |grad phi|^2, closed form
  double dirichlet_green = 0.0;   // int_{M \ B_rho} |grad G|^2, by Green's identity
  double dirichlet_gluing = 0.0;  // correction from eta beta on the gluing annulus
  double mean = 0.0;              // int phi
  double exp_integral = 0.0;      // int h e^phi
  double log_exp_integral = 0.0;  // log of the previous, computed without overflow
};

struct BlowupOptions {
  /// Angular nodes of the polar quadratures.
  int angular_nodes = 64;
  /// Relative tolerance of each radial quadrature.
  double rel_tol = 1e-12;
};

/// Evaluator for J(phi) at a fixed (h, p) and varying eps.  The eps-independent
/// far-field grid integral is computed once at construction.
class BlowupLab {
 public:
  BlowupLab(const Field& h, Point p, BlowupOptions options = {});

  [[nodiscard]] const FlatTorus& torus() const { return h_.torus(); }
  [[nodiscard]] Point point() const { return p_; }
  [[nodiscard]] double A() const { return A_; }
  [[nodiscard]] double h_at_p() const { return h_p_; }

  [[nodiscard]] TestFunctionTerms terms(double eps, std::optional<double> alpha = {}) const;
  /// J(phi) as dirichlet_half + 8 pi int phi - 8 pi log int h e^phi; eps = 0.
  [[nodiscard]] EnergyBreakdown energy(double eps, std::optional<double> alpha = {}) const;

  /// -8 pi - 8 pi log pi - 4 pi A - 8 pi log h(p).
  [[nodiscard]] double limit_constant() const;

 private:
  Field h_;
  Point p_;
  BlowupOptions options_;
  double A_;
  double h_p_;
  SpectralInterpolant h_interp_;
  double split_inner_;
  double split_outer_;
  double far_grid_;  // grid integral of h e^G (1 - chi)

  [[nodiscard]] double h_polar(double r, double theta) const;
};

EnergyBreakdown eval_J_testfunction(const TestFunctionSpec& spec, const Field& h,
                                    BlowupOptions options = {});

struct BlowupSample {
  double eps = 0.0;
  double J = 0.0;
  double regressor = 0.0;  // eps (-log eps)
  double alpha = 0.0;
};

/// n log-spaced values from eps_max down to eps_min.
std::vector<double> log_spaced(double eps_min, double eps_max, int n);

/// J(phi) along an eps list, evaluated in parallel.
std::vector<BlowupSample> sweep(const BlowupLab& lab, const std::vector<double>& eps);

struct AsymptoteFit {
  double constant = 0.0;
  /// Coefficient of eps (-log eps).
  double slope = 0.0;
  /// Coefficient of eps when the extended model is fitted, else 0.
  double eps_coefficient = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  /// Root-mean-square residual.
  double residual = 0.0;
  double condition = 0.0;
  int samples = 0;
};

/// Least squares of J against [1, eps (-log eps)] (plus eps when include_eps).
/// Needs at least 5 samples with distinct eps in (0, 1/e).
AsymptoteFit fit_asymptote(const std::vector<BlowupSample>& samples, bool include_eps = false);

/// The planar bubble -2 log(1 + pi h_p |x|^2).
double bubble_profile(Point x, double h_p);

/// sup over |x| <= radius of |u(x_peak + x / lambda*) - lambda - bubble(x)|,
/// lambda* = e^{lambda / 2}, with x in normal coordinates.  u is given on the
/// torus in Euclidean coordinates.
double profile_deviation(const std::function<double(Point)>& u, const FlatTorus& torus,
                         double peak_value, Point peak_point, double h_p, double radius);
/// Same for a grid field, through its spectral interpolant.
double profile_deviation(const Field& u, double peak_value, Point peak_point, double h_p,
                         double radius);

/// sup over nodes at geodesic distance >= exclusion_radius from the source of
/// |(u - Q[u]) - (G - Q[G])|, with Q the grid quadrature.
double green_deviation(const Field& u, const GreenField& g, double exclusion_radius);

}  // namespace meanfield
