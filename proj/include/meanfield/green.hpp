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

// Green function of the unit-area flat torus,
//
//   Laplacian G = 8 pi - 8 pi delta_p,   integral of G = 0,
//
// in closed form through the q-product (q = e^{-2 pi v}, q_z = e^{2 pi i z})
//
//   G(z) = -4 log | q^{B2(y/v)/2} (1 - q_z) prod_n (1 - q^n q_z)(1 - q^n / q_z) |,
//
// valid for 0 <= y <= v.  Near the source G = -4 log r + A_v + O(r^2) where r
// is the geodesic distance |z| / sqrt(v), and A_v does not depend on p.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "meanfield/quadrature.hpp"
#include "meanfield/torus.hpp"

namespace meanfield {

/// Second Bernoulli polynomial y^2 - y + 1/6.
double bernoulli2(double y);

/// Truncation of the infinite q-products.
struct QProductParams {
  double v = 1.0;
  int n_terms = 1;
  double tol = 1e-14;

  /// n_terms = ceil(log(1/tol) / (2 pi v)) + 2, so the dropped factors are below tol.
  static QProductParams choose(double v, double tol);
};

/// G(z, 0) on the torus of modulus v.  z is reduced modulo the lattice first.
/// Throws InvalidArgument at (a lattice translate of) the source point.
double green_eval(std::complex<double> z, double v, double tol = 1e-14);

/// G(z, 0) + 4 log r with r the geodesic distance from z to the nearest
/// lattice point.  Finite at the source, where it equals A_v.
double green_regular(std::complex<double> z, double v, double tol = 1e-14);

/// Euclidean gradient (d_x G, d_y G) at z.
Vec2 green_gradient(std::complex<double> z, double v, double tol = 1e-14);

/// Euclidean gradient of the regular part G + 4 log|z|, evaluated without the
/// cancellation that subtracting -4 z / |z|^2 from green_gradient would incur.
Vec2 green_regular_gradient(std::complex<double> z, double v, double tol = 1e-14);

/// The base-point independent constant A_v of the local expansion.
double a_v(double v, double tol = 1e-15);

/// A_0 = -2 - 2 log(pi), the value of A on the round sphere of unit area.
double reference_A0();

struct VStarResult {
  double v_star = 0.0;
  double a_v_star = 0.0;
  int iterations = 0;
};

/// Bisection for the unique v* in [v_lo, v_hi] with A_v* = A_0, stopping once
/// |A_v - A_0| < tol.  Throws InvalidArgument when the bracket has no sign change.
VStarResult find_v_star(double v_lo = 1.0, double v_hi = 10.0, double tol = 1e-10);

/// G(., p) sampled on a grid.  When p is a grid node that node holds the
/// regularized value A_v (the limit of G + 4 log r) and is flagged.
struct GreenField {
  Field values;
  Point p;
  std::optional<std::size_t> singular_node;
  double regular_value = 0.0;
};

GreenField green_field(const FlatTorus& torus, Point p, double tol = 1e-14);

/// Cutoff used for singularity subtraction, in geodesic units:
/// flat on 0.3 and vanishing beyond 0.9 injectivity radii.
SmoothBump green_subtraction_bump(const FlatTorus& torus);

/// Integral of G with the -4 log r singularity subtracted on the grid and its
/// cutoff-localized integral added back in closed form.
double integrate_green(const GreenField& g);

/// Integral of G f for a smooth field f.  The second-order Taylor polynomial of
/// f at p times (-4 log r) chi is subtracted on the grid and added back exactly.
double integrate_green_product(const GreenField& g, const Field& f);

/// Weak form of Laplacian G = 8 pi - 8 pi delta_p tested against phi:
/// integral(G Laplacian(phi)) - 8 pi integral(phi) + 8 pi phi(p).
double weak_laplace_residual(const GreenField& g, const Field& phi);

/// Coefficients of G = -4 log r + A + b1 x1 + b2 x2 + c1 x1^2 + 2 c2 x1 x2
/// + c3 x2^2 + O(r^3) in normal coordinates at p.
struct GreenExpansion {
  Point p;
  double A = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double fit_residual = 0.0;
  double condition = 0.0;
  std::size_t samples = 0;
};

/// Geodesic radii [r_min, r_max] of the fitting annulus.
struct Annulus {
  double r_min = 0.0;
  double r_max = 0.0;
};

/// [4 h, 0.1 min(1, v)] with h the grid spacing in geodesic units.
Annulus default_fit_annulus(const FlatTorus& torus);

struct ExpansionFitOptions {
  std::optional<Annulus> annulus;
  /// Add x1^3, x1^2 x2, x1 x2^2, x2^3 to the regression basis.
  bool cubic_terms = false;
  std::size_t min_samples = 200;
  double max_condition = 1e10;
};

/// Least-squares fit of G + 4 log r over grid nodes in the annulus around p.
/// Throws InvalidArgument with too few samples and NumericalError when the
/// scaled design matrix is ill-conditioned.
GreenExpansion extract_expansion(const Field& g, Point p, const ExpansionFitOptions& options = {});

/// c1 + c3 + (2/3) K - 4 pi; vanishes for an exact expansion.
double prop33_check(const GreenExpansion& e, double K);

/// Independent evaluation of G by Fourier synthesis.  The -4 log r singularity,
/// localized by a smooth cutoff, is subtracted analytically; the smooth
/// remainder solves a Poisson problem with a smooth source and is summed mode by
/// mode on a modes x (v modes) grid.  Validation only: it is slow and accurate to
/// roughly 1e-8 at 256 modes.
class GreenFourierOracle {
 public:
  GreenFourierOracle(double v, int modes);

  [[nodiscard]] double operator()(std::complex<double> z) const;

 private:
  double v_;
  SmoothBump bump_;
  std::vector<double> kx_;
  std::vector<double> ky_;
  std::vector<std::complex<double>> coeffs_;
};

double green_fourier_oracle(std::complex<double> z, double v, int modes);

}  // namespace meanfield
