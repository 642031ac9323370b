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

#include "meanfield/green.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "meanfield/error.hpp"

namespace meanfield {

namespace {

using Complex = std::complex<double>;

void require_modulus(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("modulus must be positive");
}

// z reduced to x in [-1/2, 1/2], y in [0, v/2], so that 0 is the nearest
// lattice point.  G is even and periodic, so the fold z -> iv - z is free; the
// gradient changes sign under it.
struct Reduced {
  double x;
  double y;
  bool flipped;
};

Reduced reduce(Complex z, double v) {
  double x = z.real() - std::floor(z.real());
  double y = z.imag() - v * std::floor(z.imag() / v);
  if (y >= v) y -= v;
  bool flipped = false;
  if (y > 0.5 * v) {
    x = -x;
    y = v - y;
    flipped = true;
  }
  x -= std::nearbyint(x);
  return {x, y, flipped};
}

// log |1 - a|, accurate for small |a|.
double log_abs_one_minus(Complex a) {
  return 0.5 * std::log1p(std::norm(a) - 2.0 * a.real());
}

// log |(1 - e^w) / z| with w = 2 pi i z; the series branch keeps the ratio
// accurate as z -> 0.
double log_abs_ratio(Complex z) {
  const Complex w = Complex(0.0, kTwoPi) * z;
  if (std::abs(w) < 0.25) {
    // (1 - e^w) / z = -2 pi i sum_k w^k / (k+1)!
    Complex term = 1.0;
    Complex sum = 1.0;
    for (int k = 1; k < 20; ++k) {
      term *= w / static_cast<double>(k + 1);
      sum += term;
    }
    return std::log(kTwoPi) + std::log(std::abs(sum));
  }
  return log_abs_one_minus(std::exp(w)) - std::log(std::abs(z));
}

// Euclidean regular part G + 4 log|z| at a reduced point.
double euclidean_regular(const Reduced& r, double v, const QProductParams& qp) {
  const Complex z(r.x, r.y);
  const Complex qz = std::exp(Complex(0.0, kTwoPi) * z);
  const Complex inv_qz = std::exp(Complex(0.0, -kTwoPi) * z);
  double prod = 0.0;
  for (int n = 1; n <= qp.n_terms; ++n) {
    const double qn = std::exp(-kTwoPi * v * n);
    prod += log_abs_one_minus(qn * qz) + log_abs_one_minus(qn * inv_qz);
  }
  return 4.0 * kPi * v * bernoulli2(r.y / v) - 4.0 * log_abs_ratio(z) - 4.0 * prod;
}

}  // namespace

double bernoulli2(double y) { return y * y - y + 1.0 / 6.0; }

QProductParams QProductParams::choose(double v, double tol) {
  require_modulus(v);
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("truncation tolerance must lie in (0, 1)");
  QProductParams p;
  p.v = v;
  p.tol = tol;
  p.n_terms = static_cast<int>(std::ceil(std::log(1.0 / tol) / (kTwoPi * v))) + 2;
  return p;
}

double green_eval(Complex z, double v, double tol) {
  const auto qp = QProductParams::choose(v, tol);
  const Reduced r = reduce(z, v);
  const double rad = std::hypot(r.x, r.y);
  if (rad == 0.0) throw InvalidArgument("evaluation at source point");
  return euclidean_regular(r, v, qp) - 4.0 * std::log(rad);
}

double green_regular(Complex z, double v, double tol) {
  const auto qp = QProductParams::choose(v, tol);
  const Reduced r = reduce(z, v);
  // G + 4 log(|z| / sqrt(v)) = (G + 4 log|z|) - 2 log v.
  return euclidean_regular(r, v, qp) - 2.0 * std::log(v);
}

Vec2 green_gradient(Complex z, double v, double tol) {
  const auto qp = QProductParams::choose(v, tol);
  const Reduced r = reduce(z, v);
  if (r.x == 0.0 && r.y == 0.0) throw InvalidArgument("gradient evaluation at source point");
  const Complex zr(r.x, r.y);
  const Complex i2pi(0.0, kTwoPi);
  const Complex qz = std::exp(i2pi * zr);
  const Complex inv_qz = std::exp(-i2pi * zr);
  // Derivative of log[(1 - q_z) prod (1 - q^n q_z)(1 - q^n / q_z)].
  Complex dlog = -i2pi * qz / (1.0 - qz);
  for (int n = 1; n <= qp.n_terms; ++n) {
    const double qn = std::exp(-kTwoPi * v * n);
    dlog += -i2pi * qn * qz / (1.0 - qn * qz);
    dlog += i2pi * qn * inv_qz / (1.0 - qn * inv_qz);
  }
  Vec2 g{-4.0 * dlog.real(), 4.0 * kPi * (2.0 * r.y / v - 1.0) + 4.0 * dlog.imag()};
  if (r.flipped) g = {-g.x, -g.y};
  return g;
}

Vec2 green_regular_gradient(Complex z, double v, double tol) {
  const auto qp = QProductParams::choose(v, tol);
  const Reduced r = reduce(z, v);
  const Complex zr(r.x, r.y);
  const Complex i2pi(0.0, kTwoPi);
  const Complex w = i2pi * zr;
  const Complex qz = std::exp(w);
  const Complex inv_qz = std::exp(-w);
  // d/dz log((1 - e^w) / z) = -2 pi i [e^w / (1 - e^w) + 1 / w].
  Complex bracket;
  if (std::abs(w) < 0.25) {
    // e^w / (1 - e^w) + 1/w = -1/2 - sum_{n>=1} B_{2n} w^{2n-1} / (2n)!
    const Complex w2 = w * w;
    bracket = -0.5 - w * (1.0 / 12.0 +
                          w2 * (-1.0 / 720.0 +
                                w2 * (1.0 / 30240.0 +
                                      w2 * (-1.0 / 1209600.0 + w2 * (1.0 / 47900160.0)))));
  } else {
    bracket = qz / (1.0 - qz) + 1.0 / w;
  }
  Complex dlog = -i2pi * bracket;
  for (int n = 1; n <= qp.n_terms; ++n) {
    const double qn = std::exp(-kTwoPi * v * n);
    dlog += -i2pi * qn * qz / (1.0 - qn * qz);
    dlog += i2pi * qn * inv_qz / (1.0 - qn * inv_qz);
  }
  Vec2 g{-4.0 * dlog.real(), 4.0 * kPi * (2.0 * r.y / v - 1.0) + 4.0 * dlog.imag()};
  if (r.flipped) g = {-g.x, -g.y};
  return g;
}

double a_v(double v, double tol) {
  const auto qp = QProductParams::choose(v, tol);
  double sum = 0.0;
  for (int n = 1; n <= qp.n_terms; ++n) sum += std::log1p(-std::exp(-kTwoPi * v * n));
  return -2.0 * std::log(v) - 4.0 * std::log(kTwoPi) + kTwoPi * v / 3.0 - 8.0 * sum;
}

double reference_A0() { return -2.0 - 2.0 * std::log(kPi); }

VStarResult find_v_star(double v_lo, double v_hi, double tol) {
  if (!(v_lo > 0.0) || !(v_hi > v_lo)) throw InvalidArgument("bracket must satisfy 0 < v_lo < v_hi");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const double a0 = reference_A0();
  auto f = [a0](double v) { return a_v(v) - a0; };
  double f_lo = f(v_lo);
  const double f_hi = f(v_hi);
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    std::ostringstream msg;
    msg << "no sign change of A_v - A_0 in bracket [" << v_lo << ", " << v_hi << "]";
    throw InvalidArgument(msg.str());
  }
  VStarResult res;
  double lo = v_lo;
  double hi = v_hi;
  for (int it = 1; it <= 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    res = {mid, fm + a0, it};
    if (std::abs(fm) < tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) {
      return res;
    }
    if (std::signbit(fm) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return res;
}

GreenField green_field(const FlatTorus& torus, Point p, double tol) {
  const double v = torus.modulus();
  const auto qp = QProductParams::choose(v, tol);
  std::vector<double> values(torus.size());
  std::optional<std::size_t> singular;
  const double A = a_v(v);
  for (int i = 0; i < torus.nx(); ++i) {
    for (int j = 0; j < torus.ny(); ++j) {
      const Vec2 d = torus.displacement(p, torus.node(i, j));
      const std::size_t k = torus.index(i, j);
      const double rad = std::hypot(d.x, d.y);
      if (rad < 1e-12 * torus.hx()) {
        singular = k;
        values[k] = A;
        continue;
      }
      const Reduced r = reduce(Complex(d.x, d.y), v);
      values[k] = euclidean_regular(r, v, qp) - 4.0 * std::log(std::hypot(r.x, r.y));
    }
  }
  return {Field(torus, std::move(values)), p, singular, A};
}

SmoothBump green_subtraction_bump(const FlatTorus& torus) {
  const double R = torus.injectivity_radius();
  return SmoothBump(0.3 * R, 0.9 * R);
}

namespace {

// Second-order Taylor data of a smooth field at p, in normal coordinates.
struct LocalJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;
};

LocalJet local_jet(const Field& f, const GreenField& g) {
  const auto [f1, f2] = normal_gradient(f);
  const auto [f11, f12] = normal_gradient(f1);
  const auto [f21, f22] = normal_gradient(f2);
  if (g.singular_node) {
    const std::size_t k = *g.singular_node;
    return {f.values()[k],    f1.values()[k], f2.values()[k], f11.values()[k],
            0.5 * (f12.values()[k] + f21.values()[k]), f22.values()[k]};
  }
  auto at = [&g](const Field& h) { return SpectralInterpolant(h)(g.p); };
  return {at(f), at(f1), at(f2), at(f11), 0.5 * (at(f12) + at(f21)), at(f22)};
}

// Integral of (-4 log r) r^2 chi(r) over the plane.
double log_second_moment(const SmoothBump& bump) {
  const double a = bump.inner();
  const double a4 = a * a * a * a;
  const double core = -8.0 * kPi * (0.25 * a4 * std::log(a) - a4 / 16.0);
  const auto shell = integrate_adaptive(
      [&bump](double r) { return -8.0 * kPi * r * r * r * std::log(r) * bump(r); }, bump.inner(),
      bump.outer(), 1e-14, 1e-16);
  return core + shell.value;
}

// Grid mean of G w - T S, where S = -4 log r chi(r) and T is the Taylor
// polynomial of w at p (T = 1 when w is absent).  G w - T S is C^2 at p, so
// the trapezoid sum converges quickly even when p is off the grid.
double subtracted_mean(const GreenField& g, const Field* weight, const LocalJet& jet,
                       const SmoothBump& bump) {
  const FlatTorus& torus = g.values.torus();
  const auto G = g.values.values();
  const double s = torus.normal_scale();
  double sum = 0.0;
  for (int i = 0; i < torus.nx(); ++i) {
    for (int j = 0; j < torus.ny(); ++j) {
      const std::size_t k = torus.index(i, j);
      const double w = weight ? weight->values()[k] : 1.0;
      if (g.singular_node && *g.singular_node == k) {
        sum += g.regular_value * w;
        continue;
      }
      const Vec2 d = torus.displacement(g.p, torus.node(i, j));
      const double x1 = d.x / s;
      const double x2 = d.y / s;
      const double r = std::hypot(x1, x2);
      double sub = 0.0;
      if (r < bump.outer()) {
        const double taylor = jet.value + jet.d1 * x1 + jet.d2 * x2 +
                              0.5 * (jet.h11 * x1 * x1 + 2.0 * jet.h12 * x1 * x2 + jet.h22 * x2 * x2);
        sub = taylor * (-4.0 * std::log(r) * bump(r));
      }
      sum += G[k] * w - sub;
    }
  }
  return sum / static_cast<double>(torus.size());
}

}  // namespace

double integrate_green(const GreenField& g) {
  const SmoothBump bump = green_subtraction_bump(g.values.torus());
  return subtracted_mean(g, nullptr, LocalJet{1.0}, bump) + bump.log_integral();
}

double integrate_green_product(const GreenField& g, const Field& f) {
  require_same_grid(g.values, f);
  const SmoothBump bump = green_subtraction_bump(f.torus());
  const LocalJet jet = local_jet(f, g);
  // Odd Taylor terms integrate to zero against the radial S; x1^2 and x2^2
  // each pick up half the second moment.
  const double add_back =
      jet.value * bump.log_integral() + 0.25 * (jet.h11 + jet.h22) * log_second_moment(bump);
  return subtracted_mean(g, &f, jet, bump) + add_back;
}

double weak_laplace_residual(const GreenField& g, const Field& phi) {
  require_same_grid(g.values, phi);
  const double phi_p =
      g.singular_node ? phi.values()[*g.singular_node] : SpectralInterpolant(phi)(g.p);
  return integrate_green_product(g, laplacian(phi)) - kEightPi * integrate(phi) + kEightPi * phi_p;
}

Annulus default_fit_annulus(const FlatTorus& torus) {
  return {4.0 * torus.normal_spacing(), 0.1 * std::min(1.0, torus.modulus())};
}

GreenExpansion extract_expansion(const Field& g, Point p, const ExpansionFitOptions& options) {
  const FlatTorus& torus = g.torus();
  const Annulus ann = options.annulus.value_or(default_fit_annulus(torus));
  if (!(ann.r_min > 0.0) || !(ann.r_max > ann.r_min)) {
    throw InvalidArgument("fit annulus must satisfy 0 < r_min < r_max");
  }
  if (ann.r_max >= torus.injectivity_radius()) {
    throw InvalidArgument("fit annulus must lie inside the injectivity radius");
  }
  const double s = torus.normal_scale();
  std::vector<double> x1s, x2s, ys;
  for (int i = 0; i < torus.nx(); ++i) {
    for (int j = 0; j < torus.ny(); ++j) {
      const Vec2 d = torus.displacement(p, torus.node(i, j));
      const double x1 = d.x / s;
      const double x2 = d.y / s;
      const double r = std::hypot(x1, x2);
      if (r < ann.r_min || r > ann.r_max) continue;
      x1s.push_back(x1);
      x2s.push_back(x2);
      ys.push_back(g.at(i, j) + 4.0 * std::log(r));
    }
  }
  const std::size_t m = ys.size();
  if (m < options.min_samples) {
    std::ostringstream msg;
    msg << "fit annulus holds " << m << " grid nodes, need at least " << options.min_samples;
    throw InvalidArgument(msg.str());
  }
  const int cols = options.cubic_terms ? 10 : 6;
  // Regress in x / r_max so the columns have comparable scale.
  const double L = ann.r_max;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(m), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const double a = x1s[k] / L;
    const double b = x2s[k] / L;
    const auto row = static_cast<Eigen::Index>(k);
    X(row, 0) = 1.0;
    X(row, 1) = a;
    X(row, 2) = b;
    X(row, 3) = a * a;
    X(row, 4) = a * b;
    X(row, 5) = b * b;
    if (options.cubic_terms) {
      X(row, 6) = a * a * a;
      X(row, 7) = a * a * b;
      X(row, 8) = a * b * b;
      X(row, 9) = b * b * b;
    }
    y(row) = ys[k];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                               : std::numeric_limits<double>::infinity();
  if (!(cond <= options.max_condition)) {
    std::ostringstream msg;
    msg << "expansion fit is ill-conditioned (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::VectorXd beta = svd.solve(y);
  const Eigen::VectorXd resid = X * beta - y;

  GreenExpansion e;
  e.p = p;
  e.A = beta(0);
  e.b1 = beta(1) / L;
  e.b2 = beta(2) / L;
  e.c1 = beta(3) / (L * L);
  e.c2 = 0.5 * beta(4) / (L * L);
  e.c3 = beta(5) / (L * L);
  e.fit_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  e.condition = cond;
  e.samples = m;
  return e;
}

double prop33_check(const GreenExpansion& e, double K) {
  return e.c1 + e.c3 + 2.0 * K / 3.0 - 4.0 * kPi;
}

}  // namespace meanfield
