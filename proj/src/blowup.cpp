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

#include "meanfield/blowup.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "meanfield/error.hpp"
#include "meanfield/parallel.hpp"
#include "meanfield/quadrature.hpp"

namespace meanfield {

namespace {

using Complex = std::complex<double>;

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep5_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = t * (1.0 - t);
  return 30.0 * s * s;
}

// d eta / dr.
double gluing_cutoff_derivative(double r, double rho) {
  const double t = std::log(r / rho) / std::log(2.0);
  return -smoothstep5_derivative(t) / (r * std::log(2.0));
}

// Euclidean offset of the normal-coordinate point (r cos th, r sin th).
Complex euclidean_offset(double r, double theta, double v) {
  return std::polar(std::sqrt(v) * r, theta);
}

}  // namespace

double default_alpha(double eps) {
  if (!(eps > 0.0) || !(eps < std::exp(-1.0))) {
    throw InvalidArgument("default alpha needs 0 < eps < 1/e");
  }
  return std::pow(eps * std::log(-std::log(eps)), -0.25);
}

TestFunctionShape resolve_shape(const TestFunctionSpec& spec, double v) {
  if (!(spec.eps > 0.0) || !(spec.eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  TestFunctionShape s;
  s.eps = spec.eps;
  s.alpha = spec.alpha ? *spec.alpha : default_alpha(spec.eps);
  if (!(s.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  s.rho = s.alpha * std::sqrt(spec.eps);
  s.A = a_v(v);
  const double a2 = s.alpha * s.alpha;
  s.C = -2.0 * std::log((a2 + 1.0) / a2) - s.A;
  return s;
}

double gluing_cutoff(double r, double rho) {
  if (r <= rho) return 1.0;
  if (r >= 2.0 * rho) return 0.0;
  return 1.0 - smoothstep5(std::log(r / rho) / std::log(2.0));
}

double test_function_value(const FlatTorus& torus, const TestFunctionSpec& spec, Point x) {
  const double v = torus.modulus();
  const TestFunctionShape s = resolve_shape(spec, v);
  if (2.0 * s.rho >= torus.injectivity_radius()) {
    throw InvalidArgument("gluing radius exceeds half the injectivity radius");
  }
  const Vec2 d = torus.displacement(spec.p, x);
  const double r = std::hypot(d.x, d.y) / std::sqrt(v);
  const double log_eps = std::log(s.eps);
  if (r <= s.rho) return -2.0 * std::log(r * r + s.eps) + log_eps;
  const double beta = green_regular(Complex(d.x, d.y), v) - s.A;
  const double eta = gluing_cutoff(r, s.rho);
  return -4.0 * std::log(r) + s.A + (1.0 - eta) * beta + s.C + log_eps;
}

Field build_test_function(const FlatTorus& torus, const TestFunctionSpec& spec) {
  const TestFunctionShape s = resolve_shape(spec, torus.modulus());
  if (s.rho < 2.0 * torus.normal_spacing()) {
    std::ostringstream msg;
    msg << "gluing radius " << s.rho << " is below two grid spacings (" << torus.normal_spacing()
        << "); evaluate J with eval_J_testfunction, which uses hybrid quadrature";
    throw InvalidArgument(msg.str());
  }
  return Field::from_function(torus, [&](double x, double y) {
    return test_function_value(torus, spec, Point{x, y});
  });
}

// ---------------------------------------------------------------------------

BlowupLab::BlowupLab(const Field& h, Point p, BlowupOptions options)
    : h_(h),
      p_(p),
      options_(options),
      A_(a_v(h.torus().modulus())),
      h_p_(0.0),
      h_interp_(h),
      split_inner_(0.5 * h.torus().injectivity_radius()),
      split_outer_(0.9 * h.torus().injectivity_radius()),
      far_grid_(0.0) {
  if (!(h.min() > 0.0)) throw InvalidArgument("h must be positive everywhere");
  if (options_.angular_nodes < 4) throw InvalidArgument("need at least 4 angular nodes");
  if (!(options_.rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  h_p_ = h_interp_(p_);
  const FlatTorus& t = h.torus();
  const GreenField g = green_field(t, p_);
  const SmoothBump chi(split_inner_, split_outer_);
  const auto G = g.values.values();
  const auto hv = h.values();
  double sum = 0.0;
  for (int i = 0; i < t.nx(); ++i) {
    for (int j = 0; j < t.ny(); ++j) {
      const double r = t.distance(p_, t.node(i, j));
      if (r <= split_inner_) continue;
      const std::size_t k = t.index(i, j);
      sum += hv[k] * std::exp(G[k]) * (1.0 - chi(r));
    }
  }
  far_grid_ = sum / static_cast<double>(t.size());
}

double BlowupLab::h_polar(double r, double theta) const {
  const Complex z = euclidean_offset(r, theta, torus().modulus());
  return h_interp_(Point{p_.x + z.real(), p_.y + z.imag()});
}

double BlowupLab::limit_constant() const {
  return -kEightPi - kEightPi * std::log(kPi) - 4.0 * kPi * A_ - kEightPi * std::log(h_p_);
}

TestFunctionTerms BlowupLab::terms(double eps, std::optional<double> alpha) const {
  const double v = torus().modulus();
  const TestFunctionShape s = resolve_shape(TestFunctionSpec{p_, eps, alpha}, v);
  if (2.0 * s.rho > split_inner_) {
    std::ostringstream msg;
    msg << "gluing radius " << s.rho << " too large for this torus (need 2 rho <= " << split_inner_
        << "); decrease eps or alpha";
    throw InvalidArgument(msg.str());
  }
  const double rho = s.rho;
  const double A = s.A;
  const double log_eps = std::log(eps);
  const double a2 = s.alpha * s.alpha;
  const int M = options_.angular_nodes;
  const double tol = options_.rel_tol;
  const double sqrt_v = std::sqrt(v);

  std::vector<double> cos_t(M), sin_t(M);
  for (int k = 0; k < M; ++k) {
    cos_t[k] = std::cos(kTwoPi * k / M);
    sin_t[k] = std::sin(kTwoPi * k / M);
  }
  auto offset = [&](double r, int k) { return Complex(sqrt_v * r * cos_t[k], sqrt_v * r * sin_t[k]); };
  auto beta_at = [&](double r, int k) { return green_regular(offset(r, k), v) - A; };
  // Angular mean of f(r, k) times 2 pi r: the radial density of a polar integral.
  auto ring = [&](double r, const std::function<double(double, int)>& f) {
    double sum = 0.0;
    for (int k = 0; k < M; ++k) sum += f(r, k);
    return kTwoPi * r * sum / M;
  };
  auto polar = [&](const std::function<double(double, int)>& f, double r0, double r1, bool log_r) {
    auto density = [&](double r) { return ring(r, f); };
    return log_r ? integrate_log_radius(density, r0, r1, tol, 0.0).value
                 : integrate_adaptive(density, r0, r1, tol, 0.0).value;
  };
  const bool h_const = h_.max() == h_.min();
  auto h_at = [&](double r, int k) {
    return h_const ? h_p_ : h_polar(r, std::atan2(sin_t[k], cos_t[k]));
  };

  TestFunctionTerms out;
  out.dirichlet_inner = 16.0 * kPi * (std::log1p(a2) - a2 / (1.0 + a2));

  // Green's identity on M \ B_rho, using int_M G = 0.
  double circle = 0.0;
  for (int k = 0; k < M; ++k) {
    const Complex z = offset(rho, k);
    const double beta = green_regular(z, v) - A;
    const Vec2 gb = green_regular_gradient(z, v);
    const double dr_beta = sqrt_v * (gb.x * cos_t[k] + gb.y * sin_t[k]);
    circle += (-4.0 * std::log(rho) + A + beta) * (-4.0 + rho * dr_beta);
  }
  circle *= kTwoPi / M;
  const double ball_beta = polar(beta_at, 0.0, rho, false);
  const double ball_G = -4.0 * kPi * rho * rho * std::log(rho) + 2.0 * kPi * rho * rho +
                        kPi * rho * rho * A + ball_beta;
  out.dirichlet_green = -circle + kEightPi * ball_G;

  // |grad(G - eta beta)|^2 - |grad G|^2 on the gluing annulus.
  out.dirichlet_gluing = polar(
      [&](double r, int k) {
        const Complex z = offset(r, k);
        const double beta = green_regular(z, v) - A;
        const Vec2 gb = green_regular_gradient(z, v);
        const double b1 = sqrt_v * gb.x;
        const double b2 = sqrt_v * gb.y;
        const double eta = gluing_cutoff(r, rho);
        const double deta = gluing_cutoff_derivative(r, rho);
        const double p1 = deta * beta * cos_t[k] + eta * b1;
        const double p2 = deta * beta * sin_t[k] + eta * b2;
        const double g1 = -4.0 * cos_t[k] / r + b1;
        const double g2 = -4.0 * sin_t[k] / r + b2;
        return -2.0 * (g1 * p1 + g2 * p2) + p1 * p1 + p2 * p2;
      },
      rho, 2.0 * rho, false);

  const double omega_mean =
      -kTwoPi * eps * ((a2 + 1.0) * std::log1p(a2) + a2 * log_eps - a2);
  const double eta_beta =
      polar([&](double r, int k) { return gluing_cutoff(r, rho) * beta_at(r, k); }, rho, 2.0 * rho,
            false);
  out.mean = s.C + log_eps + omega_mean - ball_G - s.C * kPi * rho * rho - eta_beta;

  // int h e^phi, piece by piece.
  const double root_eps = std::sqrt(eps);
  auto inner_density = [&](double r, int k) {
    const double q = r * r + eps;
    return h_at(r, k) * eps / (q * q);
  };
  double mass = polar(inner_density, 0.0, root_eps, false) +
                polar(inner_density, root_eps, rho, true);
  const double shift = log_eps + s.C;
  mass += polar(
      [&](double r, int k) {
        const double eta = gluing_cutoff(r, rho);
        const double expo = -4.0 * std::log(r) + A + (1.0 - eta) * beta_at(r, k);
        return h_at(r, k) * std::exp(shift + expo);
      },
      rho, 2.0 * rho, false);
  const SmoothBump chi(split_inner_, split_outer_);
  mass += polar(
      [&](double r, int k) {
        const double G = -4.0 * std::log(r) + A + beta_at(r, k);
        return h_at(r, k) * std::exp(shift + G) * chi(r);
      },
      2.0 * rho, split_outer_, true);
  mass += std::exp(shift) * far_grid_;
  out.exp_integral = mass;
  out.log_exp_integral = std::log(mass);
  return out;
}

EnergyBreakdown BlowupLab::energy(double eps, std::optional<double> alpha) const {
  const TestFunctionTerms t = terms(eps, alpha);
  EnergyBreakdown e;
  e.dirichlet_half = 0.5 * (t.dirichlet_inner + t.dirichlet_green + t.dirichlet_gluing);
  e.linear = kEightPi * t.mean;
  e.logterm = -kEightPi * t.log_exp_integral;
  e.total = e.dirichlet_half + e.linear + e.logterm;
  e.eps = 0.0;
  return e;
}

EnergyBreakdown eval_J_testfunction(const TestFunctionSpec& spec, const Field& h,
                                    BlowupOptions options) {
  return BlowupLab(h, spec.p, options).energy(spec.eps, spec.alpha);
}

std::vector<double> log_spaced(double eps_min, double eps_max, int n) {
  if (!(eps_min > 0.0) || !(eps_max > eps_min)) throw InvalidArgument("need 0 < eps_min < eps_max");
  if (n < 2) throw InvalidArgument("need at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(eps_max);
  const double b = std::log(eps_min);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = eps_max;
  out.back() = eps_min;
  return out;
}

std::vector<BlowupSample> sweep(const BlowupLab& lab, const std::vector<double>& eps) {
  return parallel_map(eps.size(), [&](std::size_t i) {
    const double e = eps[i];
    BlowupSample s;
    s.eps = e;
    s.alpha = default_alpha(e);
    s.J = lab.energy(e).total;
    s.regressor = e * -std::log(e);
    return s;
  });
}

AsymptoteFit fit_asymptote(const std::vector<BlowupSample>& samples, bool include_eps) {
  if (samples.size() < 5) throw InvalidArgument("asymptote fit needs at least 5 samples");
  std::vector<double> eps;
  for (const auto& s : samples) {
    if (!(s.eps > 0.0) || !(s.eps < std::exp(-1.0))) {
      throw InvalidArgument("sample eps must lie in (0, 1/e)");
    }
    eps.push_back(s.eps);
  }
  std::sort(eps.begin(), eps.end());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) {
    throw InvalidArgument("sample eps values must be distinct");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(samples.size());
  const int cols = include_eps ? 3 : 2;
  double xmax = 0.0;
  const double emax = eps.back();
  for (const auto& s : samples) xmax = std::max(xmax, s.eps * -std::log(s.eps));
  Eigen::MatrixXd X(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = s.eps * -std::log(s.eps) / xmax;
    if (include_eps) X(i, 2) = s.eps / emax;
    y(i) = s.J;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                               : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "asymptote regression is ill-conditioned (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::VectorXd c = svd.solve(y);
  AsymptoteFit fit;
  fit.constant = c(0);
  fit.slope = c(1) / xmax;
  fit.eps_coefficient = include_eps ? c(2) / emax : 0.0;
  fit.eps_min = eps.front();
  fit.eps_max = eps.back();
  fit.residual = std::sqrt((X * c - y).squaredNorm() / static_cast<double>(m));
  fit.condition = cond;
  fit.samples = static_cast<int>(m);
  return fit;
}

double bubble_profile(Point x, double h_p) {
  if (!(h_p > 0.0)) throw InvalidArgument("h_p must be positive");
  return -2.0 * std::log1p(kPi * h_p * (x.x * x.x + x.y * x.y));
}

double profile_deviation(const std::function<double(Point)>& u, const FlatTorus& torus,
                         double peak_value, Point peak_point, double h_p, double radius) {
  if (!(h_p > 0.0)) throw InvalidArgument("h_p must be positive");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const double scale = std::exp(0.5 * peak_value);
  if (!(radius / scale < torus.injectivity_radius())) {
    std::ostringstream msg;
    msg << "rescaled window " << radius / scale << " exceeds the fundamental domain (injectivity radius "
        << torus.injectivity_radius() << ")";
    throw InvalidArgument(msg.str());
  }
  constexpr int kRadii = 32;
  constexpr int kAngles = 32;
  const double s = std::sqrt(torus.modulus()) / scale;
  auto deviation_at = [&](Point x) {
    const Point q{peak_point.x + s * x.x, peak_point.y + s * x.y};
    return std::abs(u(q) - peak_value - bubble_profile(x, h_p));
  };
  double worst = deviation_at(Point{0.0, 0.0});
  for (int i = 1; i <= kRadii; ++i) {
    const double r = radius * i / kRadii;
    for (int k = 0; k < kAngles; ++k) {
      const double th = kTwoPi * k / kAngles;
      worst = std::max(worst, deviation_at(Point{r * std::cos(th), r * std::sin(th)}));
    }
  }
  return worst;
}

double profile_deviation(const Field& u, double peak_value, Point peak_point, double h_p,
                         double radius) {
  const SpectralInterpolant interp(u);
  return profile_deviation([&interp](Point q) { return interp(q); }, u.torus(), peak_value,
                           peak_point, h_p, radius);
}

double green_deviation(const Field& u, const GreenField& g, double exclusion_radius) {
  require_same_grid(u, g.values);
  if (!(exclusion_radius >= 0.0)) throw InvalidArgument("exclusion radius must be non-negative");
  const FlatTorus& t = u.torus();
  const double mu = integrate(u);
  const double mg = integrate(g.values);
  const auto uv = u.values();
  const auto gv = g.values.values();
  double worst = 0.0;
  for (int i = 0; i < t.nx(); ++i) {
    for (int j = 0; j < t.ny(); ++j) {
      if (t.distance(g.p, t.node(i, j)) < exclusion_radius) continue;
      const std::size_t k = t.index(i, j);
      worst = std::max(worst, std::abs((uv[k] - mu) - (gv[k] - mg)));
    }
  }
  return worst;
}

}  // namespace meanfield
