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

// Reference implementations used only by the tests.  Each one is coded from
// the defining formula and shares no numerical machinery with the library:
// plain q-product loops, a home-grown Gauss-Legendre rule, closed forms.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

/// A_v from its q-series with a fixed, generous number of terms.
inline double direct_a_v(double v) {
  const double q = std::exp(-2.0 * pi * v);
  double s = 0.0;
  double qn = q;
  for (int n = 1; n < 200 && qn > 0.0; ++n, qn *= q) s += std::log(1.0 - qn);
  return 4.0 * pi * v / 6.0 - 4.0 * std::log(2.0 * pi) - 2.0 * std::log(v) - 8.0 * s;
}

inline double reference_a0() { return -2.0 - 2.0 * std::log(pi); }

/// Plain bisection on direct_a_v - A0 until the bracket is narrower than tol.
inline double bisect_v_star(double lo, double hi, double tol) {
  const double a0 = reference_a0();
  double flo = direct_a_v(lo) - a0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = direct_a_v(mid) - a0;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Reduce y into [0, v) by periodicity.
inline double wrap_y(double y, double v) { return y - v * std::floor(y / v); }

/// Torus Green function with source at 0 by the naive q-product, 60 terms.
inline double naive_green(double x, double y, double v) {
  y = wrap_y(y, v);
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const C qz = std::exp(2.0 * pi * i * C(x, y));
  const double q = std::exp(-2.0 * pi * v);
  const double t = y / v;
  double g = 4.0 * pi * v * (t * t - t + 1.0 / 6.0) - 4.0 * std::log(std::abs(1.0 - qz));
  double qn = q;
  for (int n = 1; n <= 60; ++n, qn *= q) {
    g -= 4.0 * (std::log(std::abs(1.0 - qn * qz)) + std::log(std::abs(1.0 - qn / qz)));
  }
  return g;
}

/// Euclidean gradient of naive_green from the complex derivative of each factor.
inline std::pair<double, double> naive_green_gradient(double x, double y, double v) {
  y = wrap_y(y, v);
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const C qz = std::exp(2.0 * pi * i * C(x, y));
  const double q = std::exp(-2.0 * pi * v);
  // d/dz log(1 - a e^{2 pi i z}) = -2 pi i a e^{2 pi i z} / (1 - a e^{2 pi i z}).
  C fp = -4.0 * (-2.0 * pi * i * qz / (1.0 - qz));
  double qn = q;
  for (int n = 1; n <= 60; ++n, qn *= q) {
    fp -= 4.0 * (-2.0 * pi * i * qn * qz / (1.0 - qn * qz));
    fp -= 4.0 * (2.0 * pi * i * (qn / qz) / (1.0 - qn / qz));
  }
  return {fp.real(), -fp.imag() + 4.0 * pi * (2.0 * y / v - 1.0)};
}

/// n-point Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int k = 0; k < n; ++k) {
    double z = std::cos(pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * z * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[k] = z;
    w[k] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Composite Gauss-Legendre over consecutive breakpoints.
inline double composite(const std::function<double(double)>& f, const std::vector<double>& breaks,
                        int order = 20) {
  // One cached rule per order; nested calls may use different orders.
  static thread_local std::map<int, std::pair<std::vector<double>, std::vector<double>>> rules;
  auto it = rules.find(order);
  if (it == rules.end()) it = rules.emplace(order, gauss_legendre(order)).first;
  const auto& rule = it->second;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int j = 0; j < order; ++j) s += h * rule.second[j] * f(c + h * rule.first[j]);
  }
  return s;
}

inline std::vector<double> geometric_breaks(double a, double b, int per_decade) {
  std::vector<double> out{a};
  const int n = std::max(1, static_cast<int>(std::ceil(std::log10(b / a) * per_decade)));
  for (int k = 1; k <= n; ++k) out.push_back(a * std::pow(b / a, static_cast<double>(k) / n));
  out.back() = b;
  return out;
}

/// Closed forms for the truncated bubble u = -2 log(delta^2 + min(r, R0)^2) on
/// a unit-area torus, R0 in geodesic units.
struct BubbleClosedForm {
  double dirichlet;
  double mean;
  double exp_integral;  // int e^u
};

inline BubbleClosedForm bubble_closed_form(double delta, double R0) {
  const double d2 = delta * delta, S = R0 * R0, T = d2 + S;
  BubbleClosedForm b{};
  b.dirichlet = 16.0 * pi * (std::log(1.0 + S / d2) - S / T);
  const double disc = -2.0 * pi * (T * std::log(T) - T - d2 * std::log(d2) + d2);
  b.mean = disc + (1.0 - pi * S) * (-2.0 * std::log(T));
  b.exp_integral = pi * (1.0 / d2 - 1.0 / T) + (1.0 - pi * S) / (T * T);
  return b;
}

inline double bubble_ratio(double delta, double R0, double coeff) {
  const BubbleClosedForm b = bubble_closed_form(delta, R0);
  return b.exp_integral * std::exp(-b.mean - b.dirichlet / coeff);
}

struct BruteForceJ {
  double dirichlet;
  double mean;
  double exp_integral;
  double J;
};

/// J(phi) for h = 1 with source at the origin, from polar quadrature of
/// |grad phi|^2, phi and e^phi over the whole fundamental domain.  phi is
/// rebuilt from its piecewise definition with naive_green; no Green identities.
inline BruteForceJ brute_force_blowup_J(double v, double eps, double alpha) {
  const double sv = std::sqrt(v);
  const double rho = alpha * std::sqrt(eps);
  const double A = direct_a_v(v);
  const double C = -2.0 * std::log((alpha * alpha + 1.0) / (alpha * alpha)) - A;
  const double le = std::log(eps);
  const double ln2 = std::log(2.0);

  auto eta = [&](double r, double& deta) {
    deta = 0.0;
    if (r <= rho) return 1.0;
    if (r >= 2.0 * rho) return 0.0;
    const double t = std::log(r / rho) / ln2;
    deta = -30.0 * t * t * (1.0 - t) * (1.0 - t) / (r * ln2);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  };

  // phi and |grad phi|^2 at normal coordinates r (cos th, sin th).
  auto eval = [&](double r, double th, double& grad2) {
    if (r <= rho) {
      const double g = 4.0 * r / (r * r + eps);
      grad2 = g * g;
      return -2.0 * std::log(r * r + eps) + le;
    }
    const double c = std::cos(th), s = std::sin(th);
    const double x = sv * r * c, y = sv * r * s;
    const double G = naive_green(x, y, v);
    auto [gx, gy] = naive_green_gradient(x, y, v);
    gx *= sv;  // to normal coordinates
    gy *= sv;
    double deta = 0.0;
    const double e = eta(r, deta);
    const double beta = G + 4.0 * std::log(r) - A;
    const double bx = gx + 4.0 * c / r, by = gy + 4.0 * s / r;
    const double px = gx - deta * c * beta - e * bx;
    const double py = gy - deta * s * beta - e * by;
    grad2 = px * px + py * py;
    return G - e * beta + C + le;
  };

  const double a = 0.5 / sv, b = 0.5 * sv;  // half-widths in normal units
  const double corners[4] = {std::atan2(b, a), std::atan2(b, -a), std::atan2(-b, -a) + 2.0 * pi,
                             std::atan2(-b, a) + 2.0 * pi};
  auto boundary = [&](double th) {
    const double c = std::abs(std::cos(th)), s = std::abs(std::sin(th));
    return std::min(c > 0 ? a / c : 1e300, s > 0 ? b / s : 1e300);
  };

  const double bubble = std::sqrt(eps);
  std::vector<double> inner_breaks{0.0};
  for (double r : geometric_breaks(bubble * 1e-3, rho, 6)) inner_breaks.push_back(r);

  auto radial = [&](double th, int which) {
    const double R = boundary(th);
    std::vector<double> br = inner_breaks;
    for (double r : geometric_breaks(rho, 2.0 * rho, 8)) {
      if (r > br.back()) br.push_back(r);
    }
    for (double r : geometric_breaks(2.0 * rho, R, 6)) {
      if (r > br.back()) br.push_back(r);
    }
    return composite(
        [&](double r) {
          double g2 = 0.0;
          const double phi = eval(r, th, g2);
          const double f = which == 0 ? g2 : which == 1 ? phi : std::exp(phi);
          return f * r;
        },
        br);
  };

  BruteForceJ out{};
  double* slots[3] = {&out.dirichlet, &out.mean, &out.exp_integral};
  for (int which = 0; which < 3; ++which) {
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double lo = corners[(k + 3) % 4] - (k == 0 ? 2.0 * pi : 0.0);
      const double hi = corners[k];
      total += composite([&](double th) { return radial(th, which); }, {lo, 0.5 * (lo + hi), hi}, 24);
    }
    *slots[which] = total;
  }
  const double c = 8.0 * pi;
  out.J = 0.5 * out.dirichlet + c * out.mean - c * std::log(out.exp_integral);
  return out;
}

}  // namespace oracle
