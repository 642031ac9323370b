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

#include "meanfield/quadrature.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "meanfield/error.hpp"
#include "meanfield/torus.hpp"

namespace meanfield {

namespace {

// Truncated second-order jets for composing the cutoff analytically.
struct Jet {
  double v, d, dd;
};

Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd}; }
Jet reciprocal(Jet a) {
  const double r = 1.0 / a.v;
  return {r, -a.d * r * r, (2 * a.d * a.d * r - a.dd) * r * r};
}
Jet exp(Jet a) {
  const double e = std::exp(a.v);
  return {e, a.d * e, (a.dd + a.d * a.d) * e};
}

// exp(-1/t) for t > 0, zero otherwise.
Jet psi(Jet t) {
  if (t.v <= 0.0) return {0.0, 0.0, 0.0};
  Jet inv = reciprocal(t);
  return exp(Jet{-inv.v, -inv.d, -inv.dd});
}

}  // namespace

SmoothBump::SmoothBump(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(inner > 0.0) || !(outer > inner)) {
    throw InvalidArgument("cutoff radii must satisfy 0 < inner < outer");
  }
}

RadialJet SmoothBump::jet(double r) const {
  if (r <= inner_) return {1.0, 0.0, 0.0};
  if (r >= outer_) return {0.0, 0.0, 0.0};
  const double w = outer_ - inner_;
  const Jet t{(r - inner_) / w, 1.0 / w, 0.0};
  const Jet a = psi(t);
  const Jet b = psi(Jet{1.0 - t.v, -t.d, 0.0});
  const Jet step = a * reciprocal(a + b);
  return {1.0 - step.v, -step.d, -step.dd};
}

double SmoothBump::log_integral() const {
  // Flat core: -8 pi [r^2/2 log r - r^2/4] from 0 to inner.
  const double a = inner_;
  const double core = -8.0 * kPi * (0.5 * a * a * std::log(a) - 0.25 * a * a);
  const auto shell = integrate_adaptive(
      [this](double r) { return -8.0 * kPi * r * std::log(r) * (*this)(r); }, inner_, outer_,
      1e-14, 1e-16);
  return core + shell.value;
}

double SmoothBump::source_integral() const {
  const auto res = integrate_adaptive(
      [this](double r) {
        const RadialJet c = jet(r);
        return kTwoPi * r * (2.0 * c.d1 / r + std::log(r) * (c.d2 + c.d1 / r));
      },
      inner_, outer_, 1e-13, 1e-15);
  return res.value;
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error, l1;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double l1 = std::abs(fc) * kWgk[7];
  for (int k = 0; k < 7; ++k) {
    const double dx = h * kXgk[k];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kWgk[k] * (f1 + f2);
    l1 += kWgk[k] * (std::abs(f1) + std::abs(f2));
    if (k % 2 == 1) gauss += kWg[k / 2] * (f1 + f2);
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h), l1 * std::abs(h)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, unsigned max_depth) {
  if (a == b) return {};
  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod15(f, a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  double l1 = heap.top().l1;
  const std::size_t max_segments = std::size_t{1} << std::min(max_depth, 16u);
  const double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    const double allowed = std::max(abs_tol, rel_tol * std::abs(value));
    if (error <= allowed || error <= 50.0 * eps * l1) break;
    if (heap.size() >= max_segments) {
      std::ostringstream msg;
      msg << "adaptive quadrature on [" << a << ", " << b << "] reached error " << error
          << " (requested " << allowed << ")";
      throw NumericalError(msg.str());
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = gauss_kronrod15(f, worst.a, mid);
    const Segment right = gauss_kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  double total = 0.0;
  double total_error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_error += heap.top().error;
    heap.pop();
  }
  return {total, total_error};
}

QuadratureResult integrate_log_radius(const std::function<double(double)>& f, double a,
                                      double b, double rel_tol, double abs_tol) {
  if (!(a > 0.0)) throw InvalidArgument("integrate_log_radius needs a positive lower limit");
  return integrate_adaptive(
      [&f](double t) {
        const double r = std::exp(t);
        return f(r) * r;
      },
      std::log(a), std::log(b), rel_tol, abs_tol);
}

}  // namespace meanfield
