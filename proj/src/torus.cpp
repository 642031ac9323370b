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

#include "meanfield/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fft.hpp"
#include "meanfield/error.hpp"

namespace meanfield {

double Vec2::norm() const { return std::hypot(x, y); }

FlatTorus::FlatTorus(double v, int nx, int ny, bool require_isotropic)
    : v_(v), nx_(nx), ny_(ny) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("modulus must be positive");
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0) {
    std::ostringstream msg;
    msg << "grid sizes must be even and >= 8 (got " << nx << " x " << ny << ")";
    throw InvalidArgument(msg.str());
  }
  if (require_isotropic) {
    const double ratio = aspect_ratio();
    if (ratio < 0.5 || ratio > 2.0) {
      std::ostringstream msg;
      msg << "grid aspect ratio hy/hx = " << ratio
          << " outside [0.5, 2]; choose ny close to v*nx";
      throw InvalidArgument(msg.str());
    }
  }
}

double FlatTorus::normal_scale() const { return std::sqrt(v_); }

double FlatTorus::injectivity_radius() const {
  return std::min(1.0, v_) / (2.0 * std::sqrt(v_));
}

double FlatTorus::normal_spacing() const {
  return std::max(hx(), hy()) / std::sqrt(v_);
}

Vec2 FlatTorus::displacement(Point a, Point b) const {
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  dx -= std::nearbyint(dx);
  dy -= v_ * std::nearbyint(dy / v_);
  return {dx, dy};
}

double FlatTorus::distance(Point a, Point b) const {
  return displacement(a, b).norm() / std::sqrt(v_);
}

Point FlatTorus::wrap(Point p) const {
  double x = p.x - std::floor(p.x);
  double y = p.y - v_ * std::floor(p.y / v_);
  if (x >= 1.0) x -= 1.0;
  if (y >= v_) y -= v_;
  return {x, y};
}

FlatTorus make_torus(double v, int nx, int ny, bool require_isotropic) {
  return FlatTorus(v, nx, ny, require_isotropic);
}

FlatTorus make_torus(double v, int nx) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("modulus must be positive");
  int ny = 2 * static_cast<int>(std::lround(0.5 * v * nx));
  ny = std::max(ny, 8);
  return FlatTorus(v, nx, ny, true);
}

// ---------------------------------------------------------------------------

Field::Field(FlatTorus torus, std::vector<double> values)
    : torus_(torus), values_(std::move(values)), cache_(std::make_shared<CoefficientCache>()) {
  if (values_.size() != torus_.size()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " samples, grid has " +
                          std::to_string(torus_.size()));
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw InvalidArgument("field values must be finite");
  }
}

Field Field::constant(const FlatTorus& torus, double c) {
  return Field(torus, std::vector<double>(torus.size(), c));
}

Field Field::from_function(const FlatTorus& torus,
                           const std::function<double(double, double)>& f) {
  std::vector<double> out(torus.size());
  for (int i = 0; i < torus.nx(); ++i) {
    for (int j = 0; j < torus.ny(); ++j) {
      const Point p = torus.node(i, j);
      out[torus.index(i, j)] = f(p.x, p.y);
    }
  }
  return Field(torus, std::move(out));
}

Field Field::from_coefficients(const FlatTorus& torus, std::span<const Complex> coeffs) {
  if (coeffs.size() != torus.size()) throw InvalidArgument("coefficient array size mismatch");
  std::vector<Complex> spatial(torus.size());
  detail::fft2_backward(torus.nx(), torus.ny(), coeffs, spatial);
  std::vector<double> out(torus.size());
  std::transform(spatial.begin(), spatial.end(), out.begin(),
                 [](const Complex& z) { return z.real(); });
  return Field(torus, std::move(out));
}

std::span<const Field::Complex> Field::coefficients() const {
  std::call_once(cache_->once, [this] {
    std::vector<Complex> in(values_.begin(), values_.end());
    cache_->coeffs.resize(values_.size());
    detail::fft2_forward(torus_.nx(), torus_.ny(), in, cache_->coeffs);
    const double scale = 1.0 / static_cast<double>(values_.size());
    for (auto& c : cache_->coeffs) c *= scale;
  });
  return cache_->coeffs;
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

std::size_t Field::argmax() const {
  return static_cast<std::size_t>(
      std::distance(values_.begin(), std::max_element(values_.begin(), values_.end())));
}

Field Field::map(const std::function<double(double)>& f) const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), f);
  return Field(torus_, std::move(out));
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.torus() == b.torus())) throw InvalidArgument("fields live on different grids");
}

namespace {

template <class Op>
Field zip(const Field& a, const Field& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(va[k], vb[k]);
  return Field(a.torus(), std::move(out));
}

// Apply a real spectral multiplier symbol(kx, ky) to f.
template <class Symbol>
Field apply_multiplier(const Field& f, Symbol symbol) {
  const FlatTorus& t = f.torus();
  const Wavenumbers k(t);
  auto c = f.coefficients();
  std::vector<Field::Complex> out(c.size());
  for (int i = 0; i < t.nx(); ++i) {
    for (int j = 0; j < t.ny(); ++j) {
      const std::size_t idx = t.index(i, j);
      out[idx] = c[idx] * symbol(i, j, k.kx[i], k.ky[j]);
    }
  }
  return Field::from_coefficients(t, out);
}

}  // namespace

Field Field::operator+(const Field& o) const { return zip(*this, o, std::plus<>()); }
Field Field::operator-(const Field& o) const { return zip(*this, o, std::minus<>()); }
Field Field::operator*(const Field& o) const { return zip(*this, o, std::multiplies<>()); }
Field Field::operator+(double c) const {
  return map([c](double x) { return x + c; });
}
Field Field::operator*(double c) const {
  return map([c](double x) { return x * c; });
}

Wavenumbers::Wavenumbers(const FlatTorus& torus) : kx(torus.nx()), ky(torus.ny()) {
  auto fill = [](std::vector<double>& k, int n, double period) {
    for (int i = 0; i < n; ++i) {
      const int m = (i < n / 2) ? i : i - n;
      k[i] = kTwoPi * m / period;
    }
  };
  fill(kx, torus.nx(), 1.0);
  fill(ky, torus.ny(), torus.modulus());
}

namespace {

// Neumaier-compensated running sum.  Energies are compared across line-search
// trials, so the summation error must stay near one ulp rather than grow with N.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double integrate(const Field& f) {
  auto v = f.values();
  CompensatedSum sum;
  for (double x : v) sum.add(x);
  return sum.value() / static_cast<double>(v.size());
}

double dirichlet_energy(const Field& f) {
  const FlatTorus& t = f.torus();
  const Wavenumbers k(t);
  auto c = f.coefficients();
  CompensatedSum sum;
  for (int i = 0; i < t.nx(); ++i) {
    for (int j = 0; j < t.ny(); ++j) {
      sum.add((k.kx[i] * k.kx[i] + k.ky[j] * k.ky[j]) * std::norm(c[t.index(i, j)]));
    }
  }
  // Euclidean area of the fundamental domain is v.
  return t.modulus() * sum.value();
}

Field laplacian(const Field& f) {
  const double v = f.torus().modulus();
  return apply_multiplier(f, [v](int, int, double kx, double ky) {
    return Field::Complex(-v * (kx * kx + ky * ky), 0.0);
  });
}

std::pair<Field, Field> normal_gradient(const Field& f) {
  const FlatTorus& t = f.torus();
  const double s = t.normal_scale();
  const int hx = t.nx() / 2;
  const int hy = t.ny() / 2;
  // Odd derivatives drop the Nyquist modes so that real fields stay real.
  auto dx = apply_multiplier(f, [&](int i, int, double kx, double) {
    return i == hx ? Field::Complex(0.0) : Field::Complex(0.0, s * kx);
  });
  auto dy = apply_multiplier(f, [&](int, int j, double, double ky) {
    return j == hy ? Field::Complex(0.0) : Field::Complex(0.0, s * ky);
  });
  return {std::move(dx), std::move(dy)};
}

Field screened_inverse(const Field& f) {
  const double v = f.torus().modulus();
  return apply_multiplier(f, [v](int, int, double kx, double ky) {
    return Field::Complex(1.0 / (1.0 + v * (kx * kx + ky * ky)), 0.0);
  });
}

Field project_mean_zero(const Field& f) { return f + (-integrate(f)); }

namespace {

void require_positive(const Field& h) {
  for (double x : h.values()) {
    if (!(x > 0.0)) throw InvalidArgument("h must be positive everywhere");
  }
}

}  // namespace

double log_exp_integral(const Field& h, const Field& u) {
  require_same_grid(h, u);
  require_positive(h);
  const double shift = u.max();
  auto hv = h.values();
  auto uv = u.values();
  CompensatedSum sum;
  for (std::size_t k = 0; k < uv.size(); ++k) sum.add(hv[k] * std::exp(uv[k] - shift));
  return shift + std::log(sum.value() / static_cast<double>(uv.size()));
}

double exp_integral(const Field& h, const Field& u) { return std::exp(log_exp_integral(h, u)); }

// ---------------------------------------------------------------------------

SpectralInterpolant::SpectralInterpolant(const Field& f, double drop_tolerance) {
  const FlatTorus& t = f.torus();
  const Wavenumbers k(t);
  auto c = f.coefficients();
  double cmax = 0.0;
  for (const auto& z : c) cmax = std::max(cmax, std::abs(z));
  const double cutoff = drop_tolerance * cmax;
  for (int i = 0; i < t.nx(); ++i) {
    for (int j = 0; j < t.ny(); ++j) {
      const auto& z = c[t.index(i, j)];
      if (std::abs(z) > cutoff || (i == 0 && j == 0)) modes_.push_back({k.kx[i], k.ky[j], z});
    }
  }
}

double SpectralInterpolant::operator()(Point p) const {
  double sum = 0.0;
  for (const auto& m : modes_) {
    const double phase = m.kx * p.x + m.ky * p.y;
    sum += m.c.real() * std::cos(phase) - m.c.imag() * std::sin(phase);
  }
  return sum;
}

}  // namespace meanfield
