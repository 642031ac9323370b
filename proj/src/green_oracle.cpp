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

// Mode-by-mode construction of G, sharing nothing with the q-product path.
//
// With S = -4 log|z| chi(|z|) in Euclidean coordinates, Laplacian_e S =
// -8 pi delta + sigma for a smooth, compactly supported sigma.  The remainder
// F = G - S then solves Laplacian_e F = 8 pi / v - sigma, which is diagonal in
// Fourier space; its mean is fixed by the zero mean of G.

#include <algorithm>
#include <cmath>

#include "meanfield/error.hpp"
#include "meanfield/green.hpp"

namespace meanfield {

namespace {

SmoothBump oracle_bump(double v) {
  const double m = std::min(1.0, v);
  return SmoothBump(0.15 * m, 0.45 * m);
}

}  // namespace

GreenFourierOracle::GreenFourierOracle(double v, int modes) : v_(v), bump_(oracle_bump(v)) {
  if (!(v > 0.0)) throw InvalidArgument("modulus must be positive");
  if (modes < 8 || modes % 2 != 0) throw InvalidArgument("oracle needs an even mode count >= 8");
  int ny = 2 * static_cast<int>(std::lround(0.5 * v * modes));
  ny = std::max(ny, 8);
  const FlatTorus grid(v, modes, ny);
  const Point origin{0.0, 0.0};
  const Field sigma = Field::from_function(grid, [&](double x, double y) {
    const Vec2 d = grid.displacement(origin, Point{x, y});
    const double r = std::hypot(d.x, d.y);
    if (r <= bump_.inner() || r >= bump_.outer()) return 0.0;
    const RadialJet c = bump_.jet(r);
    return -4.0 * (2.0 * c.d1 / r + std::log(r) * (c.d2 + c.d1 / r));
  });
  const Wavenumbers k(grid);
  kx_ = k.kx;
  ky_ = k.ky;
  const auto s = sigma.coefficients();
  coeffs_.assign(s.begin(), s.end());
  for (std::size_t i = 0; i < kx_.size(); ++i) {
    for (std::size_t j = 0; j < ky_.size(); ++j) {
      const std::size_t idx = i * ky_.size() + j;
      const double k2 = kx_[i] * kx_[i] + ky_[j] * ky_[j];
      coeffs_[idx] = (i == 0 && j == 0) ? std::complex<double>(-bump_.log_integral() / v, 0.0)
                                        : s[idx] / k2;
    }
  }
}

double GreenFourierOracle::operator()(std::complex<double> z) const {
  double x = z.real() - std::floor(z.real());
  double y = z.imag() - v_ * std::floor(z.imag() / v_);
  if (x > 0.5) x -= 1.0;
  if (y > 0.5 * v_) y -= v_;
  const double r = std::hypot(x, y);
  if (r < 1e-12) throw InvalidArgument("evaluation at source point");
  // Separable phases: e^{i kx x} e^{i ky y}.
  std::vector<std::complex<double>> py(ky_.size());
  for (std::size_t j = 0; j < ky_.size(); ++j) py[j] = std::polar(1.0, ky_[j] * y);
  double sum = 0.0;
  for (std::size_t i = 0; i < kx_.size(); ++i) {
    std::complex<double> row = 0.0;
    for (std::size_t j = 0; j < ky_.size(); ++j) row += coeffs_[i * ky_.size() + j] * py[j];
    sum += (std::polar(1.0, kx_[i] * x) * row).real();
  }
  const double singular = r < bump_.outer() ? -4.0 * std::log(r) * bump_(r) : 0.0;
  return sum + singular;
}

double green_fourier_oracle(std::complex<double> z, double v, int modes) {
  return GreenFourierOracle(v, modes)(z);
}

}  // namespace meanfield
