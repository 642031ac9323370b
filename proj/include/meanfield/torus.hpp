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

// Geometry and spectral calculus on the unit-area flat torus
//
//   M = C / (Z + i v Z),   ds^2 = (dx^2 + dy^2) / v,
//
// sampled on the uniform grid x_i = i/nx, y_j = j v/ny of the fundamental
// domain [0,1) x [0,v).  The Riemannian area is exactly one, so the
// trapezoid quadrature of a field is the plain mean of its samples, and the
// Laplace-Beltrami operator is v (d_xx + d_yy).

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace meanfield {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEightPi = 8.0 * kPi;

/// A point of the plane, in the Euclidean coordinates of the fundamental domain.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Planar displacement.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  [[nodiscard]] double norm() const;
};

class FlatTorus {
 public:
  /// Validating constructor; see make_torus.
  FlatTorus(double v, int nx, int ny, bool require_isotropic = true);

  [[nodiscard]] double modulus() const { return v_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  [[nodiscard]] double hx() const { return 1.0 / nx_; }
  [[nodiscard]] double hy() const { return v_ / ny_; }
  /// hy / hx = v nx / ny.
  [[nodiscard]] double aspect_ratio() const { return v_ * nx_ / ny_; }

  /// Euclidean length of one unit of geodesic (normal-coordinate) length: sqrt(v).
  [[nodiscard]] double normal_scale() const;
  /// Half the shortest closed geodesic, in normal units: min(1, v) / (2 sqrt(v)).
  [[nodiscard]] double injectivity_radius() const;
  /// Largest grid spacing measured in normal units.
  [[nodiscard]] double normal_spacing() const;

  [[nodiscard]] Point node(int i, int j) const { return {i * hx(), j * hy()}; }
  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * ny_ + j;
  }

  /// Minimum-image Euclidean displacement b - a.
  [[nodiscard]] Vec2 displacement(Point a, Point b) const;
  /// Geodesic distance |b - a| / sqrt(v) (valid below the injectivity radius).
  [[nodiscard]] double distance(Point a, Point b) const;
  /// Reduce into the fundamental domain [0,1) x [0,v).
  [[nodiscard]] Point wrap(Point p) const;

  friend bool operator==(const FlatTorus&, const FlatTorus&) = default;

 private:
  double v_;
  int nx_;
  int ny_;
};

/// make_torus(v, nx, ny): unit-area torus with an nx x ny grid.
/// Throws InvalidArgument for v <= 0, odd or too small grids, and (by default)
/// for grids whose aspect ratio hy/hx lies outside [0.5, 2].
FlatTorus make_torus(double v, int nx, int ny, bool require_isotropic = true);
/// Same with ny chosen so that hy ~= hx.
FlatTorus make_torus(double v, int nx);

/// Real doubly periodic function sampled on the torus grid, with a lazily
/// computed (and then cached) spectral representation.  Immutable.
class Field {
 public:
  using Complex = std::complex<double>;

  Field(FlatTorus torus, std::vector<double> values);

  static Field constant(const FlatTorus& torus, double c);
  static Field from_function(const FlatTorus& torus,
                             const std::function<double(double, double)>& f);
  /// Inverse of coefficients(); the imaginary residue is dropped.
  static Field from_coefficients(const FlatTorus& torus, std::span<const Complex> coeffs);

  [[nodiscard]] const FlatTorus& torus() const { return torus_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double at(int i, int j) const { return values_[torus_.index(i, j)]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  /// Normalized DFT coefficients c_k = (1/N) sum_j f_j e^{-i k.z_j}, FFTW order.
  [[nodiscard]] std::span<const Complex> coefficients() const;

  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;
  /// Row-major index of the first maximal sample.
  [[nodiscard]] std::size_t argmax() const;

  [[nodiscard]] Field map(const std::function<double(double)>& f) const;
  [[nodiscard]] Field operator+(const Field& other) const;
  [[nodiscard]] Field operator-(const Field& other) const;
  [[nodiscard]] Field operator*(const Field& other) const;
  [[nodiscard]] Field operator+(double c) const;
  [[nodiscard]] Field operator*(double c) const;

 private:
  struct CoefficientCache {
    std::once_flag once;
    std::vector<Complex> coeffs;
  };

  FlatTorus torus_;
  std::vector<double> values_;
  std::shared_ptr<CoefficientCache> cache_;
};

/// Angular wavenumbers of mode (m, n) on the torus: (2 pi m, 2 pi n / v).
struct Wavenumbers {
  std::vector<double> kx;  // size nx, FFTW order
  std::vector<double> ky;  // size ny, FFTW order
  explicit Wavenumbers(const FlatTorus& torus);
};

/// Riemannian integral of f; the mean of the samples.
double integrate(const Field& f);

/// Unhalved Dirichlet integral of f, computed spectrally.  By conformal
/// invariance it equals the flat Dirichlet integral over the fundamental domain.
double dirichlet_energy(const Field& f);

/// Spectral Laplace-Beltrami operator v (d_xx + d_yy).
Field laplacian(const Field& f);

/// Spectral first derivatives in normal coordinates (sqrt(v) d_x, sqrt(v) d_y).
std::pair<Field, Field> normal_gradient(const Field& f);

/// Apply (1 - Laplacian)^{-1} spectrally.
Field screened_inverse(const Field& f);

/// f - integrate(f).
Field project_mean_zero(const Field& f);

/// Integral of h e^u.  Throws InvalidArgument unless h > 0 everywhere.
double exp_integral(const Field& h, const Field& u);
/// log of the same integral, evaluated with a max-shift so that it stays
/// finite when e^u overflows.
double log_exp_integral(const Field& h, const Field& u);

/// Trigonometric interpolant of a field, evaluated off the grid.  Modes with
/// negligible amplitude are dropped, so band-limited fields are cheap.
class SpectralInterpolant {
 public:
  explicit SpectralInterpolant(const Field& f, double drop_tolerance = 1e-15);

  [[nodiscard]] double operator()(Point p) const;
  [[nodiscard]] std::size_t mode_count() const { return modes_.size(); }

 private:
  struct Mode {
    double kx;
    double ky;
    std::complex<double> c;
  };
  std::vector<Mode> modes_;
};

void require_same_grid(const Field& a, const Field& b);

}  // namespace meanfield
