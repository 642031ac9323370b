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

#pragma once

#include <functional>

namespace meanfield {

/// Value and first two derivatives of a radial profile.
struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// C-infinity radial cutoff: 1 on [0, inner], 0 beyond outer, with the
/// exp(-1/t) transition in between.  All derivatives vanish at both ends, so
/// fields multiplied by it stay smooth and periodic.
class SmoothBump {
 public:
  SmoothBump(double inner, double outer);

  [[nodiscard]] double inner() const { return inner_; }
  [[nodiscard]] double outer() const { return outer_; }

  [[nodiscard]] double operator()(double r) const { return jet(r).value; }
  [[nodiscard]] RadialJet jet(double r) const;

  /// Planar integral of -4 log(r) chi(r) over the disc of radius outer.
  [[nodiscard]] double log_integral() const;
  /// Planar integral of the source 2 chi'/r + log(r) (chi'' + chi'/r), i.e. the
  /// smooth part of Laplacian(log(r) chi).  It equals -2 pi, cancelling the
  /// 2 pi delta of the full Laplacian.
  [[nodiscard]] double source_integral() const;

 private:
  double inner_;
  double outer_;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b], bisecting the worst segment
/// until the summed |K15 - G7| estimate meets max(abs_tol, rel_tol*|value|) or
/// hits round-off.  Throws NumericalError after 2^max_depth segments.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-12, double abs_tol = 0.0,
                                    unsigned max_depth = 14);

/// Integral over [a, b] of f(r) dr, with 0 < a, performed in t = log r so that
/// power-law integrands are well resolved across decades.
QuadratureResult integrate_log_radius(const std::function<double(double)>& f, double a,
                                      double b, double rel_tol = 1e-12, double abs_tol = 0.0);

}  // namespace meanfield
