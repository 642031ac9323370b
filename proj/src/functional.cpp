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

#include "meanfield/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "meanfield/error.hpp"
#include "meanfield/quadrature.hpp"

namespace meanfield {

namespace {

double coupling(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be finite and >= 0");
  return kEightPi - eps;
}

}  // namespace

EnergyBreakdown eval_J(const Field& u, const Field& h, double eps) {
  const double c = coupling(eps);
  EnergyBreakdown e;
  e.eps = eps;
  e.dirichlet_half = 0.5 * dirichlet_energy(u);
  e.linear = c * integrate(u);
  e.logterm = -c * log_exp_integral(h, u);
  e.total = e.dirichlet_half + e.linear + e.logterm;
  return e;
}

Field l2_gradient(const Field& u, const Field& h, double eps) {
  const double c = coupling(eps);
  const double log_mass = log_exp_integral(h, u);
  auto uv = u.values();
  auto hv = h.values();
  std::vector<double> g(uv.size());
  for (std::size_t k = 0; k < uv.size(); ++k) g[k] = c - c * hv[k] * std::exp(uv[k] - log_mass);
  return Field(u.torus(), std::move(g)) - laplacian(u);
}

double residual_eq5(const Field& u, const Field& h, double eps) {
  const double c = coupling(eps);
  const double mass = exp_integral(h, u);
  if (!(std::abs(mass - 1.0) < 1e-10)) {
    std::ostringstream msg;
    msg << "u is not normalized (int h e^u = " << mass << "); call normalize_H1 first";
    throw InvalidArgument(msg.str());
  }
  const Field lap = laplacian(u);
  auto lv = lap.values();
  auto uv = u.values();
  auto hv = h.values();
  double worst = 0.0;
  for (std::size_t k = 0; k < uv.size(); ++k) {
    worst = std::max(worst, std::abs(lv[k] - c + c * hv[k] * std::exp(uv[k])));
  }
  return worst;
}

Field normalize_H1(const Field& u, const Field& h) { return u + (-log_exp_integral(h, u)); }

double mt_ratio(const Field& u, double coeff) {
  if (!(coeff > 0.0)) throw InvalidArgument("coefficient must be positive");
  const Field centred = project_mean_zero(u);
  const double log_int = log_exp_integral(Field::constant(u.torus(), 1.0), centred);
  return std::exp(log_int - dirichlet_energy(u) / coeff);
}

BubbleFamilySample truncated_bubble_sample(const FlatTorus& torus, double delta, double R0,
                                           double coeff) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(R0 > 0.0) || R0 > torus.injectivity_radius()) {
    throw InvalidArgument("truncation radius must lie in (0, injectivity radius]");
  }
  if (!(coeff > 0.0)) throw InvalidArgument("coefficient must be positive");
  const double d2 = delta * delta;
  // Radial integrals over the disc, split at the bubble scale.
  auto radial = [&](const std::function<double(double)>& f) {
    const double knee = std::min(delta, 0.5 * R0);
    double total = integrate_adaptive(f, 0.0, knee, 1e-13, 0.0).value;
    total += integrate_log_radius(f, knee, R0, 1e-13, 0.0).value;
    return total;
  };
  const double u_edge = -2.0 * std::log(d2 + R0 * R0);
  const double outside = 1.0 - kPi * R0 * R0;

  BubbleFamilySample s;
  s.delta = delta;
  s.dirichlet = radial([d2](double r) {
    const double du = 4.0 * r / (d2 + r * r);
    return kTwoPi * r * du * du;
  });
  s.mean = radial([d2](double r) { return kTwoPi * r * -2.0 * std::log(d2 + r * r); }) +
           outside * u_edge;
  // e^{u} = (d2 + r^2)^{-2}; shift by the edge value to keep magnitudes tame.
  const double disc = radial([d2, R0](double r) {
    const double ratio = (d2 + R0 * R0) / (d2 + r * r);
    return kTwoPi * r * ratio * ratio;
  });
  s.log_exp_integral = u_edge + std::log(disc + outside) - s.mean;
  s.ratio = std::exp(s.log_exp_integral - s.dirichlet / coeff);
  return s;
}

Field truncated_bubble_field(const FlatTorus& torus, double delta, double R0, Point p) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(R0 > 0.0) || R0 > torus.injectivity_radius()) {
    throw InvalidArgument("truncation radius must lie in (0, injectivity radius]");
  }
  return Field::from_function(torus, [&](double x, double y) {
    const double r = std::min(torus.distance(p, Point{x, y}), R0);
    return -2.0 * std::log(delta * delta + r * r);
  });
}

HLocalData h_local_data(const Field& h) {
  const FlatTorus& t = h.torus();
  const std::size_t k = h.argmax();
  const double hmax = h.values()[k];
  if (!(hmax > 0.0)) throw InvalidArgument("h must be positive everywhere");
  HLocalData hd;
  const int i = static_cast<int>(k / t.ny());
  const int j = static_cast<int>(k % t.ny());
  hd.p0 = t.node(i, j);
  hd.h_p0 = hmax;
  const auto [g1, g2] = normal_gradient(h);
  hd.k1 = g1.values()[k];
  hd.k2 = g2.values()[k];
  hd.lap_h = laplacian(h).values()[k];
  const auto vals = h.values();
  hd.tie = std::count_if(vals.begin(), vals.end(), [hmax](double x) { return x >= hmax - 1e-10; }) > 1;
  return hd;
}

ConditionResult check_thm31(const Field& h, double A_max) {
  const double mass = integrate(h);
  if (!(h.min() > 0.0)) throw InvalidArgument("h must be positive everywhere");
  const double rhs = 1.0 + std::log(kPi) + 0.5 * (A_max + 2.0 * std::log(h.max()));
  const double margin = std::log(mass) - rhs;
  return {margin > 0.0, margin};
}

ConditionResult check_thm12(const HLocalData& hd, const GreenExpansion& e, double K) {
  if (!(hd.h_p0 > 0.0)) throw InvalidArgument("h(p0) must be positive");
  const double margin = hd.lap_h + 2.0 * (e.b1 * hd.k1 + e.b2 * hd.k2) +
                        (kEightPi + e.b1 * e.b1 + e.b2 * e.b2 - 2.0 * K) * hd.h_p0;
  return {margin > 0.0, margin};
}

ConditionResult check_log_condition(const HLocalData& hd, double K) {
  if (!(hd.h_p0 > 0.0)) throw InvalidArgument("h(p0) must be positive");
  const double h = hd.h_p0;
  const double lap_log = hd.lap_h / h - (hd.k1 * hd.k1 + hd.k2 * hd.k2) / (h * h);
  const double margin = lap_log + kEightPi - 2.0 * K;
  return {margin > 0.0, margin};
}

double blowup_energy_level(double A, double h_max) {
  if (!(h_max > 0.0)) throw InvalidArgument("h must be positive");
  return -kEightPi - kEightPi * std::log(kPi) - 4.0 * kPi * (A + 2.0 * std::log(h_max));
}

}  // namespace meanfield
