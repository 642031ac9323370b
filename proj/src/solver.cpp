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

#include "meanfield/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace meanfield {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr double kMinStep = 1e-14;

bool all_finite(const Field& f) {
  const auto v = f.values();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double inner(const Field& a, const Field& b) { return integrate(a * b); }

void validate(const Field& h, const SolverConfig& cfg) {
  if (!(cfg.eps >= 0.0) || !std::isfinite(cfg.eps)) throw InvalidArgument("eps must be finite and >= 0");
  if (!(cfg.grad_tol > 0.0)) throw InvalidArgument("grad_tol must be positive");
  if (cfg.max_iters < 0) throw InvalidArgument("max_iters must be non-negative");
  if (!(cfg.step > 0.0)) throw InvalidArgument("step must be positive");
  if (!(h.min() > 0.0)) throw InvalidArgument("h must be positive everywhere");
  if (cfg.init == InitKind::warm) {
    if (!cfg.warm) throw InvalidArgument("warm start requested without a field");
    require_same_grid(h, *cfg.warm);
  }
}

Field initial_field(const Field& h, const SolverConfig& cfg) {
  switch (cfg.init) {
    case InitKind::zero:
      return Field::constant(h.torus(), 0.0);
    case InitKind::random:
      return random_smooth_field(h.torus(), cfg.seed, cfg.amplitude);
    case InitKind::warm:
      return project_mean_zero(*cfg.warm);
  }
  return Field::constant(h.torus(), 0.0);
}

[[noreturn]] void diverged(const Field& last, int it, const char* what) {
  std::ostringstream msg;
  msg << "solver diverged at iteration " << it << ": " << what << " (last finite iterate has sup norm "
      << sup_norm(last) << ")";
  throw SolverDiverged(msg.str(), last, it);
}

}  // namespace

Field random_smooth_field(const FlatTorus& torus, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kModes = 4;
  std::vector<double> a, ky, kx, phase;
  for (int m = -kModes; m <= kModes; ++m) {
    for (int n = -kModes; n <= kModes; ++n) {
      if (m == 0 && n == 0) continue;
      const double decay = 1.0 / (1.0 + m * m + n * n);
      a.push_back(normal(rng) * decay);
      phase.push_back(std::uniform_real_distribution<double>(0.0, kTwoPi)(rng));
      kx.push_back(kTwoPi * m);
      ky.push_back(kTwoPi * n / torus.modulus());
    }
  }
  const Field raw = Field::from_function(torus, [&](double x, double y) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(kx[k] * x + ky[k] * y + phase[k]);
    return s;
  });
  const Field centred = project_mean_zero(raw);
  const double scale = sup_norm(centred);
  return scale > 0.0 ? centred * (amplitude / scale) : centred;
}

SolveResult minimize(const Field& h, const SolverConfig& cfg) {
  validate(h, cfg);
  const double eps = cfg.eps;
  Field u = project_mean_zero(initial_field(h, cfg));
  if (!all_finite(u)) throw InvalidArgument("initial field is not finite");

  double J = eval_J(u, h, eps).total;
  Field g = l2_gradient(u, h, eps);
  std::vector<double> history{J};
  double drift = std::abs(integrate(u));
  int it = 0;
  std::string reason;
  bool converged = sup_norm(g) < cfg.grad_tol;

  // Previous iterate and gradient for the Barzilai-Borwein step.
  std::optional<Field> u_prev;
  std::optional<Field> g_prev;
  double last_step = cfg.step;

  while (!converged && it < cfg.max_iters) {
    const Field d = project_mean_zero(screened_inverse(g)) * -1.0;
    const double slope = inner(g, d);
    if (!(slope < 0.0)) {
      reason = "search direction is not a descent direction";
      break;
    }

    double t = cfg.step;
    if (cfg.step_rule == StepRule::bb && u_prev && g_prev) {
      const Field s = u - *u_prev;
      const Field y = g - *g_prev;
      const double sy = inner(s, y);
      // H^1 norm of s, matching the preconditioner.
      const double ss = inner(s, s) + dirichlet_energy(s);
      if (sy > 0.0) t = std::clamp(ss / sy, 1e-6, 1e3);
    } else if (cfg.step_rule == StepRule::backtracking) {
      t = std::min(cfg.step, 2.0 * last_step);
    }

    const double slack = 1e-13 * (1.0 + std::abs(J));
    std::optional<Field> trial;
    double J_trial = 0.0;
    while (true) {
      Field cand = project_mean_zero(u + d * t);
      if (!all_finite(cand)) {
        if (cfg.step_rule == StepRule::fixed) diverged(u, it, "non-finite iterate");
        t *= kShrink;
        if (t < kMinStep) diverged(u, it, "non-finite iterate");
        continue;
      }
      const double Jc = eval_J(cand, h, eps).total;
      if (!std::isfinite(Jc)) {
        if (cfg.step_rule == StepRule::fixed) diverged(u, it, "non-finite energy");
        t *= kShrink;
        if (t < kMinStep) diverged(u, it, "non-finite energy");
        continue;
      }
      if (cfg.step_rule == StepRule::fixed || Jc <= J + kArmijo * t * slope + slack) {
        trial = std::move(cand);
        J_trial = Jc;
        break;
      }
      t *= kShrink;
      if (t < kMinStep) break;
    }
    if (!trial) {
      reason = "line search stalled";
      break;
    }

    u_prev = u;
    g_prev = g;
    u = std::move(*trial);
    J = J_trial;
    last_step = t;
    g = l2_gradient(u, h, eps);
    if (!all_finite(g)) diverged(*u_prev, it, "non-finite gradient");
    history.push_back(J);
    drift = std::max(drift, std::abs(integrate(u)));
    ++it;
    converged = sup_norm(g) < cfg.grad_tol;
  }
  if (!converged && reason.empty()) reason = "max_iters reached";

  Field un = normalize_H1(u, h);
  SolveResult res{.u = un,
                  .energy = eval_J(un, h, eps),
                  .residual = residual_eq5(un, h, eps),
                  .iters = it,
                  .peak_value = 0.0,
                  .peak_point = {},
                  .peak_scale = 1.0,
                  .converged = false,
                  .energy_history = {},
                  .max_mean_drift = 0.0,
                  .stop_reason = {}};
  res.iters = it;
  const std::size_t k = un.argmax();
  const FlatTorus& t = un.torus();
  res.peak_value = un.values()[k];
  res.peak_point = t.node(static_cast<int>(k / t.ny()), static_cast<int>(k % t.ny()));
  res.peak_scale = std::exp(0.5 * res.peak_value);
  res.converged = converged && res.residual < cfg.grad_tol;
  if (converged && !res.converged) reason = "residual above tolerance after normalization";
  res.energy_history = std::move(history);
  res.max_mean_drift = drift;
  res.stop_reason = res.converged ? std::string() : reason;
  return res;
}

std::vector<SolveResult> continuation(const Field& h, const std::vector<double>& eps_schedule,
                                      const SolverConfig& cfg) {
  if (eps_schedule.empty()) throw InvalidArgument("eps schedule is empty");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    const double e = eps_schedule[i];
    const bool last = i + 1 == eps_schedule.size();
    if (!(e > 0.0) && !(last && e == 0.0)) {
      throw InvalidArgument("eps schedule entries must be positive (only the last may be 0)");
    }
    if (i > 0 && !(e < eps_schedule[i - 1])) {
      throw InvalidArgument("eps schedule must be strictly decreasing");
    }
  }
  std::vector<SolveResult> out;
  SolverConfig c = cfg;
  for (double e : eps_schedule) {
    c.eps = e;
    if (!out.empty()) {
      c.init = InitKind::warm;
      c.warm = out.back().u;
    }
    out.push_back(minimize(h, c));
  }
  return out;
}

double energy_gap_vs_zero(const Field& h, const SolveResult& result) {
  const double eps = result.energy.eps;
  const double J0 = -(kEightPi - eps) * std::log(integrate(h));
  return J0 - result.energy.total;
}

}  // namespace meanfield
