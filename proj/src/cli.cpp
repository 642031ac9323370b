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

#include "meanfield/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "meanfield/blowup.hpp"
#include "meanfield/error.hpp"
#include "meanfield/field_io.hpp"
#include "meanfield/functional.hpp"
#include "meanfield/green.hpp"
#include "meanfield/hspec.hpp"
#include "meanfield/solver.hpp"

namespace meanfield::cli {

namespace {

const std::vector<std::string> kCommands = {"green",      "av",       "vstar",    "energy", "solve",
                                            "blowup",     "blowup-fit", "mt-check", "condition"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::vector<ConfigEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (e.key.empty()) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

void add_torus_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--v", cfg.v, "torus modulus v > 0 (fundamental domain [0,1) x [0,v))");
  sub->add_option("--nx", cfg.nx, "grid points along x (even)");
  sub->add_option("--ny", cfg.ny, "grid points along y (even; 0 = isotropic choice)");
}

void add_h_option(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--h", cfg.h_spec,
                  "weight h as an h-spec (const:c, cos:ax=a, cos:ay=a, bump:amp,sigma,x0,y0 joined by +)");
}

void add_out_option(CLI::App* sub, RunConfig& cfg, const std::string& what) {
  sub->add_option("--out", cfg.out, "output " + what + " path (stdout when omitted)");
}

void build_app(CLI::App& app, RunConfig& cfg) {
  // -h would clash with --h, the weight option.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  auto* green = app.add_subcommand("green", "sample G(., p) on the grid; CSV x,y,G");
  add_torus_options(green, cfg);
  green->add_option("--px", cfg.px, "source x in [0,1)");
  green->add_option("--py", cfg.py, "source y in [0,v)");
  add_out_option(green, cfg, "CSV");

  auto* av = app.add_subcommand("av", "tabulate A_v on an even grid of moduli; CSV v,A_v");
  av->add_option("--vmin", cfg.vmin, "smallest modulus");
  av->add_option("--vmax", cfg.vmax, "largest modulus");
  av->add_option("--steps", cfg.steps, "number of moduli (>= 1)");
  add_out_option(av, cfg, "CSV");

  auto* vstar = app.add_subcommand("vstar", "bisect for the modulus where A_v = A_0; JSON");
  vstar->add_option("--tol", cfg.tol, "bracket width at which bisection stops (modulus units)");
  vstar->add_option("--v-lo", cfg.v_lo, "lower end of the bracket");
  vstar->add_option("--v-hi", cfg.v_hi, "upper end of the bracket");
  add_out_option(vstar, cfg, "JSON");

  auto* energy = app.add_subcommand("energy", "evaluate J_eps(u); JSON EnergyBreakdown");
  energy->add_option("--field", cfg.field_path, "u as a .csv or .json field file")->required();
  energy->add_option("--h", cfg.h_spec, "h as a .csv/.json field file or an h-spec")->required();
  energy->add_option("--eps", cfg.eps, "eps >= 0 (coupling 8 pi - eps)");
  add_out_option(energy, cfg, "JSON");

  auto* solve = app.add_subcommand("solve", "minimize J_eps; JSON SolveResult");
  add_torus_options(solve, cfg);
  add_h_option(solve, cfg);
  solve->add_option("--eps", cfg.eps, "eps >= 0 (coupling 8 pi - eps)");
  solve->add_option("--schedule", cfg.schedule, "comma-separated decreasing eps continuation")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  solve->add_option("--max-iters", cfg.max_iters, "iteration cap per solve");
  solve->add_option("--grad-tol", cfg.grad_tol, "sup-norm residual counted as converged");
  solve->add_option("--step-rule", cfg.step_rule, "fixed | backtracking | bb");
  solve->add_option("--step", cfg.step, "fixed step or first line-search trial");
  solve->add_option("--init", cfg.init, "zero | random | warm");
  solve->add_option("--seed", cfg.seed, "seed of the random initial field");
  solve->add_option("--amplitude", cfg.amplitude, "sup norm of the random initial field");
  solve->add_option("--warm", cfg.warm_path, "initial field file for --init warm");
  solve->add_option("--field-out", cfg.field_out,
                    "where to write the minimizer as CSV (default: <out stem>.u.csv)");
  add_out_option(solve, cfg, "JSON");

  auto* blowup = app.add_subcommand("blowup", "J of concentrating test functions; CSV eps,J,regressor");
  add_torus_options(blowup, cfg);
  add_h_option(blowup, cfg);
  blowup->add_option("--eps-min", cfg.eps_min, "smallest concentration parameter");
  blowup->add_option("--eps-max", cfg.eps_max, "largest concentration parameter (< 1/e)");
  blowup->add_option("--points", cfg.points, "number of log-spaced eps values (>= 2)");
  blowup->add_option("--angular-nodes", cfg.angular_nodes, "angular nodes of the polar quadratures");
  add_out_option(blowup, cfg, "CSV");

  auto* fit = app.add_subcommand("blowup-fit", "fit J = c + s eps(-log eps) to blowup CSV; JSON");
  fit->add_option("--in", cfg.in_path, "CSV written by the blowup command")->required();
  fit->add_flag("--with-eps", cfg.with_eps, "add an eps regressor to the model");
  add_out_option(fit, cfg, "JSON");

  auto* mt = app.add_subcommand("mt-check", "Moser-Trudinger ratio along a bubble family; CSV");
  mt->add_option("--v", cfg.v, "torus modulus v > 0");
  mt->add_option("--family", cfg.family, "test family (bubble)");
  mt->add_option("--coeff", cfg.coeff, "exponent denominator: 16pi, 17pi or a number");
  mt->add_option("--delta-min", cfg.delta_min, "smallest bubble width (geodesic units)");
  mt->add_option("--delta-max", cfg.delta_max, "largest bubble width (geodesic units)");
  mt->add_option("--points", cfg.points, "number of log-spaced widths (>= 2)");
  mt->add_option("--R0", cfg.r0, "truncation radius, geodesic units (0 = injectivity radius)");
  add_out_option(mt, cfg, "CSV");

  auto* cond = app.add_subcommand("condition", "check an existence condition; JSON {holds, margin}");
  cond->add_option("--thm", cfg.thm, "31 (comparison with A_v) or 12 (local condition at max h)");
  add_torus_options(cond, cfg);
  add_h_option(cond, cfg);
  add_out_option(cond, cfg, "JSON");

  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--config", cfg.config_path, "key = value file; flags override it");
  }
}

std::ostream& open_out(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw InvalidArgument("cannot write '" + path + "'");
  return file;
}

FlatTorus torus_of(const RunConfig& cfg) {
  return cfg.ny > 0 ? make_torus(cfg.v, cfg.nx, cfg.ny) : make_torus(cfg.v, cfg.nx);
}

Json point_json(Point p) { return Json{{"x", p.x}, {"y", p.y}}; }

Json energy_json(const EnergyBreakdown& e) {
  return Json{{"dirichlet_half", e.dirichlet_half},
              {"linear", e.linear},
              {"logterm", e.logterm},
              {"total", e.total},
              {"eps", e.eps}};
}

Json with_config(Json doc, const RunConfig& cfg) {
  doc["config"] = to_json(cfg);
  return doc;
}

int cmd_green(const RunConfig& cfg, std::ostream& out) {
  const FlatTorus torus = torus_of(cfg);
  const GreenField g = green_field(torus, torus.wrap(Point{cfg.px, cfg.py}));
  std::ofstream file;
  std::ostream& os = open_out(cfg.out, file, out);
  os << "x,y,G\n";
  for (int i = 0; i < torus.nx(); ++i) {
    for (int j = 0; j < torus.ny(); ++j) {
      const std::size_t k = torus.index(i, j);
      if (g.singular_node && *g.singular_node == k) continue;
      const Point p = torus.node(i, j);
      os << format_double(p.x) << ',' << format_double(p.y) << ','
         << format_double(g.values.values()[k]) << '\n';
    }
  }
  return 0;
}

int cmd_av(const RunConfig& cfg, std::ostream& out) {
  std::ofstream file;
  std::ostream& os = open_out(cfg.out, file, out);
  os << "v,A_v\n";
  for (int i = 0; i < cfg.steps; ++i) {
    const double v =
        cfg.steps == 1 ? cfg.vmin : cfg.vmin + (cfg.vmax - cfg.vmin) * i / (cfg.steps - 1);
    os << format_double(v) << ',' << format_double(a_v(v)) << '\n';
  }
  return 0;
}

int cmd_vstar(const RunConfig& cfg, std::ostream& out) {
  const VStarResult r = find_v_star(cfg.v_lo, cfg.v_hi, cfg.tol);
  Json doc{{"v_star", r.v_star},
           {"A0", reference_A0()},
           {"A_v_star", r.a_v_star},
           {"iterations", r.iterations}};
  std::ofstream file;
  write_json(open_out(cfg.out, file, out), with_config(std::move(doc), cfg));
  return 0;
}

Field load_h(const std::string& text, const FlatTorus& torus) {
  if (std::filesystem::is_regular_file(text)) {
    Field h = load_field(text, torus.modulus());
    require_same_grid(h, Field::constant(torus, 1.0));
    return h;
  }
  return parse_hspec(text).to_field(torus);
}

int cmd_energy(const RunConfig& cfg, std::ostream& out) {
  const Field u = load_field(cfg.field_path);
  const Field h = load_h(cfg.h_spec, u.torus());
  const EnergyBreakdown e = eval_J(u, h, cfg.eps);
  std::ofstream file;
  write_json(open_out(cfg.out, file, out), with_config(energy_json(e), cfg));
  return 0;
}

Json solve_json(const SolveResult& r, const Field& h) {
  return Json{{"eps", r.energy.eps},
              {"converged", r.converged},
              {"iters", r.iters},
              {"residual", r.residual},
              {"energy", energy_json(r.energy)},
              {"energy_gap_vs_zero", energy_gap_vs_zero(h, r)},
              {"peak_value", r.peak_value},
              {"peak_point", point_json(r.peak_point)},
              {"peak_scale", r.peak_scale},
              {"max_mean_drift", r.max_mean_drift},
              {"stop_reason", r.stop_reason}};
}

std::string default_field_out(const RunConfig& cfg) {
  if (!cfg.field_out.empty()) return cfg.field_out;
  if (cfg.out.empty()) return "";
  std::filesystem::path p(cfg.out);
  p.replace_extension(".u.csv");
  return p.string();
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const FlatTorus torus = torus_of(cfg);
  const Field h = parse_hspec(cfg.h_spec).to_field(torus);
  SolverConfig sc;
  sc.eps = cfg.eps;
  sc.max_iters = cfg.max_iters;
  sc.grad_tol = cfg.grad_tol;
  sc.step = cfg.step;
  sc.seed = cfg.seed;
  sc.amplitude = cfg.amplitude;
  sc.step_rule = cfg.step_rule == "fixed" ? StepRule::fixed
                 : cfg.step_rule == "bb"  ? StepRule::bb
                                          : StepRule::backtracking;
  sc.init = cfg.init == "random" ? InitKind::random
            : cfg.init == "warm" ? InitKind::warm
                                 : InitKind::zero;
  if (sc.init == InitKind::warm) sc.warm = load_field(cfg.warm_path, torus.modulus());

  std::vector<SolveResult> results;
  std::string failure;
  try {
    if (cfg.schedule.empty()) {
      results.push_back(minimize(h, sc));
    } else {
      results = continuation(h, cfg.schedule, sc);
    }
  } catch (const SolverDiverged& e) {
    failure = e.what();
  }

  Json doc;
  const bool converged =
      failure.empty() && !results.empty() &&
      std::all_of(results.begin(), results.end(), [](const SolveResult& r) { return r.converged; });
  doc["converged"] = converged;
  if (!failure.empty()) doc["error"] = failure;
  const std::string field_path = default_field_out(cfg);
  if (!results.empty()) {
    const SolveResult& last = results.back();
    doc["result"] = solve_json(last, h);
    if (!field_path.empty()) save_field(field_path, last.u);
  }
  doc["field"] = field_path.empty() || results.empty() ? Json(nullptr) : Json(field_path);
  if (results.size() > 1) {
    Json stages = Json::array();
    for (const SolveResult& r : results) stages.push_back(solve_json(r, h));
    doc["continuation"] = std::move(stages);
  }
  std::ofstream file;
  write_json(open_out(cfg.out, file, out), with_config(std::move(doc), cfg));
  if (!converged) {
    err << "error: solver did not converge"
        << (failure.empty() ? (results.empty() ? std::string() : ": " + results.back().stop_reason)
                            : ": " + failure)
        << '\n';
    return 3;
  }
  return 0;
}

int cmd_blowup(const RunConfig& cfg, std::ostream& out) {
  const FlatTorus torus = torus_of(cfg);
  const Field h = parse_hspec(cfg.h_spec).to_field(torus);
  const HLocalData hd = h_local_data(h);
  BlowupOptions opts;
  opts.angular_nodes = cfg.angular_nodes;
  const BlowupLab lab(h, hd.p0, opts);
  const auto samples = sweep(lab, log_spaced(cfg.eps_min, cfg.eps_max, cfg.points));
  std::ofstream file;
  std::ostream& os = open_out(cfg.out, file, out);
  os << "eps,J,regressor\n";
  for (const BlowupSample& s : samples) {
    os << format_double(s.eps) << ',' << format_double(s.J) << ',' << format_double(s.regressor)
       << '\n';
  }
  return 0;
}

std::vector<BlowupSample> read_blowup_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("'" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(trim(line));
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(trim(col));
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("'" + path + "' lacks a '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ce = column("eps");
  const std::size_t cj = column("J");
  std::vector<BlowupSample> samples;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument(path + ":" + std::to_string(lineno) + ": '" + cell + "' is not a number");
      }
    }
    if (row.size() != header.size()) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " columns");
    }
    BlowupSample s;
    s.eps = row[ce];
    s.J = row[cj];
    s.regressor = s.eps * -std::log(s.eps);
    samples.push_back(s);
  }
  return samples;
}

int cmd_blowup_fit(const RunConfig& cfg, std::ostream& out) {
  const AsymptoteFit f = fit_asymptote(read_blowup_csv(cfg.in_path), cfg.with_eps);
  Json doc{{"constant", f.constant},
           {"slope", f.slope},
           {"eps_coefficient", f.eps_coefficient},
           {"eps_min", f.eps_min},
           {"eps_max", f.eps_max},
           {"residual", f.residual},
           {"condition", f.condition},
           {"samples", f.samples}};
  std::ofstream file;
  write_json(open_out(cfg.out, file, out), with_config(std::move(doc), cfg));
  return 0;
}

int cmd_mt_check(const RunConfig& cfg, std::ostream& out) {
  const FlatTorus torus = make_torus(cfg.v, 8);
  const double coeff = parse_coefficient(cfg.coeff);
  const double r0 = cfg.r0 > 0.0 ? cfg.r0 : torus.injectivity_radius();
  std::ofstream file;
  std::ostream& os = open_out(cfg.out, file, out);
  os << "delta,ratio,dirichlet\n";
  std::vector<double> deltas = log_spaced(cfg.delta_min, cfg.delta_max, cfg.points);
  std::reverse(deltas.begin(), deltas.end());
  for (double d : deltas) {
    const BubbleFamilySample s = truncated_bubble_sample(torus, d, r0, coeff);
    os << format_double(d) << ',' << format_double(s.ratio) << ',' << format_double(s.dirichlet)
       << '\n';
  }
  return 0;
}

int cmd_condition(const RunConfig& cfg, std::ostream& out) {
  const FlatTorus torus = torus_of(cfg);
  const Field h = parse_hspec(cfg.h_spec).to_field(torus);
  Json doc;
  if (cfg.thm == 31) {
    const double A = a_v(cfg.v);
    const ConditionResult c = check_thm31(h, A);
    doc = Json{{"holds", c.holds}, {"margin", c.margin}, {"A_max", A}, {"A0", reference_A0()}};
  } else {
    const HLocalData hd = h_local_data(h);
    // G is fitted on an integer refinement of the h grid with at least 128
    // points across, so p0 stays a node and the fit annulus is populated.
    const int k = (128 + torus.nx() - 1) / torus.nx();
    const FlatTorus fine = make_torus(torus.modulus(), k * torus.nx(), k * torus.ny());
    const GreenField g = green_field(fine, hd.p0);
    const GreenExpansion e = extract_expansion(g.values, hd.p0);
    const ConditionResult c = check_thm12(hd, e, 0.0);
    doc = Json{{"holds", c.holds},
               {"margin", c.margin},
               {"p0", point_json(hd.p0)},
               {"h_p0", hd.h_p0},
               {"lap_h", hd.lap_h},
               {"b1", e.b1},
               {"b2", e.b2},
               {"max_tie", hd.tie}};
  }
  std::ofstream file;
  write_json(open_out(cfg.out, file, out), with_config(std::move(doc), cfg));
  return 0;
}

[[noreturn]] void invalid(const std::string& msg) { throw InvalidArgument(msg); }

}  // namespace

double parse_coefficient(const std::string& text) {
  const std::string t = trim(text);
  std::string num = t;
  double scale = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    num = t.substr(0, t.size() - 2);
    scale = kPi;
    if (num.empty()) num = "1";
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != num.size() || !(value > 0.0) || !std::isfinite(value)) {
    invalid("coefficient '" + text + "' must be a positive number, optionally suffixed by pi (e.g. 16pi)");
  }
  return value * scale;
}

void validate(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (std::find(kCommands.begin(), kCommands.end(), c) == kCommands.end()) {
    invalid("unknown command '" + c + "'");
  }
  const bool uses_torus = c == "green" || c == "solve" || c == "blowup" || c == "condition" || c == "mt-check";
  if (uses_torus) {
    if (!(cfg.v > 0.0) || !std::isfinite(cfg.v)) {
      std::ostringstream msg;
      msg << "modulus must be positive (got --v " << cfg.v << ")";
      invalid(msg.str());
    }
    if (c != "mt-check") {
      if (cfg.nx < 8 || cfg.nx % 2 != 0) invalid("--nx must be an even integer >= 8");
      if (cfg.ny != 0 && (cfg.ny < 8 || cfg.ny % 2 != 0)) invalid("--ny must be 0 or an even integer >= 8");
    }
  }
  if (c == "solve" || c == "blowup" || c == "condition") parse_hspec(cfg.h_spec);
  if (c == "av") {
    if (!(cfg.vmin > 0.0)) invalid("modulus must be positive (got --vmin)");
    if (cfg.vmax < cfg.vmin) invalid("--vmax must not be below --vmin");
    if (cfg.steps < 1) invalid("--steps must be at least 1");
    if (cfg.steps == 1 && cfg.vmax != cfg.vmin) invalid("--steps 1 needs --vmin equal to --vmax");
  }
  if (c == "vstar") {
    if (!(cfg.tol > 0.0)) invalid("--tol must be positive");
    if (!(cfg.v_lo > 0.0) || !(cfg.v_hi > cfg.v_lo)) invalid("bracket must satisfy 0 < --v-lo < --v-hi");
  }
  if ((c == "energy" || c == "solve") && !(cfg.eps >= 0.0 && cfg.eps < kEightPi)) {
    invalid("--eps must lie in [0, 8 pi)");
  }
  if (c == "solve") {
    if (!cfg.schedule.empty() && cfg.eps != 0.0) invalid("--eps and --schedule conflict; give one of them");
    if (cfg.step_rule != "fixed" && cfg.step_rule != "backtracking" && cfg.step_rule != "bb") {
      invalid("--step-rule must be fixed, backtracking or bb");
    }
    if (cfg.init != "zero" && cfg.init != "random" && cfg.init != "warm") {
      invalid("--init must be zero, random or warm");
    }
    if ((cfg.init == "warm") != !cfg.warm_path.empty()) invalid("--init warm and --warm <file> go together");
    if (cfg.max_iters < 0) invalid("--max-iters must be non-negative");
    if (!(cfg.grad_tol > 0.0)) invalid("--grad-tol must be positive");
    if (!(cfg.step > 0.0)) invalid("--step must be positive");
  }
  if (c == "blowup") {
    if (!(cfg.eps_min > 0.0) || !(cfg.eps_max > cfg.eps_min) || !(cfg.eps_max < std::exp(-1.0))) {
      invalid("need 0 < --eps-min < --eps-max < 1/e");
    }
    if (cfg.points < 2) invalid("--points must be at least 2");
    if (cfg.angular_nodes < 8) invalid("--angular-nodes must be at least 8");
  }
  if (c == "mt-check") {
    if (cfg.family != "bubble") invalid("--family must be bubble");
    parse_coefficient(cfg.coeff);
    if (!(cfg.delta_min > 0.0) || !(cfg.delta_max > cfg.delta_min)) invalid("need 0 < --delta-min < --delta-max");
    if (cfg.points < 2) invalid("--points must be at least 2");
    if (cfg.r0 < 0.0) invalid("--R0 must be non-negative");
  }
  if (c == "condition" && cfg.thm != 31 && cfg.thm != 12) invalid("--thm must be 31 or 12");
}

RunConfig parse_config(const std::vector<std::string>& args) {
  // Separate the command, the config file and the remaining flags.
  std::string command;
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) invalid("--config needs a file path");
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else if (command.empty() && rest.empty() && !a.empty() && a[0] != '-') {
      // Only a leading bare word names the command; later ones are flag values.
      command = a;
    } else {
      rest.push_back(a);
    }
  }

  std::vector<ConfigEntry> file_entries;
  if (!config_path.empty()) {
    file_entries = read_config_file(config_path);
    for (auto it = file_entries.begin(); it != file_entries.end();) {
      if (it->key == "command") {
        if (command.empty()) command = it->value;
        it = file_entries.erase(it);
      } else {
        ++it;
      }
    }
  }

  RunConfig cfg;
  CLI::App app{"meanfield: mean-field equation on flat tori", "meanfield"};
  build_app(app, cfg);

  if (command.empty() && rest.empty()) {
    throw HelpRequested(app.help());
  }
  if (!command.empty() && std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    invalid("unknown command '" + command + "'; expected one of green, av, vstar, energy, solve, "
            "blowup, blowup-fit, mt-check, condition");
  }

  // File values are injected before the command-line flags; with the
  // take-last policy the later flags win.
  std::vector<std::string> argv_tokens;
  if (!command.empty()) argv_tokens.push_back(command);
  if (!command.empty()) {
    CLI::App* sub = app.get_subcommand(command);
    for (const ConfigEntry& e : file_entries) {
      if (sub->get_option_no_throw("--" + e.key) == nullptr) {
        invalid(config_path + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "' for " +
                command + " (see meanfield " + command + " --help)");
      }
      argv_tokens.push_back("--" + e.key + "=" + e.value);
    }
  }
  argv_tokens.insert(argv_tokens.end(), rest.begin(), rest.end());

  // CLI11 consumes arguments from the back.
  std::vector<std::string> reversed(argv_tokens.rbegin(), argv_tokens.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    invalid(msg + " (run with --help for the list of flags)");
  }
  cfg.command = command;
  cfg.config_path = config_path;
  validate(cfg);
  return cfg;
}

Json to_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["v"] = cfg.v;
  j["nx"] = cfg.nx;
  j["ny"] = cfg.ny;
  j["h_spec"] = cfg.h_spec;
  j["px"] = cfg.px;
  j["py"] = cfg.py;
  j["vmin"] = cfg.vmin;
  j["vmax"] = cfg.vmax;
  j["steps"] = cfg.steps;
  j["tol"] = cfg.tol;
  j["v_lo"] = cfg.v_lo;
  j["v_hi"] = cfg.v_hi;
  j["field"] = cfg.field_path;
  j["eps"] = cfg.eps;
  j["schedule"] = cfg.schedule;
  j["max_iters"] = cfg.max_iters;
  j["grad_tol"] = cfg.grad_tol;
  j["step_rule"] = cfg.step_rule;
  j["step"] = cfg.step;
  j["init"] = cfg.init;
  j["seed"] = cfg.seed;
  j["amplitude"] = cfg.amplitude;
  j["warm"] = cfg.warm_path;
  j["field_out"] = cfg.field_out;
  j["eps_min"] = cfg.eps_min;
  j["eps_max"] = cfg.eps_max;
  j["points"] = cfg.points;
  j["angular_nodes"] = cfg.angular_nodes;
  j["in"] = cfg.in_path;
  j["with_eps"] = cfg.with_eps;
  j["family"] = cfg.family;
  j["coeff"] = cfg.coeff;
  j["delta_min"] = cfg.delta_min;
  j["delta_max"] = cfg.delta_max;
  j["R0"] = cfg.r0;
  j["thm"] = cfg.thm;
  j["out"] = cfg.out;
  j["config_file"] = cfg.config_path;
  return j;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    const std::string& c = cfg.command;
    if (c == "green") return cmd_green(cfg, out);
    if (c == "av") return cmd_av(cfg, out);
    if (c == "vstar") return cmd_vstar(cfg, out);
    if (c == "energy") return cmd_energy(cfg, out);
    if (c == "solve") return cmd_solve(cfg, out, err);
    if (c == "blowup") return cmd_blowup(cfg, out);
    if (c == "blowup-fit") return cmd_blowup_fit(cfg, out);
    if (c == "mt-check") return cmd_mt_check(cfg, out);
    return cmd_condition(cfg, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return run(cfg, out, err);
}

}  // namespace meanfield::cli
