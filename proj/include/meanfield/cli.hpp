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

// Command-line front end.  Each subcommand maps onto one library operation and
// writes CSV or JSON; every JSON document embeds the resolved RunConfig.
//
// A config file (--config path) holds `key = value` lines, keys being long
// flag names without the dashes; '#' starts a comment.  Flags given on the
// command line override the file.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanfield/json_out.hpp"

namespace meanfield::cli {

struct RunConfig {
  std::string command;

  // Torus and data.
  double v = 1.0;
  int nx = 128;
  /// 0 picks ny so that the grid is isotropic.
  int ny = 0;
  std::string h_spec = "const:1";

  // green
  double px = 0.0;
  double py = 0.0;

  // av
  double vmin = 1.0;
  double vmax = 5.0;
  int steps = 9;

  // vstar
  double tol = 1e-10;
  double v_lo = 1.0;
  double v_hi = 10.0;

  // energy
  std::string field_path;

  // solve
  double eps = 0.0;
  std::vector<double> schedule;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  std::string step_rule = "backtracking";
  double step = 1.0;
  std::string init = "zero";
  std::uint64_t seed = 0;
  double amplitude = 0.1;
  std::string warm_path;
  std::string field_out;

  // blowup, blowup-fit
  double eps_min = 1e-10;
  double eps_max = 1e-4;
  int points = 13;
  int angular_nodes = 64;
  std::string in_path;
  bool with_eps = false;

  // mt-check
  std::string family = "bubble";
  std::string coeff = "16pi";
  double delta_min = 1e-4;
  double delta_max = 1e-1;
  /// 0 means the injectivity radius.
  double r0 = 0.0;

  // condition
  int thm = 31;

  std::string out;
  std::string config_path;
};

/// Raised by parse_config for --help; carries the help text.
struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses argv (without the program name).  Throws InvalidArgument for
/// unknown flags, malformed values and conflicting options.
RunConfig parse_config(const std::vector<std::string>& args);

/// Command-specific checks, also run by parse_config.
void validate(const RunConfig& cfg);

Json to_json(const RunConfig& cfg);

/// Exit code: 0 success, 2 validation error, 3 numerical non-convergence.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_config followed by run, with errors reported on err.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "16pi", "17pi", "8.5pi" or a plain number.
double parse_coefficient(const std::string& text);

}  // namespace meanfield::cli
