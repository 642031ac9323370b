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

// A small language for prescribing h, terms joined by '+':
//
//   const:c                 c
//   cos:ax=a                a cos(2 pi x)
//   cos:ay=a                a cos(2 pi y / v)
//   bump:amp,sigma,x0,y0    amp exp(-|z - z0|^2 / (2 sigma^2)), periodized,
//                           with |.| the geodesic distance and (x0, y0) in the
//                           fundamental domain [0,1) x [0,v)
//
// e.g. "const:1+cos:ax=0.2".

#pragma once

#include <string>
#include <vector>

#include "meanfield/torus.hpp"

namespace meanfield {

struct HTerm {
  enum class Kind { constant, cos_x, cos_y, bump };
  Kind kind = Kind::constant;
  double amplitude = 0.0;
  double sigma = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
};

struct HSpec {
  std::vector<HTerm> terms;
  std::string source;

  [[nodiscard]] double operator()(const FlatTorus& torus, double x, double y) const;
  /// Sampled on the grid; throws InvalidArgument unless the result is positive.
  [[nodiscard]] Field to_field(const FlatTorus& torus) const;
};

/// Throws InvalidArgument with a one-line message on malformed input.
HSpec parse_hspec(const std::string& text);

}  // namespace meanfield
