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

#include <iosfwd>
#include <optional>
#include <string>

#include "meanfield/torus.hpp"

namespace meanfield {

// CSV layout: header "x,y,value", then one row per node in row-major order
// (x index outer).  The modulus is recovered from the y spacing unless given.
void write_field_csv(std::ostream& os, const Field& f);
Field read_field_csv(std::istream& is, std::optional<double> modulus = std::nullopt);

// JSON layout: {"v": ..., "nx": ..., "ny": ..., "values": [...]}.
void write_field_json(std::ostream& os, const Field& f);
Field read_field_json(std::istream& is);

/// Dispatch on the file extension (.csv or .json).
void save_field(const std::string& path, const Field& f);
Field load_field(const std::string& path, std::optional<double> modulus = std::nullopt);

}  // namespace meanfield
