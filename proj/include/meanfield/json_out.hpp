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

// Deterministic JSON emission.  Documents are built as nlohmann::ordered_json
// (so keys keep insertion order) and serialized with every double printed to
// 17 significant digits, making repeated runs byte-identical.

#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace meanfield {

using Json = nlohmann::ordered_json;

/// Two-space indented; non-finite numbers become null.
std::string dump_json(const Json& doc);
void write_json(std::ostream& os, const Json& doc);

/// %.17g, the form used for numbers in both JSON and CSV output.
std::string format_double(double x);

}  // namespace meanfield
