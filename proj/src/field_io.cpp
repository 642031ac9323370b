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

#include "meanfield/field_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "meanfield/error.hpp"

namespace meanfield {

namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_field_csv(std::ostream& os, const Field& f) {
  const FlatTorus& t = f.torus();
  os << "x,y,value\n";
  for (int i = 0; i < t.nx(); ++i) {
    for (int j = 0; j < t.ny(); ++j) {
      const Point p = t.node(i, j);
      os << fmt17(p.x) << ',' << fmt17(p.y) << ',' << fmt17(f.at(i, j)) << '\n';
    }
  }
}

Field read_field_csv(std::istream& is, std::optional<double> modulus) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty field CSV");
  if (line.rfind("x,y,value", 0) != 0) throw InvalidArgument("field CSV must start with header x,y,value");

  std::vector<double> xs, ys, vals;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw InvalidArgument("malformed field CSV row: " + line);
    }
    xs.push_back(std::stod(a));
    ys.push_back(std::stod(b));
    vals.push_back(std::stod(c));
  }
  const std::set<double> ux(xs.begin(), xs.end());
  const std::set<double> uy(ys.begin(), ys.end());
  const int nx = static_cast<int>(ux.size());
  const int ny = static_cast<int>(uy.size());
  if (static_cast<std::size_t>(nx) * ny != vals.size()) {
    throw InvalidArgument("field CSV is not a full tensor grid");
  }
  double v = 0.0;
  if (modulus) {
    v = *modulus;
  } else {
    if (ny < 2) throw InvalidArgument("cannot infer modulus from a single y row");
    v = (*std::next(uy.begin()) - *uy.begin()) * ny;
  }
  FlatTorus torus(v, nx, ny, false);
  // Reorder defensively in case rows are not in the canonical order.
  std::vector<double> out(vals.size());
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const int i = static_cast<int>(std::lround(xs[k] * nx));
    const int j = static_cast<int>(std::lround(ys[k] / torus.hy()));
    if (i < 0 || i >= nx || j < 0 || j >= ny) throw InvalidArgument("field CSV node off the grid");
    out[torus.index(i, j)] = vals[k];
  }
  return Field(torus, std::move(out));
}

void write_field_json(std::ostream& os, const Field& f) {
  const FlatTorus& t = f.torus();
  os << "{\"v\": " << fmt17(t.modulus()) << ", \"nx\": " << t.nx() << ", \"ny\": " << t.ny()
     << ", \"values\": [";
  auto v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) os << ", ";
    os << fmt17(v[k]);
  }
  os << "]}\n";
}

Field read_field_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
    FlatTorus torus(j.at("v").get<double>(), j.at("nx").get<int>(), j.at("ny").get<int>(), false);
    return Field(torus, j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed field JSON: ") + e.what());
  }
}

void save_field(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  if (ends_with(path, ".json")) {
    write_field_json(os, f);
  } else {
    write_field_csv(os, f);
  }
}

Field load_field(const std::string& path, std::optional<double> modulus) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open field file " + path);
  if (ends_with(path, ".json")) return read_field_json(is);
  return read_field_csv(is, modulus);
}

}  // namespace meanfield
