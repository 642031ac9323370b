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

#include "meanfield/hspec.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "meanfield/error.hpp"

namespace meanfield {

namespace {

[[noreturn]] void malformed(const std::string& text, const std::string& why) {
  throw InvalidArgument("malformed h spec '" + text + "': " + why +
                        " (expected terms like const:1, cos:ax=0.2, bump:amp,sigma,x0,y0 joined by '+')");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Splits on '+' that separate terms, not on the sign of an exponent or number.
std::vector<std::string> split_terms(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool signlike = i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E' || s[i - 1] == ':' ||
                                    s[i - 1] == ',' || s[i - 1] == '=');
    if (c == '+' && !signlike) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double number(const std::string& text, const std::string& token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    malformed(text, "'" + token + "' is not a number");
  }
  return value;
}

}  // namespace

HSpec parse_hspec(const std::string& text) {
  HSpec spec;
  spec.source = text;
  if (text.empty()) malformed(text, "empty");
  for (const std::string& term : split_terms(text)) {
    if (term.empty()) malformed(text, "empty term");
    const auto colon = term.find(':');
    if (colon == std::string::npos) malformed(text, "term '" + term + "' lacks ':'");
    const std::string kind = term.substr(0, colon);
    const std::string body = term.substr(colon + 1);
    HTerm t;
    if (kind == "const") {
      t.kind = HTerm::Kind::constant;
      t.amplitude = number(text, body);
    } else if (kind == "cos") {
      const auto eq = body.find('=');
      if (eq == std::string::npos) malformed(text, "cos term needs ax=<a> or ay=<a>");
      const std::string axis = body.substr(0, eq);
      if (axis == "ax") {
        t.kind = HTerm::Kind::cos_x;
      } else if (axis == "ay") {
        t.kind = HTerm::Kind::cos_y;
      } else {
        malformed(text, "cos axis must be ax or ay");
      }
      t.amplitude = number(text, body.substr(eq + 1));
    } else if (kind == "bump") {
      const auto parts = split(body, ',');
      if (parts.size() != 4) malformed(text, "bump needs amp,sigma,x0,y0");
      t.kind = HTerm::Kind::bump;
      t.amplitude = number(text, parts[0]);
      t.sigma = number(text, parts[1]);
      t.x0 = number(text, parts[2]);
      t.y0 = number(text, parts[3]);
      if (!(t.sigma > 0.0)) malformed(text, "bump sigma must be positive");
    } else {
      malformed(text, "unknown term kind '" + kind + "'");
    }
    spec.terms.push_back(t);
  }
  return spec;
}

double HSpec::operator()(const FlatTorus& torus, double x, double y) const {
  const double v = torus.modulus();
  double sum = 0.0;
  for (const HTerm& t : terms) {
    switch (t.kind) {
      case HTerm::Kind::constant:
        sum += t.amplitude;
        break;
      case HTerm::Kind::cos_x:
        sum += t.amplitude * std::cos(kTwoPi * x);
        break;
      case HTerm::Kind::cos_y:
        sum += t.amplitude * std::cos(kTwoPi * y / v);
        break;
      case HTerm::Kind::bump: {
        // Sum over nearby lattice images keeps the bump smooth and periodic.
        const Vec2 d = torus.displacement(Point{t.x0, t.y0}, Point{x, y});
        double s = 0.0;
        for (int m = -2; m <= 2; ++m) {
          for (int n = -2; n <= 2; ++n) {
            const double dx = d.x + m;
            const double dy = d.y + n * v;
            const double r2 = (dx * dx + dy * dy) / v;
            s += std::exp(-r2 / (2.0 * t.sigma * t.sigma));
          }
        }
        sum += t.amplitude * s;
        break;
      }
    }
  }
  return sum;
}

Field HSpec::to_field(const FlatTorus& torus) const {
  Field h = Field::from_function(torus, [&](double x, double y) { return (*this)(torus, x, y); });
  if (!(h.min() > 0.0)) {
    std::ostringstream msg;
    msg << "h spec '" << source << "' is not positive everywhere (min " << h.min() << ")";
    throw InvalidArgument(msg.str());
  }
  return h;
}

}  // namespace meanfield
