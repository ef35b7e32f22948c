/* Copyright 2026 feedervolt authors
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
#include "fv/text.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "fv/error.hpp"

namespace fv {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        toks.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

void parse_fail(const std::string& file, int lineno, const std::string& msg) {
  fail(ErrorCode::parse, file + ":" + std::to_string(lineno) + ": " + msg);
}

double parse_double(const std::string& tok, const std::string& file,
                    int lineno) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    parse_fail(file, lineno, "expected a number, got \"" + tok + "\"");
  return v;
}

long long parse_int(const std::string& tok, const std::string& file,
                    int lineno) {
  char* end = nullptr;
  long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    parse_fail(file, lineno, "expected an integer, got \"" + tok + "\"");
  return v;
}

cplx parse_complex(const std::string& tok, const std::string& file,
                   int lineno) {
  auto bad = [&]() -> cplx {
    parse_fail(file, lineno, "expected r+jx impedance, got \"" + tok + "\"");
  };
  size_t j = tok.find('j');
  if (j == std::string::npos || j == 0) return bad();
  char sign = tok[j - 1];
  if (sign != '+' && sign != '-') return bad();
  std::string rs = tok.substr(0, j - 1);
  std::string xs = tok.substr(j + 1);
  if (rs.empty() || xs.empty()) return bad();
  char* end = nullptr;
  double r = std::strtod(rs.c_str(), &end);
  if (end == rs.c_str() || *end != '\0') return bad();
  double x = std::strtod(xs.c_str(), &end);
  if (end == xs.c_str() || *end != '\0') return bad();
  return {r, sign == '-' ? -x : x};
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace fv
