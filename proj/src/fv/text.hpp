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
#pragma once

#include <string>
#include <vector>

#include "fv/types.hpp"

namespace fv {

/// Splits a record line on whitespace; a '#' starts a comment.
std::vector<std::string> tokenize(const std::string& line);

[[noreturn]] void parse_fail(const std::string& file, int lineno,
                             const std::string& msg);

double parse_double(const std::string& tok, const std::string& file,
                    int lineno);
long long parse_int(const std::string& tok, const std::string& file,
                    int lineno);

/// Impedance entry of the form r+jx or r-jx, e.g. "0.4576+j1.078".
cplx parse_complex(const std::string& tok, const std::string& file,
                   int lineno);

/// Fixed shortest-ish decimal rendering used in every emitted file, so that
/// identical doubles always serialize to identical bytes.
std::string fmt_double(double v);

}  // namespace fv
