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
#include "fv/types.hpp"

#include <cmath>
#include <numbers>

#include "fv/error.hpp"

namespace fv {

char phase_char(Phase p) {
  switch (p) {
    case Phase::A:
      return 'A';
    case Phase::B:
      return 'B';
    case Phase::C:
      return 'C';
  }
  return '?';
}

std::string phases_to_string(PhaseMask m) {
  std::string out;
  for (Phase p : kPhases) {
    if (has_phase(m, p)) out.push_back(phase_char(p));
  }
  return out;
}

PhaseMask parse_phases(const std::string& s) {
  PhaseMask m = 0;
  for (char c : s) {
    Phase p;
    switch (c) {
      case 'A':
      case 'a':
        p = Phase::A;
        break;
      case 'B':
      case 'b':
        p = Phase::B;
        break;
      case 'C':
      case 'c':
        p = Phase::C;
        break;
      default:
        fail(ErrorCode::parse, "invalid phase letter '" + std::string(1, c) +
                                   "' in \"" + s + "\"");
    }
    if (has_phase(m, p))
      fail(ErrorCode::parse, "duplicate phase letter in \"" + s + "\"");
    m |= phase_bit(p);
  }
  if (m == 0) fail(ErrorCode::parse, "empty phase set");
  return m;
}

PhaseVec slack_rotations() {
  const double third = 2.0 * std::numbers::pi / 3.0;
  return PhaseVec{cplx(1.0, 0.0), std::polar(1.0, -third),
                  std::polar(1.0, third)};
}

}  // namespace fv
