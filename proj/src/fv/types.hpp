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

#include <array>
#include <complex>
#include <string>

namespace fv {

using cplx = std::complex<double>;

enum class Phase : int { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kPhases{Phase::A, Phase::B, Phase::C};

/// Bitmask over phases; bit i set means phase i is present.
using PhaseMask = unsigned;

inline constexpr PhaseMask phase_bit(Phase p) {
  return 1u << static_cast<int>(p);
}
inline constexpr bool has_phase(PhaseMask m, Phase p) {
  return (m & phase_bit(p)) != 0;
}
inline constexpr int phase_count(PhaseMask m) {
  return int((m >> 0) & 1u) + int((m >> 1) & 1u) + int((m >> 2) & 1u);
}
inline constexpr int phase_index(Phase p) { return static_cast<int>(p); }

char phase_char(Phase p);
std::string phases_to_string(PhaseMask m);

/// Parses a strict subset of "ABC" (e.g. "A", "AC", "ABC"). Throws Error(parse)
/// on anything else.
PhaseMask parse_phases(const std::string& s);

/// Complex per-phase triple; entries for absent phases stay zero.
using PhaseVec = std::array<cplx, 3>;
using PhaseReal = std::array<double, 3>;

// ANSI step-voltage regulator hardware constants: 32 steps of 5/8 percent.
inline constexpr double kTapStepPu = 0.00625;
inline constexpr int kTapMin = -16;
inline constexpr int kTapMax = 16;

// System power base used for per-unit current and residual reporting.
inline constexpr double kSystemBaseVa = 1.0e6;

/// Unit phasors of the slack source: A at 0, B at -120, C at +120 degrees.
PhaseVec slack_rotations();

}  // namespace fv
