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

#include <map>
#include <string>
#include <vector>

#include "fv/feeder.hpp"
#include "fv/types.hpp"

namespace fv {

/// One operating point of the feeder: profile multipliers, tap positions and
/// DVC injections. Multiplier maps left empty mean "nominal" (1.0 for every
/// profile).
struct OperatingPoint {
  std::map<std::string, double> load_mult;  // profile id -> pu
  std::map<std::string, double> pv_mult;    // profile id -> pu
  std::string load_profile_id = "load";     // profile all ZIP loads follow
  std::vector<int> taps;                    // per regulator unit; empty = neutral
  std::map<int, PhaseReal> dvc_q_kvar;      // dvc index -> per-phase kVAR, + = injection
  double slack_pu = 1.0;

  double load_multiplier() const;
  double pv_multiplier(const std::string& profile_id) const;
};

/// Complex node voltages of one solved operating point, per-unit on each
/// bus's line-to-neutral base. Absent phases stay zero.
struct VoltageSnapshot {
  std::vector<PhaseVec> v_pu;
  int t = -1;

  double v_mag(int bus, Phase p) const {
    return std::abs(v_pu[size_t(bus)][size_t(phase_index(p))]);
  }
};

struct SolveResult {
  VoltageSnapshot snapshot;
  int iterations = 0;
  double residual_pu = 0.0;  // worst per-node current mismatch
};

struct ControlledResult {
  SolveResult solved;
  std::vector<int> taps;  // settled, per regulator unit
  int rounds = 0;
  int tap_moves = 0;
};

/// Solves the unbalanced power flow by backward current summation / forward
/// voltage drop sweeps on the radial tree, with full per-phase mutual
/// coupling. Taps are held at op.taps. Throws Error(numerical) when the
/// sweep has not converged after max_iter iterations.
SolveResult solve(const FeederModel& model, const OperatingPoint& op,
                  double tol = 1e-6, int max_iter = 50);

/// solve() plus regulator action: each unit may move one tap step per round
/// toward its band, units stepping source-to-load, until no unit moves.
/// Throws Error(numerical) naming the regulator still hunting when the round
/// limit is reached.
ControlledResult solve_with_controls(const FeederModel& model,
                                     const OperatingPoint& op,
                                     double tol = 1e-6, int max_iter = 50,
                                     int control_max_rounds = 20);

/// Per-unit regulator ratio at an integer tap position.
inline double tap_ratio(int tap) { return 1.0 + kTapStepPu * double(tap); }

/// ZIP power drawn by a load at voltage magnitude v_pu, in watts/vars.
/// Below the cutoff voltage the whole load reverts to constant impedance,
/// continuous at the cutoff.
cplx zip_power_w(const ZipLoad& load, double multiplier, double v_pu);

}  // namespace fv
