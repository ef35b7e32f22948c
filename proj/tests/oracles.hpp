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

// Independent reference implementations the test suite checks the engine
// against. Nothing here shares solver code with the library: the power-flow
// oracle is a dense Newton-Raphson on the full nodal equations, the control
// oracles are exhaustive enumerations.

#include <vector>

#include "fv/dispatch.hpp"
#include "fv/feeder.hpp"
#include "fv/powerflow.hpp"

namespace fvtest {

/// Dense Newton-Raphson on the complex nodal current equations. Supports
/// lines, ZIP loads, capacitors, PV and constant-Q DVC injections; regulator
/// edges are out of scope (the fixtures do not use them). Returns per-unit
/// voltages shaped like the engine's snapshots.
fv::VoltageSnapshot newton_oracle(const fv::FeederModel& model,
                                  const fv::OperatingPoint& op,
                                  double tol_amps = 1e-9, int max_iter = 60);

/// Largest per-phase voltage difference (pu) between two snapshots.
double max_voltage_diff(const fv::VoltageSnapshot& a,
                        const fv::VoltageSnapshot& b);

/// Closed-form receiving-end voltage of a single-phase two-bus feeder with a
/// constant-power load: |V2| from the biquadratic in |V2|^2, angle from the
/// complex drop equation. v1 is the sending voltage (volts LN, angle 0).
fv::cplx two_bus_constant_power_voltage(double v1, fv::cplx z_ohm,
                                        double p_w, double q_var);

/// First in-band tap in movement order, starting from `tap0` and stepping
/// one position at a time toward the regulator band, re-solving at each
/// position. Mirrors the physical raise/lower sequence.
int tap_enumeration_oracle(const fv::FeederModel& model,
                           const fv::OperatingPoint& op, int unit_index,
                           int tap0);

/// Exhaustive grid search over a single phase's DVC injection on a fixed
/// 1 kVAR lattice (endpoints included), scoring each point exactly like the
/// dispatcher: combined objective, ties to the smaller magnitude.
struct GridSearchResult {
  double q_kvar = 0.0;
  double combined = 0.0;
  double f_mu = 0.0;
  long long f_theta = 0;
};
GridSearchResult dispatch_grid_oracle(const fv::FeederModel& model,
                                      const fv::OperatingPoint& op,
                                      const std::vector<int>& taps_prev,
                                      const fv::DispatchConfig& cfg,
                                      fv::Phase phase, double grid_step_kvar,
                                      int dvc_index = 0);

}  // namespace fvtest
