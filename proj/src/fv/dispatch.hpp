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

#include "fv/powerflow.hpp"
#include "fv/types.hpp"

namespace fv {

struct ScenarioResult;

struct VoltageBand {
  double v_lower = 0.98;
  double v_upper = 1.03;
  void validate() const;
};

/// One monitored voltage point.
struct BusPhase {
  int bus = -1;
  Phase phase = Phase::A;
};

/// All node-phases except buses touching a regulator (the regulated nodes are
/// not scored, they are actuators).
std::vector<BusPhase> default_monitored_set(const FeederModel& model);

struct DispatchConfig {
  double w_mu = 1.0;
  double w_theta = 0.05;
  VoltageBand band;
  double q_step_tol_kvar = 1.0;
  std::vector<BusPhase> monitored;  // empty = default_monitored_set(model)

  double solve_tol = 1e-6;
  int solve_max_iter = 50;
  int control_max_rounds = 20;

  void validate() const;
};

/// Objective of one operating point. f_mu sums the band violations over the
/// monitored set and phases; f_theta counts tap steps moved relative to the
/// previous timestep, one count per regulator unit (a gang-operated bank
/// counts once).
struct ObjectiveValue {
  double f_mu = 0.0;
  double f_theta = 0.0;
  double combined = 0.0;
  PhaseReal f_mu_phase{};
};

/// Per-phase voltage-violation magnitude: sum over monitored nodes of the
/// excess above the upper limit plus the shortfall below the lower limit.
PhaseReal objective_f_mu(const VoltageSnapshot& snapshot,
                         const std::vector<BusPhase>& monitored,
                         const VoltageBand& band);

/// Per-phase tap movement between two tap vectors; a unit spanning several
/// phases contributes its movement to each of them. Sizes must match.
PhaseReal objective_f_theta(const FeederModel& model,
                            const std::vector<int>& taps_now,
                            const std::vector<int>& taps_prev);

/// Total tap steps moved, each regulator unit counted once.
long long tap_steps_total(const std::vector<int>& taps_now,
                          const std::vector<int>& taps_prev);

struct DispatchResult {
  PhaseReal q_star_kvar{};
  ObjectiveValue objective;
  VoltageSnapshot snapshot;
  std::vector<int> taps;
  int probes = 0;
};

/// Per-timestep optimal DVC dispatch: coordinate descent over phases A, B, C;
/// each phase's injection found by a coarse 9-point scan plus an interval
/// search down to q_step_tol, every probe scored by a controlled power flow
/// started from taps_prev. Zero injection is always a candidate, so the
/// returned objective never exceeds the q = 0 objective. Ties resolve toward
/// the smaller injection magnitude.
DispatchResult optimal_dispatch(const FeederModel& model,
                                const OperatingPoint& op_t,
                                const std::vector<int>& taps_prev,
                                const DispatchConfig& cfg, int dvc_index = 0);

/// Counts of monitored voltage points per band bin plus per-regulator tap
/// movement over a whole run. The three bins always partition total_points.
struct MetricsReport {
  long long v_out_lower = 0;
  long long v_in = 0;
  long long v_out_upper = 0;
  long long total_points = 0;
  std::array<long long, 3> phase_out_lower{};
  std::array<long long, 3> phase_in{};
  std::array<long long, 3> phase_out_upper{};
  std::array<long long, 3> phase_points{};
  std::map<std::string, long long> tap_changes;  // regulator unit id -> steps

  long long tap_total() const;
  double out_of_band_share() const;
};

MetricsReport score_run(const ScenarioResult& result, const DispatchConfig& cfg);

}  // namespace fv
