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

#include <optional>
#include <string>
#include <vector>

#include "fv/powerflow.hpp"
#include "fv/types.hpp"

namespace fv {

enum class CurveMode { standard, shifted, fitted };

const char* curve_mode_name(CurveMode m);

/// Piecewise-linear Volt/VAR law. Positive output is reactive injection
/// (voltage support). standard/shifted use the four breakpoints; fitted is a
/// clamped line q = q_offset + slope * (v - v_center). q_offset is only
/// nonzero for the degenerate fit whose slope was clamped to zero.
struct VoltVarCurve {
  CurveMode mode = CurveMode::standard;
  double v1 = 0.92;
  double v2 = 0.98;
  double v3 = 1.02;
  double v4 = 1.08;
  double q_lim_kvar = 0.0;  // per phase
  double slope = 0.0;       // fitted only, kVAR per pu, <= 0
  double v_center = 1.0;    // fitted only
  double q_offset = 0.0;    // fitted only

  void validate() const;  // throws Error(validation)

  static VoltVarCurve standard_curve(double q_lim_kvar, double v1 = 0.92,
                                     double v2 = 0.98, double v3 = 1.02,
                                     double v4 = 1.08);
};

/// Reactive state of one DVC. active_curve empty means the device is under
/// optimal dispatch rather than local control.
struct DvcState {
  int bus = -1;
  PhaseReal q_kvar{};  // signed, + = injection
  double q_limit_per_phase_kvar = 0.0;
  std::optional<VoltVarCurve> active_curve;
};

/// Exact piecewise law: +q_lim below v1, linear to 0 at v2, dead band to v3,
/// linear to -q_lim at v4, -q_lim beyond. Fitted curves evaluate the clamped
/// line. Total over v > 0.
double vvc_evaluate(const VoltVarCurve& curve, double v_pu);

/// One local-control update: per phase independently, the commanded Q from
/// the active curve at the DVC bus voltage. The caller is responsible for
/// re-solving and iterating to the fixpoint.
DvcState dvc_apply(const DvcState& state, const VoltageSnapshot& snapshot,
                   PhaseMask bus_phases);

struct LocalControlResult {
  DvcState state;
  ControlledResult solved;
  int rounds = 0;
  bool converged = false;
};

/// Local-control fixpoint: apply-curve / re-solve until the command changes
/// by less than tol_kvar on every phase (default 1 kVAR, 10 rounds). Taps
/// restart from op.taps in every round; the last round's settled taps win.
LocalControlResult dvc_local_fixpoint(const FeederModel& model,
                                      const OperatingPoint& op, int dvc_index,
                                      const VoltVarCurve& curve,
                                      const PhaseReal& q_start,
                                      double tol_kvar = 1.0,
                                      int max_rounds = 10,
                                      double solve_tol = 1e-6,
                                      int solve_max_iter = 50,
                                      int control_max_rounds = 20);

/// Scenario-file record: vvc <mode> <v1> <v2> <v3> <v4> <q_lim>
/// [slope v_center [offset]]. `tokens` excludes nothing (tokens[0] == "vvc").
VoltVarCurve parse_vvc_tokens(const std::vector<std::string>& tokens,
                              const std::string& file, int lineno);
std::string vvc_record(const VoltVarCurve& curve);

}  // namespace fv
