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
#include "fv/vvc.hpp"

#include <algorithm>
#include <cmath>

#include "fv/error.hpp"
#include "fv/text.hpp"

namespace fv {

const char* curve_mode_name(CurveMode m) {
  switch (m) {
    case CurveMode::standard:
      return "standard";
    case CurveMode::shifted:
      return "shifted";
    case CurveMode::fitted:
      return "fitted";
  }
  return "?";
}

void VoltVarCurve::validate() const {
  if (!(q_lim_kvar > 0.0))
    fail(ErrorCode::validation, "VV-C q_lim must be positive");
  if (mode == CurveMode::fitted) {
    if (slope > 0.0)
      fail(ErrorCode::validation, "fitted VV-C slope must be non-positive");
    return;
  }
  if (!(v1 < v2 && v2 <= v3 && v3 < v4))
    fail(ErrorCode::validation,
         "VV-C breakpoints must satisfy v1 < v2 <= v3 < v4");
}

VoltVarCurve VoltVarCurve::standard_curve(double q_lim_kvar, double v1,
                                          double v2, double v3, double v4) {
  VoltVarCurve c;
  c.mode = CurveMode::standard;
  c.v1 = v1;
  c.v2 = v2;
  c.v3 = v3;
  c.v4 = v4;
  c.q_lim_kvar = q_lim_kvar;
  c.validate();
  return c;
}

double vvc_evaluate(const VoltVarCurve& curve, double v_pu) {
  double lim = curve.q_lim_kvar;
  if (curve.mode == CurveMode::fitted) {
    double q = curve.q_offset + curve.slope * (v_pu - curve.v_center);
    return std::clamp(q, -lim, lim);
  }
  if (v_pu <= curve.v1) return lim;
  if (v_pu < curve.v2) return lim * (curve.v2 - v_pu) / (curve.v2 - curve.v1);
  if (v_pu <= curve.v3) return 0.0;
  if (v_pu < curve.v4) return -lim * (v_pu - curve.v3) / (curve.v4 - curve.v3);
  return -lim;
}

DvcState dvc_apply(const DvcState& state, const VoltageSnapshot& snapshot,
                   PhaseMask bus_phases) {
  if (!state.active_curve)
    fail(ErrorCode::argument, "dvc_apply requires an active curve");
  DvcState out = state;
  for (Phase p : kPhases) {
    int pi = phase_index(p);
    if (!has_phase(bus_phases, p)) {
      out.q_kvar[size_t(pi)] = 0.0;
      continue;
    }
    double q = vvc_evaluate(*state.active_curve, snapshot.v_mag(state.bus, p));
    out.q_kvar[size_t(pi)] =
        std::clamp(q, -state.q_limit_per_phase_kvar,
                   state.q_limit_per_phase_kvar);
  }
  return out;
}

LocalControlResult dvc_local_fixpoint(const FeederModel& model,
                                      const OperatingPoint& op, int dvc_index,
                                      const VoltVarCurve& curve,
                                      const PhaseReal& q_start,
                                      double tol_kvar, int max_rounds,
                                      double solve_tol, int solve_max_iter,
                                      int control_max_rounds) {
  const Dvc& dvc = model.dvcs.at(size_t(dvc_index));
  PhaseMask bus_phases = model.buses[size_t(dvc.bus)].phases;

  LocalControlResult out;
  out.state.bus = dvc.bus;
  out.state.q_kvar = q_start;
  out.state.q_limit_per_phase_kvar = model.dvc_per_phase_limit_kvar(dvc_index);
  out.state.active_curve = curve;

  // Damped successive approximation: steep curves make the plain curve ->
  // power-flow iteration a loop with gain above one, the relaxation factor
  // keeps it contracting toward the (unique) droop/network intersection.
  const double relax = 0.5;
  OperatingPoint probe = op;
  for (int round = 0; round < max_rounds; ++round) {
    probe.dvc_q_kvar[dvc_index] = out.state.q_kvar;
    out.solved = solve_with_controls(model, probe, solve_tol, solve_max_iter,
                                     control_max_rounds);
    out.rounds = round + 1;
    DvcState cmd = dvc_apply(out.state, out.solved.solved.snapshot, bus_phases);
    double dq = 0.0;
    for (int pi = 0; pi < 3; ++pi)
      dq = std::max(dq, std::abs(cmd.q_kvar[size_t(pi)] -
                                 out.state.q_kvar[size_t(pi)]));
    if (dq < tol_kvar) {
      out.converged = true;
      return out;
    }
    for (int pi = 0; pi < 3; ++pi)
      out.state.q_kvar[size_t(pi)] +=
          relax * (cmd.q_kvar[size_t(pi)] - out.state.q_kvar[size_t(pi)]);
  }
  out.converged = false;
  return out;
}

VoltVarCurve parse_vvc_tokens(const std::vector<std::string>& tokens,
                              const std::string& file, int lineno) {
  if (tokens.size() < 7)
    parse_fail(file, lineno, "vvc record expects at least 6 fields");
  VoltVarCurve c;
  const std::string& mode = tokens[1];
  if (mode == "standard") {
    c.mode = CurveMode::standard;
  } else if (mode == "shifted") {
    c.mode = CurveMode::shifted;
  } else if (mode == "fitted") {
    c.mode = CurveMode::fitted;
  } else {
    parse_fail(file, lineno, "unknown vvc mode \"" + mode + "\"");
  }
  c.v1 = parse_double(tokens[2], file, lineno);
  c.v2 = parse_double(tokens[3], file, lineno);
  c.v3 = parse_double(tokens[4], file, lineno);
  c.v4 = parse_double(tokens[5], file, lineno);
  c.q_lim_kvar = parse_double(tokens[6], file, lineno);
  if (c.mode == CurveMode::fitted) {
    if (tokens.size() < 9)
      parse_fail(file, lineno, "fitted vvc record expects slope and v_center");
    c.slope = parse_double(tokens[7], file, lineno);
    c.v_center = parse_double(tokens[8], file, lineno);
    if (tokens.size() > 9) c.q_offset = parse_double(tokens[9], file, lineno);
    if (tokens.size() > 10) parse_fail(file, lineno, "trailing vvc fields");
  } else if (tokens.size() > 7) {
    parse_fail(file, lineno, "slope/v_center only apply to fitted vvc records");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    parse_fail(file, lineno, e.what());
  }
  return c;
}

std::string vvc_record(const VoltVarCurve& curve) {
  std::string s = "vvc ";
  s += curve_mode_name(curve.mode);
  for (double v : {curve.v1, curve.v2, curve.v3, curve.v4, curve.q_lim_kvar})
    s += " " + fmt_double(v);
  if (curve.mode == CurveMode::fitted) {
    s += " " + fmt_double(curve.slope);
    s += " " + fmt_double(curve.v_center);
    if (curve.q_offset != 0.0) s += " " + fmt_double(curve.q_offset);
  }
  return s;
}

}  // namespace fv
