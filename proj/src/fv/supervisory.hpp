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

#include <span>
#include <string>
#include <vector>

#include "fv/run_record.hpp"
#include "fv/vvc.hpp"

namespace fv {

/// One optimal (voltage, injection) sample at the DVC bus.
struct QvPoint {
  double v_pu = 0.0;
  double q_kvar = 0.0;
};

/// Per-phase optimal Q-V trajectory of a dispatch run; one point per
/// timestep on each phase the DVC covers.
struct QvTrajectory {
  std::array<std::vector<QvPoint>, 3> phase;
  PhaseMask phases = 0;
};

/// Pairs the settled DVC-bus voltage with the dispatched injection for every
/// timestep. The run must carry DVC records.
QvTrajectory extract_trajectory(const ScenarioResult& run);

/// Per-timestep low/high PV tags: high when total PV output exceeds
/// `threshold` times the total load, strictly.
struct SegmentLabel {
  std::vector<char> high_pv;  // 1 = high-PV timestep
  double threshold = 0.25;
};

SegmentLabel segment(const std::vector<double>& load_kw,
                     const std::vector<double>& pv_kw, double threshold);

/// Shifts the dead band of `base` to [mean(v) - 0.02, mean(v) + 0.02],
/// keeping both slopes (outer-band widths) of the base curve.
VoltVarCurve shift_curve(const VoltVarCurve& base,
                         std::span<const QvPoint> window);

/// Ordinary least squares line through the window's (v, q) points, clamped
/// to non-positive slope and evaluated with saturation at +-q_lim. Windows
/// with identical voltages fall back to shift_curve on `shift_base`; a
/// positive fitted slope is clamped to zero (constant mean injection) and
/// reported through `clamped` when given.
VoltVarCurve fit_curve(std::span<const QvPoint> window, double q_lim_kvar,
                       const VoltVarCurve& shift_base,
                       bool* clamped = nullptr);

/// Volt/VAR curves scheduled over one horizon: contiguous high-PV stretches
/// are tiled by update-period windows carrying curves built from the optimal
/// trajectory of the same window; every low-PV timestep uses the standard
/// curve.
struct CurveSchedule {
  struct Window {
    int t0 = 0, t1 = 0;  // [t0, t1)
    std::array<VoltVarCurve, 3> curve;
    std::string id;
  };
  std::vector<Window> windows;
  VoltVarCurve standard;
  int update_period_min = 120;

  /// Active curve for phase p at step t plus its identifier.
  const VoltVarCurve& at(int t, Phase p, std::string* id = nullptr) const;
};

/// Builds the schedule for `mode` from the reference trajectory. Windows
/// shorter than min_fit_points fall back from fitted to shifted curves.
CurveSchedule build_schedule(const SegmentLabel& labels,
                             const QvTrajectory& trajectory, CurveMode mode,
                             int update_period_min, int resolution_s,
                             const VoltVarCurve& standard,
                             int min_fit_points = 10);

/// Valid supervisory update periods, minutes.
bool valid_update_period(int minutes);

}  // namespace fv
