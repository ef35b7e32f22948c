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
#include "fv/supervisory.hpp"

#include <algorithm>
#include <cmath>

#include "fv/error.hpp"

namespace fv {

QvTrajectory extract_trajectory(const ScenarioResult& run) {
  if (run.dvc_index < 0 || run.dvc_bus < 0)
    fail(ErrorCode::argument, "run lacks DVC records");
  QvTrajectory out;
  if (run.snapshots.empty()) return out;
  for (Phase p : kPhases) {
    // A phase is part of the trajectory when the DVC bus carries it.
    if (std::abs(run.snapshots[0].v_pu[size_t(run.dvc_bus)]
                               [size_t(phase_index(p))]) > 0.0)
      out.phases |= phase_bit(p);
  }
  for (size_t t = 0; t < run.snapshots.size(); ++t) {
    for (Phase p : kPhases) {
      if (!has_phase(out.phases, p)) continue;
      int pi = phase_index(p);
      out.phase[size_t(pi)].push_back(
          {run.snapshots[t].v_mag(run.dvc_bus, p),
           run.dvc_q_kvar[t][size_t(pi)]});
    }
  }
  return out;
}

SegmentLabel segment(const std::vector<double>& load_kw,
                     const std::vector<double>& pv_kw, double threshold) {
  if (load_kw.size() != pv_kw.size())
    fail(ErrorCode::argument, "load and pv series must be equally long");
  if (!(threshold > 0.0))
    fail(ErrorCode::argument, "segmentation threshold must be positive");
  SegmentLabel out;
  out.threshold = threshold;
  out.high_pv.resize(load_kw.size());
  for (size_t t = 0; t < load_kw.size(); ++t) {
    if (!(load_kw[t] > 0.0))
      fail(ErrorCode::validation,
           "non-positive load sample at step " + std::to_string(t));
    out.high_pv[t] = pv_kw[t] / load_kw[t] > threshold ? 1 : 0;
  }
  return out;
}

namespace {

double mean_v(std::span<const QvPoint> window) {
  double s = 0.0;
  for (const QvPoint& p : window) s += p.v_pu;
  return s / double(window.size());
}

}  // namespace

VoltVarCurve shift_curve(const VoltVarCurve& base,
                         std::span<const QvPoint> window) {
  if (window.empty()) fail(ErrorCode::argument, "empty trajectory window");
  base.validate();
  double v_ref = mean_v(window);
  VoltVarCurve c = base;
  c.mode = CurveMode::shifted;
  c.v2 = v_ref - 0.02;
  c.v3 = v_ref + 0.02;
  // Keeping m1 = q_lim / (v2 - v1) and m2 = q_lim / (v4 - v3) keeps the
  // outer-band widths of the base curve.
  c.v1 = c.v2 - (base.v2 - base.v1);
  c.v4 = c.v3 + (base.v4 - base.v3);
  c.validate();
  return c;
}

VoltVarCurve fit_curve(std::span<const QvPoint> window, double q_lim_kvar,
                       const VoltVarCurve& shift_base, bool* clamped) {
  if (clamped) *clamped = false;
  if (window.size() < 2)
    fail(ErrorCode::argument, "curve fit needs at least two points");
  double vbar = 0.0, qbar = 0.0;
  for (const QvPoint& p : window) {
    vbar += p.v_pu;
    qbar += p.q_kvar;
  }
  vbar /= double(window.size());
  qbar /= double(window.size());
  double sxx = 0.0, sxy = 0.0;
  for (const QvPoint& p : window) {
    sxx += (p.v_pu - vbar) * (p.v_pu - vbar);
    sxy += (p.v_pu - vbar) * (p.q_kvar - qbar);
  }
  if (sxx <= 0.0) return shift_curve(shift_base, window);

  VoltVarCurve c;
  c.mode = CurveMode::fitted;
  c.q_lim_kvar = q_lim_kvar;
  double slope = sxy / sxx;
  if (slope > 0.0) {
    if (clamped) *clamped = true;
    c.slope = 0.0;
    c.v_center = vbar;
    c.q_offset = std::clamp(qbar, -q_lim_kvar, q_lim_kvar);
  } else {
    c.slope = slope;
    // The line q = slope * (v - v_center) through the OLS centroid.
    c.v_center = vbar - qbar / slope;
  }
  // Informational breakpoints: saturation crossings of the fitted line.
  if (c.slope < 0.0) {
    c.v1 = c.v_center - q_lim_kvar / (-c.slope);
    c.v4 = c.v_center + q_lim_kvar / (-c.slope);
  } else {
    c.v1 = c.v4 = c.v_center;
  }
  c.v2 = c.v3 = c.v_center;
  c.validate();
  return c;
}

const VoltVarCurve& CurveSchedule::at(int t, Phase p, std::string* id) const {
  for (const Window& w : windows) {
    if (t >= w.t0 && t < w.t1) {
      if (id) *id = w.id;
      return w.curve[size_t(phase_index(p))];
    }
  }
  if (id) *id = "standard";
  return standard;
}

bool valid_update_period(int minutes) {
  return minutes == 30 || minutes == 60 || minutes == 120 || minutes == 240;
}

CurveSchedule build_schedule(const SegmentLabel& labels,
                             const QvTrajectory& trajectory, CurveMode mode,
                             int update_period_min, int resolution_s,
                             const VoltVarCurve& standard,
                             int min_fit_points) {
  if (!valid_update_period(update_period_min))
    fail(ErrorCode::validation,
         "update period must be one of 30, 60, 120, 240 minutes");
  standard.validate();

  CurveSchedule sched;
  sched.standard = standard;
  sched.update_period_min = update_period_min;
  int period_steps =
      std::max(1, update_period_min * 60 / std::max(1, resolution_s));

  size_t n = labels.high_pv.size();
  for (size_t t = 0; t < n;) {
    if (!labels.high_pv[t]) {
      ++t;
      continue;
    }
    size_t run_end = t;
    while (run_end < n && labels.high_pv[run_end]) ++run_end;
    for (size_t w0 = t; w0 < run_end; w0 += size_t(period_steps)) {
      size_t w1 = std::min(w0 + size_t(period_steps), run_end);
      CurveSchedule::Window win;
      win.t0 = int(w0);
      win.t1 = int(w1);
      win.id = std::string(curve_mode_name(mode)) + "@" + std::to_string(w0);
      for (Phase p : kPhases) {
        int pi = phase_index(p);
        VoltVarCurve& slot = win.curve[size_t(pi)];
        if (mode == CurveMode::standard || !has_phase(trajectory.phases, p)) {
          slot = standard;
          continue;
        }
        std::span<const QvPoint> slice(
            trajectory.phase[size_t(pi)].data() + w0, w1 - w0);
        if (mode == CurveMode::shifted) {
          slot = shift_curve(standard, slice);
        } else {
          if (slice.size() < size_t(min_fit_points))
            slot = shift_curve(standard, slice);
          else
            slot = fit_curve(slice, standard.q_lim_kvar, standard);
        }
      }
      sched.windows.push_back(std::move(win));
    }
    t = run_end;
  }
  return sched;
}

}  // namespace fv
