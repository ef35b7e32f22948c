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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fv/dispatch.hpp"
#include "fv/feeder.hpp"
#include "fv/run_record.hpp"
#include "fv/supervisory.hpp"
#include "fv/vvc.hpp"

namespace fv {

enum class CaseKind { base, optimal_dispatch, local_vvc, supervised };

const char* case_name(CaseKind kind);

/// One simulation configuration: feeder, profiles, horizon, the case to run
/// and its knobs. Loaded from a version-stamped key-value file; paths inside
/// the file resolve relative to the file's directory.
struct Scenario {
  std::string path;  // file it was loaded from, "" when built in memory
  std::string feeder_path;
  std::string profiles_path;
  CaseKind kind = CaseKind::base;
  int steps = 0;
  int resolution_s = 60;
  int start = 0;

  double w_mu = 1.0;
  double w_theta = 0.05;
  VoltageBand band;
  double q_step_tol_kvar = 1.0;
  double solver_tol = 1e-6;
  int solver_max_iter = 50;
  int control_max_rounds = 20;

  std::optional<VoltVarCurve> curve;  // local-control VV-C; default standard
  CurveMode supervise_mode = CurveMode::fitted;
  int update_period_min = 120;
  double pv_ratio_threshold = 0.25;

  std::string dvc_bus;  // empty = feeder file's own placement
  std::string load_profile_id = "load";
  double slack_pu = 1.0;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  static Scenario load(const std::string& path);

  DispatchConfig dispatch_config() const;
  std::string canonical() const;
  std::uint64_t config_hash() const;
};

/// Scenario with its inputs materialized (feeder validated, DVC moved to the
/// scenario bus, profiles loaded).
struct ScenarioBundle {
  Scenario scenario;
  FeederModel model;
  std::map<std::string, TimeSeriesProfile> profiles;

  static ScenarioBundle load(const std::string& scenario_path);
  static ScenarioBundle from(Scenario s);
};

/// Steps the horizon: profile multipliers, case-dependent control (optimal
/// dispatch, local VV-C fixpoint, or scheduled curves), a controlled power
/// flow per step, tap state chained across steps. Errors are annotated with
/// the timestep.
ScenarioResult run_scenario(const ScenarioBundle& bundle);
ScenarioResult run_scenario(const Scenario& scenario);

/// Total feeder load / PV real power over the horizon, kW at nominal
/// voltage, used for PV-ratio time segmentation.
std::vector<double> total_load_series_kw(const ScenarioBundle& bundle);
std::vector<double> total_pv_series_kw(const ScenarioBundle& bundle);

struct SuperviseArtifacts {
  ScenarioResult reference;  // the optimal-dispatch run the curves come from
  ScenarioResult supervised;
  CurveSchedule schedule;
};

/// Supervisory run: optimal-dispatch reference over the same horizon
/// (perfect-foresight convention), per-window curves per `mode`, then a
/// local-control run under the scheduled curves. An already-computed
/// reference run for the same scenario may be passed to skip re-running it.
SuperviseArtifacts run_supervised(const ScenarioBundle& bundle, CurveMode mode,
                                  int update_period_min,
                                  const ScenarioResult* reference = nullptr);

struct WeightSweepRow {
  double w_theta = 0.0;
  MetricsReport metrics;
};

/// Optimal-dispatch runs over a list of tap-change weights, scored with the
/// bundle's band.
std::vector<WeightSweepRow> run_weight_sweep(const ScenarioBundle& bundle,
                                             const std::vector<double>& weights);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace fv
