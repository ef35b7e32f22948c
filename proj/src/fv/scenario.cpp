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
#include "fv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "fv/error.hpp"
#include "fv/text.hpp"

namespace fv {

const char* case_name(CaseKind kind) {
  switch (kind) {
    case CaseKind::base:
      return "base";
    case CaseKind::optimal_dispatch:
      return "optimal_dispatch";
    case CaseKind::local_vvc:
      return "local_vvc";
    case CaseKind::supervised:
      return "supervised";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

CaseKind parse_case(const std::string& s, const std::string& file, int lineno) {
  if (s == "base") return CaseKind::base;
  if (s == "optimal_dispatch") return CaseKind::optimal_dispatch;
  if (s == "local_vvc") return CaseKind::local_vvc;
  if (s == "supervised") return CaseKind::supervised;
  parse_fail(file, lineno, "unknown case \"" + s + "\"");
}

CurveMode parse_mode(const std::string& s, const std::string& file,
                     int lineno) {
  if (s == "standard") return CurveMode::standard;
  if (s == "shifted") return CurveMode::shifted;
  if (s == "fitted") return CurveMode::fitted;
  parse_fail(file, lineno, "unknown supervise mode \"" + s + "\"");
}

std::string resolve_path(const std::string& base_file, const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute() || base_file.empty()) return rel;
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

}  // namespace

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open scenario file " + path);

  Scenario s;
  s.path = path;
  bool saw_version = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> t = tokenize(line);
    if (t.empty()) continue;
    const std::string& key = t[0];
    auto want = [&](size_t n) {
      if (t.size() != n + 1)
        parse_fail(path, lineno,
                   key + " expects " + std::to_string(n) + " value(s)");
    };
    if (key == "version") {
      want(1);
      if (parse_int(t[1], path, lineno) != 1)
        parse_fail(path, lineno, "unsupported scenario format version");
      saw_version = true;
    } else if (key == "feeder") {
      want(1);
      s.feeder_path = resolve_path(path, t[1]);
    } else if (key == "profiles") {
      want(1);
      s.profiles_path = resolve_path(path, t[1]);
    } else if (key == "case") {
      want(1);
      s.kind = parse_case(t[1], path, lineno);
    } else if (key == "steps") {
      want(1);
      s.steps = int(parse_int(t[1], path, lineno));
    } else if (key == "resolution_s") {
      want(1);
      s.resolution_s = int(parse_int(t[1], path, lineno));
    } else if (key == "start") {
      want(1);
      s.start = int(parse_int(t[1], path, lineno));
    } else if (key == "band") {
      want(2);
      s.band.v_lower = parse_double(t[1], path, lineno);
      s.band.v_upper = parse_double(t[2], path, lineno);
    } else if (key == "w_mu") {
      want(1);
      s.w_mu = parse_double(t[1], path, lineno);
    } else if (key == "w_theta") {
      want(1);
      s.w_theta = parse_double(t[1], path, lineno);
    } else if (key == "q_step_tol_kvar") {
      want(1);
      s.q_step_tol_kvar = parse_double(t[1], path, lineno);
    } else if (key == "solver_tol") {
      want(1);
      s.solver_tol = parse_double(t[1], path, lineno);
    } else if (key == "solver_max_iter") {
      want(1);
      s.solver_max_iter = int(parse_int(t[1], path, lineno));
    } else if (key == "control_max_rounds") {
      want(1);
      s.control_max_rounds = int(parse_int(t[1], path, lineno));
    } else if (key == "vvc") {
      s.curve = parse_vvc_tokens(t, path, lineno);
    } else if (key == "supervise_mode") {
      want(1);
      s.supervise_mode = parse_mode(t[1], path, lineno);
    } else if (key == "update_period_min") {
      want(1);
      s.update_period_min = int(parse_int(t[1], path, lineno));
    } else if (key == "pv_ratio_threshold") {
      want(1);
      s.pv_ratio_threshold = parse_double(t[1], path, lineno);
    } else if (key == "dvc_bus") {
      want(1);
      s.dvc_bus = t[1];
    } else if (key == "load_profile") {
      want(1);
      s.load_profile_id = t[1];
    } else if (key == "slack_pu") {
      want(1);
      s.slack_pu = parse_double(t[1], path, lineno);
    } else if (key == "seed") {
      want(1);
      s.seed = std::uint64_t(parse_int(t[1], path, lineno));
    } else if (key == "output") {
      want(1);
      s.output_dir = t[1];
    } else {
      parse_fail(path, lineno, "unknown scenario key \"" + key + "\"");
    }
  }
  if (!saw_version)
    fail(ErrorCode::parse, path + ": missing version record");
  if (s.feeder_path.empty())
    fail(ErrorCode::validation, path + ": missing feeder record");
  if (s.steps < 1) fail(ErrorCode::validation, path + ": steps must be >= 1");
  return s;
}

DispatchConfig Scenario::dispatch_config() const {
  DispatchConfig cfg;
  cfg.w_mu = w_mu;
  cfg.w_theta = w_theta;
  cfg.band = band;
  cfg.q_step_tol_kvar = q_step_tol_kvar;
  cfg.solve_tol = solver_tol;
  cfg.solve_max_iter = solver_max_iter;
  cfg.control_max_rounds = control_max_rounds;
  cfg.validate();
  return cfg;
}

std::string Scenario::canonical() const {
  std::string c;
  auto kv = [&](const std::string& k, const std::string& v) {
    c += k;
    c += '=';
    c += v;
    c += ';';
  };
  kv("version", "1");
  kv("feeder", feeder_path);
  kv("profiles", profiles_path);
  kv("case", case_name(kind));
  kv("steps", std::to_string(steps));
  kv("resolution_s", std::to_string(resolution_s));
  kv("start", std::to_string(start));
  kv("band", fmt_double(band.v_lower) + "," + fmt_double(band.v_upper));
  kv("w_mu", fmt_double(w_mu));
  kv("w_theta", fmt_double(w_theta));
  kv("q_step_tol_kvar", fmt_double(q_step_tol_kvar));
  kv("solver_tol", fmt_double(solver_tol));
  kv("solver_max_iter", std::to_string(solver_max_iter));
  kv("control_max_rounds", std::to_string(control_max_rounds));
  kv("vvc", curve ? vvc_record(*curve) : "default");
  kv("supervise_mode", curve_mode_name(supervise_mode));
  kv("update_period_min", std::to_string(update_period_min));
  kv("pv_ratio_threshold", fmt_double(pv_ratio_threshold));
  kv("dvc_bus", dvc_bus);
  kv("load_profile", load_profile_id);
  kv("slack_pu", fmt_double(slack_pu));
  kv("seed", std::to_string(seed));
  return c;
}

std::uint64_t Scenario::config_hash() const { return fnv1a(canonical()); }

ScenarioBundle ScenarioBundle::from(Scenario s) {
  ScenarioBundle b;
  b.model = load_feeder(s.feeder_path);
  if (b.model.dvcs.size() > 1)
    fail(ErrorCode::validation,
         s.feeder_path + ": at most one DVC per feeder is supported");
  if (!s.dvc_bus.empty()) b.model = with_dvc_at(std::move(b.model), s.dvc_bus);
  if (!s.profiles_path.empty()) b.profiles = load_profiles(s.profiles_path);
  b.scenario = std::move(s);
  return b;
}

ScenarioBundle ScenarioBundle::load(const std::string& scenario_path) {
  return from(Scenario::load(scenario_path));
}

namespace {

// Per-step sanity of the horizon against the loaded profiles.
void check_profiles(const ScenarioBundle& b) {
  const Scenario& s = b.scenario;
  auto check = [&](const std::string& id) {
    auto it = b.profiles.find(id);
    if (it == b.profiles.end())
      fail(ErrorCode::validation, "profile \"" + id + "\" not found in " +
                                      s.profiles_path);
    const TimeSeriesProfile& p = it->second;
    if (std::llround(p.resolution_s) != s.resolution_s)
      fail(ErrorCode::validation,
           "profile \"" + id + "\" resolution " +
               fmt_double(p.resolution_s) + " s does not match the scenario (" +
               std::to_string(s.resolution_s) + " s)");
    if (int(p.values.size()) < s.start + s.steps)
      fail(ErrorCode::validation,
           "profile \"" + id + "\" shorter than the scheduling horizon");
  };
  if (!b.model.loads.empty()) check(s.load_profile_id);
  for (const PvSystem& pv : b.model.pvs) check(pv.profile_id);
}

OperatingPoint operating_point_at(const ScenarioBundle& b, int t) {
  const Scenario& s = b.scenario;
  OperatingPoint op;
  op.slack_pu = s.slack_pu;
  op.load_profile_id = s.load_profile_id;
  int idx = s.start + t;
  if (!b.model.loads.empty())
    op.load_mult[s.load_profile_id] =
        b.profiles.at(s.load_profile_id).values[size_t(idx)];
  else
    op.load_mult[s.load_profile_id] = 1.0;
  for (const PvSystem& pv : b.model.pvs)
    op.pv_mult[pv.profile_id] = b.profiles.at(pv.profile_id).values[size_t(idx)];
  return op;
}

int require_dvc(const ScenarioBundle& b) {
  if (b.model.dvcs.empty())
    fail(ErrorCode::validation,
         std::string(case_name(b.scenario.kind)) +
             " case needs a DVC in the feeder (or a dvc_bus record)");
  return 0;
}

struct LocalStep {
  ControlledResult cr;
  PhaseReal q{};
  bool converged = false;
};

// Curve <-> power flow fixpoint for one timestep. Taps restart from op.taps
// every round; the final round's settled taps carry forward.
LocalStep local_control_step(const FeederModel& m, const OperatingPoint& op,
                             int dvc_index,
                             const std::array<const VoltVarCurve*, 3>& curves,
                             PhaseReal q_start, double tol_kvar, int max_rounds,
                             const Scenario& s) {
  const Dvc& dvc = m.dvcs[size_t(dvc_index)];
  PhaseMask bus_ph = m.buses[size_t(dvc.bus)].phases;
  double lim = m.dvc_per_phase_limit_kvar(dvc_index);

  // Damped successive approximation, matching dvc_local_fixpoint: steep
  // curves push the plain iteration's loop gain above one.
  const double relax = 0.5;
  LocalStep out;
  out.q = q_start;
  OperatingPoint probe = op;
  for (int round = 0; round < max_rounds; ++round) {
    probe.dvc_q_kvar[dvc_index] = out.q;
    out.cr = solve_with_controls(m, probe, s.solver_tol, s.solver_max_iter,
                                 s.control_max_rounds);
    PhaseReal cmd{};
    for (Phase p : kPhases) {
      if (!has_phase(bus_ph, p)) continue;
      int pi = phase_index(p);
      double v = out.cr.solved.snapshot.v_mag(dvc.bus, p);
      cmd[size_t(pi)] =
          std::clamp(vvc_evaluate(*curves[size_t(pi)], v), -lim, lim);
    }
    double dq = 0.0;
    for (int pi = 0; pi < 3; ++pi)
      dq = std::max(dq, std::abs(cmd[size_t(pi)] - out.q[size_t(pi)]));
    if (dq < tol_kvar) {
      out.converged = true;
      return out;
    }
    for (int pi = 0; pi < 3; ++pi)
      out.q[size_t(pi)] += relax * (cmd[size_t(pi)] - out.q[size_t(pi)]);
  }
  return out;
}

VoltVarCurve scenario_curve(const ScenarioBundle& b, int dvc_index) {
  if (b.scenario.curve) return *b.scenario.curve;
  return VoltVarCurve::standard_curve(
      b.model.dvc_per_phase_limit_kvar(dvc_index));
}

ScenarioResult run_steps(const ScenarioBundle& b,
                         const CurveSchedule* schedule) {
  const Scenario& s = b.scenario;
  const FeederModel& m = b.model;
  check_profiles(b);
  DispatchConfig cfg = s.dispatch_config();
  cfg.monitored = default_monitored_set(m);

  ScenarioResult result;
  result.monitored = cfg.monitored;
  for (const RegulatorUnit& r : m.regs) result.reg_unit_ids.push_back(r.id);
  result.seed = s.seed;
  result.config_hash = s.config_hash();

  int dvc_index = -1;
  VoltVarCurve local_curve;
  if (s.kind != CaseKind::base) {
    dvc_index = require_dvc(b);
    result.dvc_index = dvc_index;
    result.dvc_bus = m.dvcs[size_t(dvc_index)].bus;
    local_curve = scenario_curve(b, dvc_index);
  }

  std::vector<int> taps(m.regs.size(), 0);
  PhaseReal q_prev{};
  for (int t = 0; t < s.steps; ++t) {
    try {
      OperatingPoint op = operating_point_at(b, t);
      op.taps = taps;
      switch (s.kind) {
        case CaseKind::base: {
          ControlledResult cr = solve_with_controls(
              m, op, s.solver_tol, s.solver_max_iter, s.control_max_rounds);
          taps = cr.taps;
          result.snapshots.push_back(std::move(cr.solved.snapshot));
          result.dvc_q_kvar.push_back(PhaseReal{});
          result.curve_ids.emplace_back();
          break;
        }
        case CaseKind::optimal_dispatch: {
          DispatchResult dr = optimal_dispatch(m, op, taps, cfg, dvc_index);
          taps = dr.taps;
          result.snapshots.push_back(std::move(dr.snapshot));
          result.dvc_q_kvar.push_back(dr.q_star_kvar);
          result.objectives.push_back(dr.objective);
          result.curve_ids.emplace_back();
          break;
        }
        case CaseKind::local_vvc:
        case CaseKind::supervised: {
          std::array<const VoltVarCurve*, 3> curves{
              &local_curve, &local_curve, &local_curve};
          std::string curve_id = "standard";
          if (s.kind == CaseKind::supervised) {
            for (Phase p : kPhases)
              curves[size_t(phase_index(p))] = &schedule->at(t, p, &curve_id);
          }
          LocalStep ls = local_control_step(m, op, dvc_index, curves, q_prev,
                                            1.0, 10, s);
          if (!ls.converged) ++result.fixpoint_warnings;
          taps = ls.cr.taps;
          q_prev = ls.q;
          result.snapshots.push_back(std::move(ls.cr.solved.snapshot));
          result.dvc_q_kvar.push_back(ls.q);
          result.curve_ids.push_back(curve_id);
          break;
        }
      }
      result.snapshots.back().t = t;
      result.taps.push_back(taps);
    } catch (const Error& e) {
      fail(e.code(), "step " + std::to_string(t) + ": " + e.what());
    }
  }
  return result;
}

}  // namespace

std::vector<double> total_load_series_kw(const ScenarioBundle& b) {
  const Scenario& s = b.scenario;
  double nominal = 0.0;
  for (const ZipLoad& L : b.model.loads) nominal += L.p_nominal_kw;
  std::vector<double> out(size_t(s.steps), nominal);
  if (!b.model.loads.empty()) {
    const TimeSeriesProfile& p = b.profiles.at(s.load_profile_id);
    for (int t = 0; t < s.steps; ++t)
      out[size_t(t)] = nominal * p.values[size_t(s.start + t)];
  }
  return out;
}

std::vector<double> total_pv_series_kw(const ScenarioBundle& b) {
  const Scenario& s = b.scenario;
  std::vector<double> out(size_t(s.steps), 0.0);
  for (const PvSystem& pv : b.model.pvs) {
    const TimeSeriesProfile& p = b.profiles.at(pv.profile_id);
    for (int t = 0; t < s.steps; ++t)
      out[size_t(t)] += pv.rated_kw * p.values[size_t(s.start + t)];
  }
  return out;
}

SuperviseArtifacts run_supervised(const ScenarioBundle& bundle, CurveMode mode,
                                  int update_period_min,
                                  const ScenarioResult* reference) {
  if (!valid_update_period(update_period_min))
    fail(ErrorCode::validation,
         "update period must be one of 30, 60, 120, 240 minutes");

  SuperviseArtifacts out;
  if (reference) {
    if (reference->steps() != bundle.scenario.steps ||
        reference->dvc_index < 0)
      fail(ErrorCode::argument,
           "reference run does not match the scenario horizon");
    out.reference = *reference;
  } else {
    ScenarioBundle ref = bundle;
    ref.scenario.kind = CaseKind::optimal_dispatch;
    out.reference = run_scenario(ref);
  }

  int dvc_index = require_dvc(bundle);
  VoltVarCurve standard = scenario_curve(bundle, dvc_index);
  QvTrajectory traj = extract_trajectory(out.reference);
  SegmentLabel labels =
      segment(total_load_series_kw(bundle), total_pv_series_kw(bundle),
              bundle.scenario.pv_ratio_threshold);
  out.schedule = build_schedule(labels, traj, mode, update_period_min,
                                bundle.scenario.resolution_s, standard);

  ScenarioBundle sup = bundle;
  sup.scenario.kind = CaseKind::supervised;
  sup.scenario.supervise_mode = mode;
  sup.scenario.update_period_min = update_period_min;
  out.supervised = run_steps(sup, &out.schedule);
  return out;
}

ScenarioResult run_scenario(const ScenarioBundle& bundle) {
  if (bundle.scenario.kind == CaseKind::supervised) {
    return run_supervised(bundle, bundle.scenario.supervise_mode,
                          bundle.scenario.update_period_min)
        .supervised;
  }
  return run_steps(bundle, nullptr);
}

ScenarioResult run_scenario(const Scenario& scenario) {
  return run_scenario(ScenarioBundle::from(scenario));
}

std::vector<WeightSweepRow> run_weight_sweep(
    const ScenarioBundle& bundle, const std::vector<double>& weights) {
  if (weights.empty()) fail(ErrorCode::argument, "empty weight list");
  std::vector<WeightSweepRow> rows;
  for (double w : weights) {
    ScenarioBundle b = bundle;
    b.scenario.kind = CaseKind::optimal_dispatch;
    b.scenario.w_theta = w;
    ScenarioResult r = run_scenario(b);
    WeightSweepRow row;
    row.w_theta = w;
    row.metrics = score_run(r, b.scenario.dispatch_config());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fv
