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
#include "feedervolt.h"

#include <cstring>
#include <string>

#include "fv/error.hpp"
#include "fv/placement.hpp"
#include "fv/profiles_gen.hpp"
#include "fv/reports.hpp"
#include "fv/run_record.hpp"
#include "fv/scenario.hpp"
#include "fv/text.hpp"

struct fv_model {
  fv::FeederModel m;
};

struct fv_scenario {
  fv::Scenario s;
};

struct fv_result {
  fv::ScenarioResult r;
  fv::MetricsReport metrics;
};

namespace {

thread_local std::string g_last_error;

fv_status to_status(fv::ErrorCode code) {
  switch (code) {
    case fv::ErrorCode::io:
      return FV_ERR_IO;
    case fv::ErrorCode::parse:
      return FV_ERR_PARSE;
    case fv::ErrorCode::validation:
      return FV_ERR_VALIDATION;
    case fv::ErrorCode::numerical:
      return FV_ERR_NUMERICAL;
    case fv::ErrorCode::argument:
      return FV_ERR_ARGUMENT;
  }
  return FV_ERR_ARGUMENT;
}

template <typename Fn>
fv_status guarded(Fn&& fn) {
  try {
    fn();
    return FV_OK;
  } catch (const fv::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FV_ERR_NUMERICAL;
  }
}

fv_status need(bool ok, const char* what) {
  if (ok) return FV_OK;
  g_last_error = std::string("null ") + what;
  return FV_ERR_ARGUMENT;
}

fv::MetricsReport score_with_scenario(const fv::ScenarioResult& r,
                                      const fv::Scenario& s) {
  return fv::score_run(r, s.dispatch_config());
}

fv_result* wrap_result(fv::ScenarioResult r, const fv::Scenario& s) {
  auto* out = new fv_result{std::move(r), {}};
  out->metrics = score_with_scenario(out->r, s);
  return out;
}

}  // namespace

extern "C" {

const char* fv_status_name(fv_status status) {
  switch (status) {
    case FV_OK:
      return "ok";
    case FV_ERR_IO:
      return "io";
    case FV_ERR_PARSE:
      return "parse";
    case FV_ERR_VALIDATION:
      return "validation";
    case FV_ERR_NUMERICAL:
      return "numerical";
    case FV_ERR_ARGUMENT:
      return "argument";
  }
  return "unknown";
}

const char* fv_last_error(void) { return g_last_error.c_str(); }

const char* fv_version(void) { return "1.0.0"; }

fv_status fv_model_load(const char* path, fv_model** out) {
  if (fv_status st = need(path && out, "argument"); st != FV_OK) return st;
  return guarded([&] { *out = new fv_model{fv::load_feeder(path)}; });
}

void fv_model_free(fv_model* model) { delete model; }

int fv_model_bus_count(const fv_model* model) {
  return model ? int(model->m.buses.size()) : 0;
}

int fv_model_regulator_count(const fv_model* model) {
  return model ? int(model->m.regs.size()) : 0;
}

int fv_model_zone_count(const fv_model* model) {
  return model ? model->m.zone_count() : 0;
}

int fv_model_bus_zone(const fv_model* model, const char* bus_id) {
  if (!model || !bus_id) return -1;
  int b = model->m.bus_index(bus_id);
  return b < 0 ? -1 : model->m.buses[size_t(b)].zone_id;
}

fv_status fv_scenario_load(const char* path, fv_scenario** out) {
  if (fv_status st = need(path && out, "argument"); st != FV_OK) return st;
  return guarded([&] { *out = new fv_scenario{fv::Scenario::load(path)}; });
}

fv_status fv_scenario_set(fv_scenario* scenario, const char* key,
                          const char* value) {
  if (fv_status st = need(scenario && key && value, "argument"); st != FV_OK)
    return st;
  return guarded([&] {
    // Reuse the file parser: rewrite the scenario with one overriding line.
    std::string line = std::string(key) + " " + value;
    fv::Scenario& s = scenario->s;
    std::vector<std::string> toks = fv::tokenize(line);
    if (toks.empty()) fv::fail(fv::ErrorCode::argument, "empty override");
    const std::string& k = toks[0];
    const std::string ctx = "<override>";
    auto one = [&](const std::string& what) -> std::string {
      if (toks.size() != 2)
        fv::fail(fv::ErrorCode::argument, what + " expects one value");
      return toks[1];
    };
    if (k == "case") {
      std::string v = one(k);
      if (v == "base")
        s.kind = fv::CaseKind::base;
      else if (v == "optimal_dispatch")
        s.kind = fv::CaseKind::optimal_dispatch;
      else if (v == "local_vvc")
        s.kind = fv::CaseKind::local_vvc;
      else if (v == "supervised")
        s.kind = fv::CaseKind::supervised;
      else
        fv::fail(fv::ErrorCode::argument, "unknown case \"" + v + "\"");
    } else if (k == "steps") {
      s.steps = int(fv::parse_int(one(k), ctx, 0));
    } else if (k == "start") {
      s.start = int(fv::parse_int(one(k), ctx, 0));
    } else if (k == "w_mu") {
      s.w_mu = fv::parse_double(one(k), ctx, 0);
    } else if (k == "w_theta") {
      s.w_theta = fv::parse_double(one(k), ctx, 0);
    } else if (k == "dvc_bus") {
      s.dvc_bus = one(k);
    } else if (k == "seed") {
      s.seed = std::uint64_t(fv::parse_int(one(k), ctx, 0));
    } else if (k == "output") {
      s.output_dir = one(k);
    } else if (k == "supervise_mode") {
      std::string v = one(k);
      if (v == "standard")
        s.supervise_mode = fv::CurveMode::standard;
      else if (v == "shifted")
        s.supervise_mode = fv::CurveMode::shifted;
      else if (v == "fitted")
        s.supervise_mode = fv::CurveMode::fitted;
      else
        fv::fail(fv::ErrorCode::argument, "unknown mode \"" + v + "\"");
    } else if (k == "update_period_min") {
      s.update_period_min = int(fv::parse_int(one(k), ctx, 0));
    } else if (k == "band") {
      if (toks.size() != 3)
        fv::fail(fv::ErrorCode::argument, "band expects two values");
      s.band.v_lower = fv::parse_double(toks[1], ctx, 0);
      s.band.v_upper = fv::parse_double(toks[2], ctx, 0);
    } else {
      fv::fail(fv::ErrorCode::argument,
               "key \"" + k + "\" cannot be overridden");
    }
  });
}

fv_status fv_scenario_get(const fv_scenario* scenario, const char* key,
                          char* buf, size_t buf_len) {
  if (fv_status st = need(scenario && key && buf && buf_len > 0, "argument");
      st != FV_OK)
    return st;
  return guarded([&] {
    const fv::Scenario& s = scenario->s;
    std::string k(key), v;
    if (k == "case")
      v = fv::case_name(s.kind);
    else if (k == "output")
      v = s.output_dir;
    else if (k == "steps")
      v = std::to_string(s.steps);
    else if (k == "seed")
      v = std::to_string(s.seed);
    else if (k == "supervise_mode")
      v = fv::curve_mode_name(s.supervise_mode);
    else if (k == "update_period_min")
      v = std::to_string(s.update_period_min);
    else
      fv::fail(fv::ErrorCode::argument, "key \"" + k + "\" is not readable");
    if (v.size() + 1 > buf_len)
      fv::fail(fv::ErrorCode::argument, "buffer too small");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

void fv_scenario_free(fv_scenario* scenario) { delete scenario; }

fv_status fv_run(const fv_scenario* scenario, fv_result** out) {
  if (fv_status st = need(scenario && out, "argument"); st != FV_OK) return st;
  return guarded([&] {
    fv::ScenarioResult r = fv::run_scenario(scenario->s);
    *out = wrap_result(std::move(r), scenario->s);
  });
}

void fv_result_free(fv_result* result) { delete result; }

int fv_result_steps(const fv_result* result) {
  return result ? result->r.steps() : 0;
}

long long fv_result_metric(const fv_result* result, fv_metric metric) {
  if (!result) return -1;
  const fv::MetricsReport& m = result->metrics;
  switch (metric) {
    case FV_METRIC_V_OUT_LOWER:
      return m.v_out_lower;
    case FV_METRIC_V_IN:
      return m.v_in;
    case FV_METRIC_V_OUT_UPPER:
      return m.v_out_upper;
    case FV_METRIC_TOTAL_POINTS:
      return m.total_points;
    case FV_METRIC_TAP_TOTAL:
      return m.tap_total();
    case FV_METRIC_FIXPOINT_WARNINGS:
      return result->r.fixpoint_warnings;
  }
  return -1;
}

long long fv_result_metric_phase(const fv_result* result, fv_metric metric,
                                 int phase) {
  if (!result || phase < 0 || phase > 2) return -1;
  const fv::MetricsReport& m = result->metrics;
  size_t p = size_t(phase);
  switch (metric) {
    case FV_METRIC_V_OUT_LOWER:
      return m.phase_out_lower[p];
    case FV_METRIC_V_IN:
      return m.phase_in[p];
    case FV_METRIC_V_OUT_UPPER:
      return m.phase_out_upper[p];
    case FV_METRIC_TOTAL_POINTS:
      return m.phase_points[p];
    default:
      return -1;
  }
}

fv_status fv_result_write_reports(const fv_result* result,
                                  const fv_scenario* scenario,
                                  const char* label, const char* out_dir) {
  if (fv_status st = need(result && scenario && label && out_dir, "argument");
      st != FV_OK)
    return st;
  return guarded([&] {
    fv::emit_reports(result->r, scenario->s.dispatch_config(), label, out_dir);
  });
}

fv_status fv_place(const fv_scenario* scenario, int zone, int k,
                   const char* csv_path, char* winner_buf,
                   size_t winner_buf_len) {
  if (fv_status st = need(scenario && winner_buf && winner_buf_len > 0,
                          "argument");
      st != FV_OK)
    return st;
  return guarded([&] {
    fv::ScenarioBundle bundle = fv::ScenarioBundle::from(scenario->s);
    fv::ScenarioBundle base = bundle;
    base.scenario.kind = fv::CaseKind::base;
    fv::ScenarioResult base_run = fv::run_scenario(base);
    if (zone < 0) zone = fv::most_variable_zone(base_run, bundle.model);
    fv::CandidateRanking ranking =
        fv::rank_candidates(base_run, bundle.model, zone, k);
    std::vector<std::string> candidates;
    for (const auto& e : ranking.entries) candidates.push_back(e.bus);
    fv::PlacementReport report = fv::evaluate_placements(bundle, candidates);
    if (csv_path && *csv_path) fv::emit_placement_csv(report, csv_path);
    if (report.winner.size() + 1 > winner_buf_len)
      fv::fail(fv::ErrorCode::argument, "winner buffer too small");
    std::memcpy(winner_buf, report.winner.c_str(), report.winner.size() + 1);
  });
}

fv_status fv_supervise(const fv_scenario* scenario, const char* mode,
                       int period_min, const char* curves_path,
                       fv_result** supervised_out, fv_result** reference_out) {
  if (fv_status st = need(scenario && mode && supervised_out, "argument");
      st != FV_OK)
    return st;
  return guarded([&] {
    fv::CurveMode m;
    std::string ms(mode);
    if (ms == "standard")
      m = fv::CurveMode::standard;
    else if (ms == "shifted")
      m = fv::CurveMode::shifted;
    else if (ms == "fitted")
      m = fv::CurveMode::fitted;
    else
      fv::fail(fv::ErrorCode::argument, "unknown mode \"" + ms + "\"");

    fv::ScenarioBundle bundle = fv::ScenarioBundle::from(scenario->s);
    fv::SuperviseArtifacts art = fv::run_supervised(bundle, m, period_min);
    if (curves_path && *curves_path) {
      fv::PhaseMask ph =
          bundle.model.buses[size_t(art.supervised.dvc_bus)].phases;
      fv::emit_curve_records(art.schedule, ph, curves_path);
    }
    *supervised_out = wrap_result(std::move(art.supervised), scenario->s);
    if (reference_out)
      *reference_out = wrap_result(std::move(art.reference), scenario->s);
  });
}

fv_status fv_sweep(const fv_scenario* scenario, const double* weights, int n,
                   const char* csv_path) {
  if (fv_status st = need(scenario && weights && n > 0 && csv_path,
                          "argument");
      st != FV_OK)
    return st;
  return guarded([&] {
    fv::ScenarioBundle bundle = fv::ScenarioBundle::from(scenario->s);
    std::vector<double> w(weights, weights + n);
    std::vector<fv::WeightSweepRow> rows = fv::run_weight_sweep(bundle, w);
    fv::emit_sweep_csv(rows, csv_path);
  });
}

fv_status fv_gen_profiles(const char* day_type, uint64_t seed,
                          const char* out_path) {
  if (fv_status st = need(day_type && out_path, "argument"); st != FV_OK)
    return st;
  return guarded([&] {
    fv::DayProfiles day = fv::generate_synthetic_profiles(day_type, seed);
    fv::write_profiles_csv(day, out_path);
  });
}

}  // extern "C"
