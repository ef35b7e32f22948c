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
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "fv/error.hpp"
#include "fv/profiles_gen.hpp"
#include "fv/reports.hpp"
#include "fv/scenario.hpp"

using namespace fv;

namespace {

Scenario mini_scenario(CaseKind kind, int steps, int start,
                       const std::string& day = "cloudy") {
  Scenario s;
  s.feeder_path = fvtest::data_file("mini13.fdr");
  s.profiles_path = fvtest::data_file("profiles_" + day + ".csv");
  s.kind = kind;
  s.steps = steps;
  s.start = start;
  s.seed = 1;
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario file: full parse with defaults") {
  Scenario s = Scenario::load(fvtest::data_file("scenarios/mini_cloudy.scn"));
  CHECK(s.kind == CaseKind::optimal_dispatch);
  CHECK(s.steps == 1440);
  CHECK(s.resolution_s == 60);
  CHECK(s.band.v_lower == 0.98);
  CHECK(s.band.v_upper == 1.03);
  CHECK(s.w_theta == 0.05);
  CHECK(s.dvc_bus == "m5");
  CHECK(s.update_period_min == 120);
  // Relative paths resolve against the scenario file directory.
  CHECK(std::filesystem::exists(s.feeder_path));
  CHECK(std::filesystem::exists(s.profiles_path));
}

TEST_CASE("scenario file: unknown key and missing version rejected") {
  std::string bad1 = fvtest::write_temp("bad1.scn",
                                        "version 1\nfeeder x\nsteps 10\n"
                                        "frobnicate 3\n");
  CHECK_THROWS_WITH_AS(Scenario::load(bad1), doctest::Contains("frobnicate"),
                       Error);
  std::string bad2 = fvtest::write_temp("bad2.scn", "feeder x\nsteps 10\n");
  CHECK_THROWS_WITH_AS(Scenario::load(bad2), doctest::Contains("version"),
                       Error);
}

TEST_CASE("base case wiring: record sizes and no DVC rows") {
  ScenarioBundle b = ScenarioBundle::from(mini_scenario(CaseKind::base, 60,
                                                        1000));
  ScenarioResult r = run_scenario(b);
  CHECK(r.steps() == 60);
  CHECK(r.dvc_index == -1);
  CHECK(r.taps.size() == 60);
  for (const PhaseReal& q : r.dvc_q_kvar)
    for (double v : q) CHECK(v == 0.0);
  MetricsReport m = score_run(r, b.scenario.dispatch_config());
  CHECK(m.v_out_lower + m.v_in + m.v_out_upper == m.total_points);
  CHECK(m.total_points == 60 * 23);  // monitored node-phases of mini13
}

TEST_CASE("optimal dispatch never scores below the base case on a sagging "
          "slice") {
  ScenarioBundle base_b =
      ScenarioBundle::from(mini_scenario(CaseKind::base, 45, 1150));
  ScenarioBundle disp_b =
      ScenarioBundle::from(mini_scenario(CaseKind::optimal_dispatch, 45, 1150));
  MetricsReport base = score_run(run_scenario(base_b),
                                 base_b.scenario.dispatch_config());
  MetricsReport disp = score_run(run_scenario(disp_b),
                                 disp_b.scenario.dispatch_config());
  CHECK(disp.v_in >= base.v_in);
}

TEST_CASE("local control case records curve ids and chains device state") {
  ScenarioBundle b =
      ScenarioBundle::from(mini_scenario(CaseKind::local_vvc, 30, 1150));
  ScenarioResult r = run_scenario(b);
  CHECK(r.dvc_index == 0);
  for (const std::string& id : r.curve_ids) CHECK(id == "standard");
  CHECK(r.fixpoint_warnings == 0);
}

TEST_CASE("supervised standard mode is inert: identical to plain local "
          "control") {
  ScenarioBundle local =
      ScenarioBundle::from(mini_scenario(CaseKind::local_vvc, 120, 660));
  ScenarioResult lr = run_scenario(local);

  ScenarioBundle sup =
      ScenarioBundle::from(mini_scenario(CaseKind::supervised, 120, 660));
  SuperviseArtifacts art = run_supervised(sup, CurveMode::standard, 120);

  ScenarioResult sr = art.supervised;
  REQUIRE(sr.steps() == lr.steps());
  // Same voltages, taps and injections step for step (metadata like the
  // config hash and curve labels legitimately differ).
  ScenarioResult lr2 = lr, sr2 = sr;
  lr2.config_hash = sr2.config_hash = 0;
  lr2.curve_ids = sr2.curve_ids = {};
  CHECK(lr2.canonical_bytes() == sr2.canonical_bytes());
}

TEST_CASE("supervised fitted mode runs and tiles only high-PV windows") {
  ScenarioBundle sup =
      ScenarioBundle::from(mini_scenario(CaseKind::supervised, 180, 630));
  SuperviseArtifacts art = run_supervised(sup, CurveMode::fitted, 60);
  CHECK(!art.schedule.windows.empty());
  for (const auto& w : art.schedule.windows) {
    CHECK(w.t1 > w.t0);
    CHECK(w.t1 - w.t0 <= 60);
  }
  CHECK(art.supervised.steps() == 180);
  CHECK(art.reference.steps() == 180);
  // The trajectory length matches the horizon per phase.
  QvTrajectory traj = extract_trajectory(art.reference);
  CHECK(traj.phase[0].size() == 180);
}

TEST_CASE("tap state chains across steps: replaying a step from the prior "
          "settle reproduces the record") {
  ScenarioBundle b =
      ScenarioBundle::from(mini_scenario(CaseKind::base, 8, 1100));
  ScenarioResult r = run_scenario(b);
  REQUIRE(r.steps() == 8);
  for (int t = 1; t < r.steps(); ++t) {
    OperatingPoint op;
    op.load_mult["load"] =
        b.profiles.at("load").values[size_t(b.scenario.start + t)];
    op.pv_mult["pv"] =
        b.profiles.at("pv").values[size_t(b.scenario.start + t)];
    op.taps = r.taps[size_t(t - 1)];
    ControlledResult replay = solve_with_controls(b.model, op);
    CHECK(replay.taps == r.taps[size_t(t)]);
    for (size_t i = 0; i < replay.solved.snapshot.v_pu.size(); ++i)
      for (int pi = 0; pi < 3; ++pi)
        CHECK(replay.solved.snapshot.v_pu[i][size_t(pi)] ==
              r.snapshots[size_t(t)].v_pu[i][size_t(pi)]);
  }
}

TEST_CASE("scenario file drives a supervised run end to end") {
  std::string scn = fvtest::write_temp(
      "sup.scn",
      "version 1\n"
      "feeder " + fvtest::data_file("mini13.fdr") + "\n" +
      "profiles " + fvtest::data_file("profiles_cloudy.csv") + "\n" +
      "case supervised\n"
      "supervise_mode shifted\n"
      "update_period_min 60\n"
      "steps 90\n"
      "start 660\n");
  ScenarioResult r = run_scenario(Scenario::load(scn));
  CHECK(r.steps() == 90);
  CHECK(r.dvc_index == 0);
  bool saw_window_curve = false;
  for (const std::string& id : r.curve_ids)
    if (id.rfind("shifted@", 0) == 0) saw_window_curve = true;
  CHECK(saw_window_curve);
}

TEST_CASE("horizon beyond the profiles is rejected with a validation error") {
  Scenario s = mini_scenario(CaseKind::base, 100, 1400);
  ScenarioBundle b = ScenarioBundle::from(s);
  CHECK_THROWS_WITH_AS(run_scenario(b), doctest::Contains("horizon"), Error);
}

TEST_CASE("run errors carry the timestep index") {
  // A feeder that oscillates under control: the failure names the step.
  std::string path = fvtest::write_temp(
      "step_err.fdr",
      "bus src A 4.16\n"
      "bus b1 A 4.16\n"
      "bus b2 A 4.16\n"
      "line src b1 A 1.0 0.83+j0.84\n"
      "reg b1 b2 A 0.0001 1.0\n"
      "load b2 A 300 140 0.24 0.36 0.40 0.24 0.36 0.40 0.80\n");
  Scenario s;
  s.feeder_path = path;
  s.profiles_path = fvtest::data_file("profiles_cloudy.csv");
  s.kind = CaseKind::base;
  s.steps = 5;
  s.start = 1200;
  try {
    run_scenario(ScenarioBundle::from(s));
    FAIL("expected oscillation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numerical);
    CHECK(std::string(e.what()).find("step ") != std::string::npos);
    CHECK(std::string(e.what()).find("oscillation") != std::string::npos);
  }
}

TEST_CASE("reports: conservation and shapes") {
  ScenarioBundle b =
      ScenarioBundle::from(mini_scenario(CaseKind::optimal_dispatch, 20, 700));
  ScenarioResult r = run_scenario(b);
  DispatchConfig cfg = b.scenario.dispatch_config();
  std::filesystem::remove_all("test_tmp/rep");
  auto files = emit_reports(r, cfg, "t", "test_tmp/rep");
  CHECK(files.size() == 5);

  // Histogram counts sum to the monitored point total.
  std::ifstream hist("test_tmp/rep/t_histogram.csv");
  REQUIRE(hist);
  std::string line;
  std::getline(hist, line);  // header
  long long sum = 0;
  while (std::getline(hist, line)) {
    size_t comma = line.rfind(',');
    sum += std::stoll(line.substr(comma + 1));
  }
  CHECK(sum == int64_t(r.monitored.size()) * r.steps());

  // Q-V rows: one per (phase, timestep) on the three-phase DVC bus.
  std::ifstream qv("test_tmp/rep/t_qv.csv");
  REQUIRE(qv);
  int rows = -1;  // skip header
  while (std::getline(qv, line)) ++rows;
  CHECK(rows == 3 * r.steps());

  // The metrics total row is present.
  std::string metrics = slurp("test_tmp/rep/t_metrics.csv");
  CHECK(metrics.find("t,total,") != std::string::npos);
}

TEST_CASE("profile generator: determinism and day-type texture") {
  DayProfiles a = generate_synthetic_profiles("cloudy", 7);
  DayProfiles b = generate_synthetic_profiles("cloudy", 7);
  CHECK(a.pv == b.pv);
  CHECK(a.load == b.load);
  DayProfiles c = generate_synthetic_profiles("cloudy", 8);
  CHECK(a.pv != c.pv);

  // Byte-identical files for one seed.
  write_profiles_csv(a, "test_tmp/p1.csv");
  write_profiles_csv(b, "test_tmp/p2.csv");
  CHECK(slurp("test_tmp/p1.csv") == slurp("test_tmp/p2.csv"));

  DayProfiles sunny = generate_synthetic_profiles("sunny", 7);
  double max_ramp = 0.0;
  for (size_t i = 1; i < sunny.pv.size(); ++i)
    max_ramp = std::max(max_ramp, std::abs(sunny.pv[i] - sunny.pv[i - 1]));
  CHECK(max_ramp < 0.05);

  int big = 0;
  for (size_t i = 1; i < a.pv.size(); ++i)
    if (std::abs(a.pv[i] - a.pv[i - 1]) > 0.2) ++big;
  CHECK(big >= 20);
  for (size_t i = 1; i < a.pv.size(); ++i)
    CHECK(std::abs(a.pv[i] - a.pv[i - 1]) <= 0.6 + 1e-12);

  for (double v : a.load) CHECK(v > 0.0);
  CHECK_THROWS_AS(generate_synthetic_profiles("rainy", 1), Error);
}

TEST_CASE("reproducibility: identical scenario and seed give identical "
          "records and reports") {
  ScenarioBundle b =
      ScenarioBundle::from(mini_scenario(CaseKind::optimal_dispatch, 25, 690));
  ScenarioResult r1 = run_scenario(b);
  ScenarioResult r2 = run_scenario(b);
  CHECK(r1.canonical_bytes() == r2.canonical_bytes());

  DispatchConfig cfg = b.scenario.dispatch_config();
  std::filesystem::remove_all("test_tmp/ra");
  std::filesystem::remove_all("test_tmp/rb");
  auto fa = emit_reports(r1, cfg, "x", "test_tmp/ra");
  auto fb = emit_reports(r2, cfg, "x", "test_tmp/rb");
  REQUIRE(fa.size() == fb.size());
  for (size_t i = 0; i < fa.size(); ++i) CHECK(slurp(fa[i]) == slurp(fb[i]));
}

TEST_CASE("weight sweep returns one scored row per weight") {
  ScenarioBundle b =
      ScenarioBundle::from(mini_scenario(CaseKind::optimal_dispatch, 15, 710));
  std::vector<WeightSweepRow> rows = run_weight_sweep(b, {0.0, 0.1});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].w_theta == 0.0);
  CHECK(rows[1].w_theta == 0.1);
  for (const auto& row : rows)
    CHECK(row.metrics.v_out_lower + row.metrics.v_in +
              row.metrics.v_out_upper ==
          row.metrics.total_points);
}
