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
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feedervolt.h"

namespace {

// Exit codes: 0 success, 2 validation/input error, 3 numerical failure.
int exit_code(fv_status st) {
  if (st == FV_OK) return 0;
  if (st == FV_ERR_NUMERICAL) return 3;
  return 2;
}

int fail_with(fv_status st) {
  std::fprintf(stderr, "error (%s): %s\n", fv_status_name(st),
               fv_last_error());
  return exit_code(st);
}

struct ScenarioHandle {
  fv_scenario* s = nullptr;
  ~ScenarioHandle() { fv_scenario_free(s); }
};

struct ResultHandle {
  fv_result* r = nullptr;
  ~ResultHandle() { fv_result_free(r); }
};

std::string scenario_str(const fv_scenario* s, const char* key) {
  char buf[256] = {0};
  if (fv_scenario_get(s, key, buf, sizeof buf) != FV_OK) return "";
  return buf;
}

void print_metrics(const char* label, const fv_result* r) {
  long long lo = fv_result_metric(r, FV_METRIC_V_OUT_LOWER);
  long long in = fv_result_metric(r, FV_METRIC_V_IN);
  long long hi = fv_result_metric(r, FV_METRIC_V_OUT_UPPER);
  long long total = fv_result_metric(r, FV_METRIC_TOTAL_POINTS);
  long long taps = fv_result_metric(r, FV_METRIC_TAP_TOTAL);
  double pct_in = total ? 100.0 * double(in) / double(total) : 0.0;
  std::printf("%s: v_out_lower=%lld v_in=%lld v_out_upper=%lld (%.2f%% in band"
              ", T=%lld), tap_total=%lld\n",
              label, lo, in, hi, pct_in, total, taps);
}

int apply_overrides(fv_scenario* s,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) {
    if (fv_status st = fv_scenario_set(s, k.c_str(), v.c_str()); st != FV_OK)
      return fail_with(st);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feedervolt: DVC dispatch, placement and supervisory Volt/VAR "
               "control on unbalanced distribution feeders"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run one scenario and emit reports");
  std::string run_scn, run_out, run_case, run_label = "run";
  int run_steps = -1;
  run->add_option("scenario", run_scn, "scenario file")->required();
  run->add_option("--out", run_out, "output directory (default: scenario's)");
  run->add_option("--case", run_case,
                  "override the case (base|optimal_dispatch|local_vvc|"
                  "supervised)");
  run->add_option("--steps", run_steps, "override the horizon length");
  run->add_option("--label", run_label, "file-name label for the reports");

  // --- place -------------------------------------------------------
  auto* place = app.add_subcommand(
      "place", "Rank candidate buses by voltage variation and pick the "
               "best DVC location");
  std::string pl_scn, pl_out;
  int pl_zone = -1, pl_k = 3;
  place->add_option("--scenario", pl_scn, "scenario file")->required();
  place->add_option("--zone", pl_zone,
                    "target voltage zone (default: most variable)");
  place->add_option("-k,--candidates", pl_k, "shortlist size");
  place->add_option("--out", pl_out, "output directory");

  // --- supervise ---------------------------------------------------
  auto* sup = app.add_subcommand(
      "supervise", "Fit per-window Volt/VAR curves from an optimal-dispatch "
                   "reference and run them under local control");
  std::string sv_scn, sv_mode = "fitted", sv_out;
  int sv_period = 120;
  sup->add_option("--scenario", sv_scn, "scenario file")->required();
  sup->add_option("--mode", sv_mode, "standard|shifted|fitted");
  sup->add_option("--period", sv_period, "update period, minutes");
  sup->add_option("--out", sv_out, "output directory");

  // --- sweep -------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Optimal-dispatch runs over a list of tap-change weights");
  std::string sw_scn, sw_out;
  std::vector<double> sw_weights{0.0, 0.01, 0.05, 0.1, 0.5};
  sweep->add_option("--scenario", sw_scn, "scenario file")->required();
  sweep->add_option("--weights", sw_weights, "w_theta values")
      ->delimiter(',');
  sweep->add_option("--out", sw_out, "output directory");

  // --- gen-profiles --------------------------------------------------
  auto* gen = app.add_subcommand(
      "gen-profiles", "Write deterministic synthetic day profiles");
  std::string gp_day = "sunny", gp_out = "profiles.csv";
  std::uint64_t gp_seed = 1;
  gen->add_option("--day", gp_day, "sunny|cloudy")->required();
  gen->add_option("--seed", gp_seed, "generator seed");
  gen->add_option("--out", gp_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    ScenarioHandle s;
    if (fv_status st = fv_scenario_load(run_scn.c_str(), &s.s); st != FV_OK)
      return fail_with(st);
    std::vector<std::pair<std::string, std::string>> kv;
    if (!run_case.empty()) kv.emplace_back("case", run_case);
    if (run_steps > 0) kv.emplace_back("steps", std::to_string(run_steps));
    if (int rc = apply_overrides(s.s, kv)) return rc;

    ResultHandle r;
    if (fv_status st = fv_run(s.s, &r.r); st != FV_OK) return fail_with(st);
    std::string out = run_out.empty() ? scenario_str(s.s, "output") : run_out;
    if (fv_status st =
            fv_result_write_reports(r.r, s.s, run_label.c_str(), out.c_str());
        st != FV_OK)
      return fail_with(st);
    print_metrics(scenario_str(s.s, "case").c_str(), r.r);
    std::printf("reports written to %s\n", out.c_str());
    return 0;
  }

  if (*place) {
    ScenarioHandle s;
    if (fv_status st = fv_scenario_load(pl_scn.c_str(), &s.s); st != FV_OK)
      return fail_with(st);
    std::string out = pl_out.empty() ? scenario_str(s.s, "output") : pl_out;
    std::string csv = out + "/placement.csv";
    char winner[128] = {0};
    if (fv_status st =
            fv_place(s.s, pl_zone, pl_k, csv.c_str(), winner, sizeof winner);
        st != FV_OK)
      return fail_with(st);
    std::printf("winner %s\n", winner);
    std::printf("placement report written to %s\n", csv.c_str());
    return 0;
  }

  if (*sup) {
    ScenarioHandle s;
    if (fv_status st = fv_scenario_load(sv_scn.c_str(), &s.s); st != FV_OK)
      return fail_with(st);
    std::string out = sv_out.empty() ? scenario_str(s.s, "output") : sv_out;
    std::string curves =
        out + "/curves_" + sv_mode + "_" + std::to_string(sv_period) + ".vvc";
    ResultHandle supd, ref;
    if (fv_status st = fv_supervise(s.s, sv_mode.c_str(), sv_period,
                                    curves.c_str(), &supd.r, &ref.r);
        st != FV_OK)
      return fail_with(st);
    std::string label = "supervised_" + sv_mode;
    if (fv_status st =
            fv_result_write_reports(supd.r, s.s, label.c_str(), out.c_str());
        st != FV_OK)
      return fail_with(st);
    if (fv_status st = fv_result_write_reports(ref.r, s.s,
                                               "dispatch_reference",
                                               out.c_str());
        st != FV_OK)
      return fail_with(st);
    print_metrics("optimal_dispatch", ref.r);
    print_metrics(label.c_str(), supd.r);
    std::printf("curve records written to %s\n", curves.c_str());
    return 0;
  }

  if (*sweep) {
    ScenarioHandle s;
    if (fv_status st = fv_scenario_load(sw_scn.c_str(), &s.s); st != FV_OK)
      return fail_with(st);
    std::string out = sw_out.empty() ? scenario_str(s.s, "output") : sw_out;
    std::string csv = out + "/sweep.csv";
    if (fv_status st = fv_sweep(s.s, sw_weights.data(), int(sw_weights.size()),
                                csv.c_str());
        st != FV_OK)
      return fail_with(st);
    std::printf("sweep report written to %s\n", csv.c_str());
    return 0;
  }

  if (*gen) {
    if (fv_status st = fv_gen_profiles(gp_day.c_str(), gp_seed, gp_out.c_str());
        st != FV_OK)
      return fail_with(st);
    std::printf("profiles written to %s\n", gp_out.c_str());
    return 0;
  }

  return 0;
}
