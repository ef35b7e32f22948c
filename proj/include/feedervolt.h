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
 *
 * feedervolt C API: quasi-static time-series simulation of unbalanced
 * three-phase distribution feeders with DVC dispatch, placement search and
 * supervisory Volt/VAR-curve adaptation.
 *
 * All functions returning fv_status give FV_OK (0) on success; on failure
 * fv_last_error() describes the problem for the calling thread. Objects are
 * opaque; every *_new/_load has a matching *_free (safe on NULL).
 */
#ifndef FEEDERVOLT_H_
#define FEEDERVOLT_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fv_status {
  FV_OK = 0,
  FV_ERR_IO = 1,         /* file missing, unreadable, unwritable */
  FV_ERR_PARSE = 2,      /* malformed input text */
  FV_ERR_VALIDATION = 3, /* input violating a model rule */
  FV_ERR_NUMERICAL = 4,  /* non-convergence, control oscillation */
  FV_ERR_ARGUMENT = 5    /* bad argument */
} fv_status;

const char* fv_status_name(fv_status status);

/* Message for the last failure on this thread; never NULL. */
const char* fv_last_error(void);

const char* fv_version(void);

/* ------------------------------------------------------------------ */
/* Feeder models                                                       */

typedef struct fv_model fv_model;

fv_status fv_model_load(const char* path, fv_model** out);
void fv_model_free(fv_model* model);

int fv_model_bus_count(const fv_model* model);
int fv_model_regulator_count(const fv_model* model);
int fv_model_zone_count(const fv_model* model);
/* Zone id of a bus, or -1 when the bus is unknown. */
int fv_model_bus_zone(const fv_model* model, const char* bus_id);

/* ------------------------------------------------------------------ */
/* Scenarios                                                           */

typedef struct fv_scenario fv_scenario;

fv_status fv_scenario_load(const char* path, fv_scenario** out);
/* Overrides one scenario key with the same syntax as the file, e.g.
 * fv_scenario_set(s, "w_theta", "0.1") or ("case", "base"). */
fv_status fv_scenario_set(fv_scenario* scenario, const char* key,
                          const char* value);
/* Reads one scenario value back ("case", "output", "steps", "seed",
 * "supervise_mode", "update_period_min") into buf. */
fv_status fv_scenario_get(const fv_scenario* scenario, const char* key,
                          char* buf, size_t buf_len);
void fv_scenario_free(fv_scenario* scenario);

/* ------------------------------------------------------------------ */
/* Runs and results                                                    */

typedef struct fv_result fv_result;

/* Runs the scenario's case over its horizon. */
fv_status fv_run(const fv_scenario* scenario, fv_result** out);
void fv_result_free(fv_result* result);

int fv_result_steps(const fv_result* result);

typedef enum fv_metric {
  FV_METRIC_V_OUT_LOWER = 0,
  FV_METRIC_V_IN = 1,
  FV_METRIC_V_OUT_UPPER = 2,
  FV_METRIC_TOTAL_POINTS = 3,
  FV_METRIC_TAP_TOTAL = 4,
  FV_METRIC_FIXPOINT_WARNINGS = 5
} fv_metric;

/* Run-level metric; the three band bins always sum to total_points. */
long long fv_result_metric(const fv_result* result, fv_metric metric);
/* Same, restricted to one phase (0 = A, 1 = B, 2 = C); tap totals and
 * warnings are run-level only and return -1 here. */
long long fv_result_metric_phase(const fv_result* result, fv_metric metric,
                                 int phase);

/* Writes metrics, histogram, tap-trajectory, Q-V and run-info CSVs into
 * out_dir with the given file-name label. */
fv_status fv_result_write_reports(const fv_result* result,
                                  const fv_scenario* scenario,
                                  const char* label, const char* out_dir);

/* ------------------------------------------------------------------ */
/* Higher-level procedures                                             */

/* DVC placement search: ranks the top-k buses of `zone` by voltage
 * variation over a base-case run (zone < 0 picks the most variable zone),
 * evaluates an optimal-dispatch run per candidate, writes the placement CSV
 * to csv_path (optional) and stores the winning bus id into winner_buf. */
fv_status fv_place(const fv_scenario* scenario, int zone, int k,
                   const char* csv_path, char* winner_buf,
                   size_t winner_buf_len);

/* Supervisory run: optimal-dispatch reference, per-window curves in `mode`
 * ("standard", "shifted", "fitted") updated every period_min minutes
 * (30/60/120/240), then the local-control run under those curves. Curve
 * records go to curves_path (optional). Returns the supervised run; the
 * reference run is returned through reference_out when non-NULL. */
fv_status fv_supervise(const fv_scenario* scenario, const char* mode,
                       int period_min, const char* curves_path,
                       fv_result** supervised_out, fv_result** reference_out);

/* Optimal-dispatch runs over n tap-change weights; per-weight metrics are
 * written to csv_path. */
fv_status fv_sweep(const fv_scenario* scenario, const double* weights, int n,
                   const char* csv_path);

/* Deterministic synthetic day profiles ("sunny" or "cloudy") written as a
 * timestamp,load,pv CSV. */
fv_status fv_gen_profiles(const char* day_type, uint64_t seed,
                          const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FEEDERVOLT_H_ */
