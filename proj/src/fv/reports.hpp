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

#include <string>
#include <vector>

#include "fv/placement.hpp"
#include "fv/run_record.hpp"
#include "fv/scenario.hpp"

namespace fv {

/// Writes the CSV set for one run into out_dir, file names prefixed with
/// `label`: metrics (band bins + tap counts per phase), voltage histogram,
/// tap trajectories, Q-V trajectory (runs with a DVC) and run metadata.
/// Returns the written paths.
std::vector<std::string> emit_reports(const ScenarioResult& result,
                                      const DispatchConfig& cfg,
                                      const std::string& label,
                                      const std::string& out_dir);

void emit_placement_csv(const PlacementReport& report, const std::string& path);
void emit_sweep_csv(const std::vector<WeightSweepRow>& rows,
                    const std::string& path);

/// Per-window curve records in the vvc line format, window bounds and phase
/// in comments.
void emit_curve_records(const CurveSchedule& schedule, PhaseMask dvc_phases,
                        const std::string& path);

}  // namespace fv
