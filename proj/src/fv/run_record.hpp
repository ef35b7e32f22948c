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
#include <string>
#include <vector>

#include "fv/dispatch.hpp"
#include "fv/powerflow.hpp"

namespace fv {

/// Time-indexed record of one simulation run: voltages, settled taps, DVC
/// injection and the active curve per step, plus run metadata. All vectors
/// are step-indexed and equally long.
struct ScenarioResult {
  std::vector<VoltageSnapshot> snapshots;
  std::vector<std::vector<int>> taps;      // per step, per regulator unit
  std::vector<PhaseReal> dvc_q_kvar;       // zero rows when no DVC is active
  std::vector<std::string> curve_ids;      // "" outside local-control cases
  std::vector<ObjectiveValue> objectives;  // dispatch cases only, else empty

  std::vector<BusPhase> monitored;
  std::vector<std::string> reg_unit_ids;

  int dvc_index = -1;  // -1 = run without an active DVC
  int dvc_bus = -1;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int fixpoint_warnings = 0;

  int steps() const { return int(snapshots.size()); }

  /// Deterministic byte serialization of the whole record (bit patterns of
  /// every stored double); two runs are reproducible iff these bytes match.
  std::string canonical_bytes() const;
};

}  // namespace fv
