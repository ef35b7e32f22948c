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

#include "fv/scenario.hpp"

namespace fv {

/// Candidate bus scored by observed voltage variation: mean over its phases
/// of the standard deviation of the per-phase voltage over the base run.
struct CandidateScore {
  std::string bus;
  int zone = -1;
  double score = 0.0;  // pu
};

struct CandidateRanking {
  std::vector<CandidateScore> entries;  // descending score, ties by bus id
};

/// Ranks the top-k buses of `zone` by variation over a no-DVC base run.
/// The source bus is never a candidate. Throws Error(validation) when the
/// zone holds no candidates.
CandidateRanking rank_candidates(const ScenarioResult& base_result,
                                 const FeederModel& model, int zone, int k);

/// Zone with the largest aggregate variation score (used when the caller
/// does not pin one).
int most_variable_zone(const ScenarioResult& base_result,
                       const FeederModel& model);

struct PlacementEntry {
  std::string bus;
  MetricsReport metrics;
};

struct PlacementReport {
  std::vector<PlacementEntry> entries;  // candidate order preserved
  std::string winner;
};

/// One full optimal-dispatch run per candidate (w_mu = 1, w_theta = 0),
/// identical profiles across candidates so comparisons are paired. Winner
/// maximizes v_in; ties fall to fewer upper violations, then the lower bus
/// id. Candidate runs evaluate in parallel.
PlacementReport evaluate_placements(const ScenarioBundle& bundle,
                                    const std::vector<std::string>& candidates);

/// Numeric-aware bus id ordering ("7" < "13"; falls back to lexicographic).
bool bus_id_less(const std::string& a, const std::string& b);

}  // namespace fv
