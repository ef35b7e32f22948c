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

namespace fv {

struct DayProfiles {
  std::vector<double> load;  // per-unit multipliers, one per minute
  std::vector<double> pv;
};

/// Deterministic one-day (1440 x 60 s) synthetic profiles. "sunny" is a
/// smooth clear-sky bell; "cloudy" modulates the bell with seeded cloud
/// transients (per-minute ramps capped at 60% of rating). The load is a
/// double-peak residential shape with mild seeded jitter.
DayProfiles generate_synthetic_profiles(const std::string& day_type,
                                        std::uint64_t seed);

/// Writes the profiles as a timestamp,load,pv CSV (header row included).
void write_profiles_csv(const DayProfiles& day, const std::string& path);

}  // namespace fv
