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
#include "fv/placement.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>

#include "fv/error.hpp"

namespace fv {

bool bus_id_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s, long long& out) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    out = std::stoll(s);
    return true;
  };
  long long na = 0, nb = 0;
  if (numeric(a, na) && numeric(b, nb)) {
    if (na != nb) return na < nb;
    return a < b;
  }
  return a < b;
}

namespace {

double variation_score(const ScenarioResult& run, int bus, PhaseMask phases) {
  double sum = 0.0;
  int n = 0;
  size_t steps = run.snapshots.size();
  for (Phase p : kPhases) {
    if (!has_phase(phases, p)) continue;
    double mean = 0.0;
    for (const VoltageSnapshot& s : run.snapshots) mean += s.v_mag(bus, p);
    mean /= double(steps);
    double var = 0.0;
    for (const VoltageSnapshot& s : run.snapshots) {
      double d = s.v_mag(bus, p) - mean;
      var += d * d;
    }
    sum += std::sqrt(var / double(steps));
    ++n;
  }
  return n ? sum / double(n) : 0.0;
}

}  // namespace

CandidateRanking rank_candidates(const ScenarioResult& base_result,
                                 const FeederModel& model, int zone, int k) {
  if (base_result.snapshots.empty())
    fail(ErrorCode::argument, "base run is empty");
  if (k < 1) fail(ErrorCode::argument, "k must be >= 1");

  CandidateRanking out;
  for (size_t b = 0; b < model.buses.size(); ++b) {
    if (int(b) == model.source) continue;
    const Bus& bus = model.buses[b];
    if (bus.zone_id != zone) continue;
    out.entries.push_back(
        {bus.id, zone, variation_score(base_result, int(b), bus.phases)});
  }
  if (out.entries.empty())
    fail(ErrorCode::validation,
         "zone " + std::to_string(zone) + " holds no candidate buses");

  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const CandidateScore& a, const CandidateScore& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return bus_id_less(a.bus, b.bus);
                   });
  if (int(out.entries.size()) > k) out.entries.resize(size_t(k));
  return out;
}

int most_variable_zone(const ScenarioResult& base_result,
                       const FeederModel& model) {
  std::vector<double> totals(size_t(model.zone_count()), 0.0);
  for (size_t b = 0; b < model.buses.size(); ++b) {
    if (int(b) == model.source) continue;
    const Bus& bus = model.buses[b];
    totals[size_t(bus.zone_id)] +=
        variation_score(base_result, int(b), bus.phases);
  }
  int best = 0;
  for (size_t z = 1; z < totals.size(); ++z)
    if (totals[z] > totals[size_t(best)]) best = int(z);
  return best;
}

PlacementReport evaluate_placements(const ScenarioBundle& bundle,
                                    const std::vector<std::string>& candidates) {
  if (candidates.empty()) fail(ErrorCode::argument, "no candidates given");
  if (bundle.model.dvcs.empty())
    fail(ErrorCode::validation, "feeder carries no DVC to place");

  auto evaluate_one = [&](const std::string& bus) {
    try {
      ScenarioBundle b = bundle;
      b.scenario.kind = CaseKind::optimal_dispatch;
      b.scenario.w_mu = 1.0;
      b.scenario.w_theta = 0.0;  // placement scores voltage variation only
      b.scenario.dvc_bus = bus;
      b.model = with_dvc_at(std::move(b.model), bus);
      ScenarioResult r = run_scenario(b);
      return score_run(r, b.scenario.dispatch_config());
    } catch (const Error& e) {
      fail(e.code(), "candidate " + bus + ": " + e.what());
    }
  };

  std::vector<std::future<MetricsReport>> jobs;
  jobs.reserve(candidates.size());
  for (const std::string& bus : candidates)
    jobs.push_back(std::async(std::launch::async, evaluate_one, bus));

  PlacementReport report;
  for (size_t i = 0; i < candidates.size(); ++i)
    report.entries.push_back({candidates[i], jobs[i].get()});

  const PlacementEntry* best = &report.entries[0];
  for (const PlacementEntry& e : report.entries) {
    if (e.metrics.v_in > best->metrics.v_in ||
        (e.metrics.v_in == best->metrics.v_in &&
         (e.metrics.v_out_upper < best->metrics.v_out_upper ||
          (e.metrics.v_out_upper == best->metrics.v_out_upper &&
           bus_id_less(e.bus, best->bus)))))
      best = &e;
  }
  report.winner = best->bus;
  return report;
}

}  // namespace fv
