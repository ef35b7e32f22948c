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
#include "fv/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fv/error.hpp"
#include "fv/run_record.hpp"

namespace fv {

void VoltageBand::validate() const {
  if (!(0.0 < v_lower && v_lower < v_upper))
    fail(ErrorCode::validation, "voltage band requires 0 < lower < upper");
}

void DispatchConfig::validate() const {
  band.validate();
  if (w_mu < 0.0 || w_theta < 0.0)
    fail(ErrorCode::validation, "objective weights must be non-negative");
  if (!(w_mu + w_theta > 0.0))
    fail(ErrorCode::validation, "at least one objective weight must be positive");
  if (!(q_step_tol_kvar > 0.0))
    fail(ErrorCode::validation, "q_step_tol must be positive");
}

std::vector<BusPhase> default_monitored_set(const FeederModel& model) {
  std::vector<char> excluded(model.buses.size(), 0);
  for (const auto& bank : model.reg_banks) {
    excluded[size_t(bank.from)] = 1;
    excluded[size_t(bank.to)] = 1;
  }
  std::vector<BusPhase> out;
  for (size_t b = 0; b < model.buses.size(); ++b) {
    if (excluded[b]) continue;
    for (Phase p : kPhases)
      if (has_phase(model.buses[b].phases, p)) out.push_back({int(b), p});
  }
  return out;
}

PhaseReal objective_f_mu(const VoltageSnapshot& snapshot,
                         const std::vector<BusPhase>& monitored,
                         const VoltageBand& band) {
  PhaseReal out{};
  for (const BusPhase& mp : monitored) {
    double v = snapshot.v_mag(mp.bus, mp.phase);
    double excess = std::max(v - band.v_upper, 0.0);
    double shortfall = std::max(band.v_lower - v, 0.0);
    out[size_t(phase_index(mp.phase))] += excess + shortfall;
  }
  return out;
}

PhaseReal objective_f_theta(const FeederModel& model,
                            const std::vector<int>& taps_now,
                            const std::vector<int>& taps_prev) {
  if (taps_now.size() != taps_prev.size() ||
      taps_now.size() != model.regs.size())
    fail(ErrorCode::argument, "tap vectors must cover the same regulators");
  PhaseReal out{};
  for (size_t u = 0; u < taps_now.size(); ++u) {
    int moved = std::abs(taps_now[u] - taps_prev[u]);
    for (Phase p : kPhases)
      if (has_phase(model.regs[u].phases, p))
        out[size_t(phase_index(p))] += double(moved);
  }
  return out;
}

long long tap_steps_total(const std::vector<int>& taps_now,
                          const std::vector<int>& taps_prev) {
  if (taps_now.size() != taps_prev.size())
    fail(ErrorCode::argument, "tap vectors must cover the same regulators");
  long long total = 0;
  for (size_t u = 0; u < taps_now.size(); ++u)
    total += std::abs(taps_now[u] - taps_prev[u]);
  return total;
}

namespace {

struct Probe {
  bool feasible = false;
  double combined = std::numeric_limits<double>::infinity();
  ObjectiveValue objective;
  ControlledResult res;
};

class DispatchSearch {
 public:
  DispatchSearch(const FeederModel& model, const OperatingPoint& op,
                 const std::vector<int>& taps_prev, const DispatchConfig& cfg,
                 int dvc_index, const std::vector<BusPhase>& monitored)
      : m_(model),
        op_(op),
        taps_prev_(taps_prev),
        cfg_(cfg),
        dvc_(dvc_index),
        monitored_(monitored) {
    limit_ = m_.dvc_per_phase_limit_kvar(dvc_);
  }

  const Probe& evaluate(const PhaseReal& q) {
    std::array<long long, 3> key{};
    for (int i = 0; i < 3; ++i) key[size_t(i)] = llround(q[size_t(i)] * 1e6);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    Probe pr;
    OperatingPoint probe_op = op_;
    probe_op.taps = taps_prev_;
    probe_op.dvc_q_kvar[dvc_] = q;
    ++probes_;
    try {
      pr.res = solve_with_controls(m_, probe_op, cfg_.solve_tol,
                                   cfg_.solve_max_iter,
                                   cfg_.control_max_rounds);
      pr.feasible = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::numerical) throw;
      pr.feasible = false;  // scored +inf, skipped
    }
    if (pr.feasible) {
      pr.objective.f_mu_phase =
          objective_f_mu(pr.res.solved.snapshot, monitored_, cfg_.band);
      pr.objective.f_mu = 0.0;
      for (double f : pr.objective.f_mu_phase) pr.objective.f_mu += f;
      pr.objective.f_theta =
          double(tap_steps_total(pr.res.taps, taps_prev_));
      pr.objective.combined =
          cfg_.w_mu * pr.objective.f_mu + cfg_.w_theta * pr.objective.f_theta;
      pr.combined = pr.objective.combined;
    }
    return cache_.emplace(key, std::move(pr)).first->second;
  }

  // Strictly-better-or-preferred ordering: lower combined objective first,
  // ties resolved toward the smaller total injection, then lexicographically
  // for determinism.
  bool better(const PhaseReal& qa, const Probe& a, const PhaseReal& qb,
              const Probe& b) const {
    if (a.feasible != b.feasible) return a.feasible;
    if (!a.feasible) return false;
    if (a.combined < b.combined - 1e-12) return true;
    if (b.combined < a.combined - 1e-12) return false;
    double na = std::abs(qa[0]) + std::abs(qa[1]) + std::abs(qa[2]);
    double nb = std::abs(qb[0]) + std::abs(qb[1]) + std::abs(qb[2]);
    if (na < nb - 1e-9) return true;
    if (nb < na - 1e-9) return false;
    return qa < qb;
  }

  void consider(const PhaseReal& q) {
    const Probe& pr = evaluate(q);
    if (!have_best_ || better(q, pr, best_q_, evaluate(best_q_))) {
      best_q_ = q;
      have_best_ = true;
    }
  }

  // One-dimensional search on phase `pi` with the other phases fixed at the
  // current best: 9-point coarse scan, then interval halving inside the
  // bracket around the best coarse point until the interval is below
  // q_step_tol. Flat stretches (violation fully cleared) drain toward the
  // smallest sufficient injection via the tie rule.
  void search_phase(int pi) {
    const double step = limit_ / 4.0;
    PhaseReal q = best_q_;
    for (int k = 0; k <= 8; ++k) {
      q[size_t(pi)] = -limit_ + double(k) * step;
      consider(q);
    }
    double center = best_q_[size_t(pi)];
    double lo = std::max(center - step, -limit_);
    double hi = std::min(center + step, limit_);
    while (hi - lo > cfg_.q_step_tol_kvar) {
      double m1 = lo + (hi - lo) / 3.0;
      double m2 = hi - (hi - lo) / 3.0;
      PhaseReal qa = best_q_;
      PhaseReal qb = best_q_;
      qa[size_t(pi)] = m1;
      qb[size_t(pi)] = m2;
      const Probe& a = evaluate(qa);
      const Probe& b = evaluate(qb);
      bool keep_low_side;
      if (a.feasible != b.feasible) {
        keep_low_side = a.feasible;
      } else if (std::abs(a.combined - b.combined) <= 1e-12) {
        keep_low_side = std::abs(m1) < std::abs(m2);
      } else {
        keep_low_side = a.combined < b.combined;
      }
      if (keep_low_side)
        hi = m2;
      else
        lo = m1;
      consider(qa);
      consider(qb);
    }
  }

  DispatchResult run() {
    PhaseMask dvc_phases = m_.buses[size_t(m_.dvcs[size_t(dvc_)].bus)].phases;
    consider(PhaseReal{});  // zero injection is always admissible
    for (int sweep = 0; sweep < 3; ++sweep) {
      PhaseReal at_start = best_q_;
      for (Phase p : kPhases) {
        if (!has_phase(dvc_phases, p)) continue;
        search_phase(phase_index(p));
      }
      double moved = 0.0;
      for (int i = 0; i < 3; ++i)
        moved = std::max(moved,
                         std::abs(best_q_[size_t(i)] - at_start[size_t(i)]));
      if (moved < cfg_.q_step_tol_kvar) break;
    }

    const Probe& best = evaluate(best_q_);
    if (!best.feasible)
      fail(ErrorCode::numerical, "all dispatch probes infeasible");

    DispatchResult out;
    out.q_star_kvar = best_q_;
    out.objective = best.objective;
    out.snapshot = best.res.solved.snapshot;
    out.taps = best.res.taps;
    out.probes = probes_;
    return out;
  }

 private:
  const FeederModel& m_;
  const OperatingPoint& op_;
  const std::vector<int>& taps_prev_;
  const DispatchConfig& cfg_;
  int dvc_;
  const std::vector<BusPhase>& monitored_;
  double limit_ = 0.0;
  std::map<std::array<long long, 3>, Probe> cache_;
  PhaseReal best_q_{};
  bool have_best_ = false;
  int probes_ = 0;
};

}  // namespace

DispatchResult optimal_dispatch(const FeederModel& model,
                                const OperatingPoint& op_t,
                                const std::vector<int>& taps_prev,
                                const DispatchConfig& cfg, int dvc_index) {
  cfg.validate();
  if (dvc_index < 0 || size_t(dvc_index) >= model.dvcs.size())
    fail(ErrorCode::argument, "model has no DVC at the requested index");
  if (taps_prev.size() != model.regs.size())
    fail(ErrorCode::argument, "taps_prev must cover every regulator unit");

  std::vector<BusPhase> fallback;
  const std::vector<BusPhase>* monitored = &cfg.monitored;
  if (cfg.monitored.empty()) {
    fallback = default_monitored_set(model);
    monitored = &fallback;
  }
  DispatchSearch search(model, op_t, taps_prev, cfg, dvc_index, *monitored);
  return search.run();
}

long long MetricsReport::tap_total() const {
  long long t = 0;
  for (const auto& [id, n] : tap_changes) t += n;
  return t;
}

double MetricsReport::out_of_band_share() const {
  if (total_points == 0) return 0.0;
  return double(v_out_lower + v_out_upper) / double(total_points);
}

MetricsReport score_run(const ScenarioResult& result,
                        const DispatchConfig& cfg) {
  MetricsReport rep;
  for (const VoltageSnapshot& snap : result.snapshots) {
    for (const BusPhase& mp : result.monitored) {
      double v = snap.v_mag(mp.bus, mp.phase);
      size_t pi = size_t(phase_index(mp.phase));
      ++rep.total_points;
      ++rep.phase_points[pi];
      if (v < cfg.band.v_lower) {
        ++rep.v_out_lower;
        ++rep.phase_out_lower[pi];
      } else if (v > cfg.band.v_upper) {
        ++rep.v_out_upper;
        ++rep.phase_out_upper[pi];
      } else {
        ++rep.v_in;
        ++rep.phase_in[pi];
      }
    }
  }
  for (size_t u = 0; u < result.reg_unit_ids.size(); ++u) {
    long long steps = 0;
    for (size_t t = 1; t < result.taps.size(); ++t)
      steps += std::abs(result.taps[t][u] - result.taps[t - 1][u]);
    rep.tap_changes[result.reg_unit_ids[u]] = steps;
  }
  return rep;
}

}  // namespace fv
