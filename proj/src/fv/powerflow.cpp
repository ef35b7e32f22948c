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
#include "fv/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include "fv/error.hpp"

namespace fv {

double OperatingPoint::load_multiplier() const {
  if (load_mult.empty()) return 1.0;
  auto it = load_mult.find(load_profile_id);
  if (it == load_mult.end())
    fail(ErrorCode::argument,
         "no multiplier for load profile \"" + load_profile_id + "\"");
  return it->second;
}

double OperatingPoint::pv_multiplier(const std::string& profile_id) const {
  if (pv_mult.empty()) return 1.0;
  auto it = pv_mult.find(profile_id);
  if (it == pv_mult.end())
    fail(ErrorCode::argument,
         "no multiplier for pv profile \"" + profile_id + "\"");
  return it->second;
}

cplx zip_power_w(const ZipLoad& load, double multiplier, double v_pu) {
  double p0 = load.p_nominal_kw * 1000.0 * multiplier;
  double q0 = load.q_nominal_kvar * 1000.0 * multiplier;
  double vc = load.zipv[6];
  auto poly = [](double z, double i, double p, double v) {
    return z * v * v + i * v + p;
  };
  double fp, fq;
  if (v_pu >= vc) {
    fp = poly(load.zipv[0], load.zipv[1], load.zipv[2], v_pu);
    fq = poly(load.zipv[3], load.zipv[4], load.zipv[5], v_pu);
  } else {
    double scale = (v_pu / vc) * (v_pu / vc);
    fp = poly(load.zipv[0], load.zipv[1], load.zipv[2], vc) * scale;
    fq = poly(load.zipv[3], load.zipv[4], load.zipv[5], vc) * scale;
  }
  return {p0 * fp, q0 * fq};
}

namespace {

struct Sweep {
  const FeederModel& m;
  const OperatingPoint& op;
  std::vector<double> base_v;          // LN volts per bus
  std::vector<PhaseVec> v;             // volts
  std::vector<PhaseVec> inj;           // drawn current per bus, amps
  std::vector<PhaseVec> branch;        // current entering each bus from its parent
  std::vector<double> unit_ratio;      // per regulator unit
  double load_mult;

  explicit Sweep(const FeederModel& model, const OperatingPoint& point)
      : m(model), op(point) {
    size_t nb = m.buses.size();
    base_v.resize(nb);
    for (size_t b = 0; b < nb; ++b) base_v[b] = m.buses[b].base_v_ln();
    v.assign(nb, PhaseVec{});
    inj.assign(nb, PhaseVec{});
    branch.assign(nb, PhaseVec{});
    load_mult = op.load_multiplier();

    unit_ratio.resize(m.regs.size(), 1.0);
    if (!op.taps.empty() && op.taps.size() != m.regs.size())
      fail(ErrorCode::argument, "tap vector size does not match regulator count");
    for (size_t u = 0; u < m.regs.size(); ++u) {
      int tap = op.taps.empty() ? 0 : op.taps[u];
      if (tap < kTapMin || tap > kTapMax)
        fail(ErrorCode::argument,
             "tap position out of range for regulator " + m.regs[u].id);
      unit_ratio[u] = tap_ratio(tap);
    }
    for (const auto& [di, q] : op.dvc_q_kvar) {
      double lim = m.dvc_per_phase_limit_kvar(di) + 1e-9;
      for (double qp : q)
        if (std::abs(qp) > lim)
          fail(ErrorCode::argument, "DVC injection exceeds the per-phase limit");
    }
  }

  double ratio_for(int bank_index, Phase p) const {
    for (int u : m.reg_banks[size_t(bank_index)].units)
      if (has_phase(m.regs[size_t(u)].phases, p)) return unit_ratio[size_t(u)];
    return 1.0;
  }

  void flat_start() {
    PhaseVec rot = slack_rotations();
    int s = m.source;
    for (Phase p : kPhases)
      if (has_phase(m.buses[size_t(s)].phases, p))
        v[size_t(s)][size_t(phase_index(p))] =
            op.slack_pu * base_v[size_t(s)] * rot[size_t(phase_index(p))];
    forward(true);
  }

  // Injection currents drawn at each bus, from present voltages.
  void update_injections() {
    for (size_t b = 0; b < m.buses.size(); ++b) {
      PhaseVec& ib = inj[b];
      ib = PhaseVec{};
      double base = base_v[b];
      for (int li : m.bus_loads[b]) {
        const ZipLoad& L = m.loads[size_t(li)];
        int pi = phase_index(L.phase);
        cplx vb = v[b][size_t(pi)];
        double vm = std::abs(vb);
        if (vm < 1e-9) continue;
        cplx s = zip_power_w(L, load_mult, vm / base);
        ib[size_t(pi)] += std::conj(s / vb);
      }
      for (int gi : m.bus_pvs[b]) {
        const PvSystem& g = m.pvs[size_t(gi)];
        double p_ph =
            g.rated_kw * 1000.0 * op.pv_multiplier(g.profile_id) /
            double(phase_count(g.phases));
        for (Phase p : kPhases) {
          if (!has_phase(g.phases, p)) continue;
          cplx vb = v[b][size_t(phase_index(p))];
          if (std::abs(vb) < 1e-9) continue;
          ib[size_t(phase_index(p))] += std::conj(cplx(-p_ph, 0.0) / vb);
        }
      }
      for (int ci : m.bus_caps[b]) {
        const Capacitor& c = m.caps[size_t(ci)];
        double q_ph = c.kvar_total * 1000.0 / double(phase_count(c.phases));
        double susceptance = q_ph / (base * base);
        for (Phase p : kPhases) {
          if (!has_phase(c.phases, p)) continue;
          int pi = phase_index(p);
          ib[size_t(pi)] += cplx(0.0, susceptance) * v[b][size_t(pi)];
        }
      }
      for (int di : m.bus_dvcs[b]) {
        auto it = op.dvc_q_kvar.find(di);
        if (it == op.dvc_q_kvar.end()) continue;
        const Bus& bus = m.buses[b];
        for (Phase p : kPhases) {
          if (!has_phase(bus.phases, p)) continue;
          int pi = phase_index(p);
          cplx vb = v[b][size_t(pi)];
          double vm2 = std::norm(vb);
          if (vm2 < 1.0) continue;
          // Constant-Q injection re-linearized as a shunt susceptance.
          double susceptance = it->second[size_t(pi)] * 1000.0 / vm2;
          ib[size_t(pi)] += cplx(0.0, susceptance) * vb;
        }
      }
    }
  }

  // Accumulates branch currents leaf-to-root from the drawn injections.
  void backward() {
    for (size_t b = 0; b < m.buses.size(); ++b) branch[b] = inj[b];
    for (size_t k = m.bfs_order.size(); k-- > 1;) {
      int b = m.bfs_order[k];
      int pe = m.parent_edge[size_t(b)];
      const FeederModel::Edge& ed = m.edges[size_t(pe)];
      PhaseVec transfer = branch[size_t(b)];
      if (ed.kind == FeederModel::Edge::regulator) {
        for (Phase p : kPhases) {
          int pi = phase_index(p);
          transfer[size_t(pi)] *= ratio_for(ed.index, p);
        }
      }
      for (int pi = 0; pi < 3; ++pi)
        branch[size_t(ed.from)][size_t(pi)] += transfer[size_t(pi)];
    }
  }

  // Propagates voltages root-to-leaf. With zero_current the drop term is
  // skipped (used for the flat start).
  void forward(bool zero_current = false) {
    for (size_t k = 1; k < m.bfs_order.size(); ++k) {
      int b = m.bfs_order[k];
      int pe = m.parent_edge[size_t(b)];
      const FeederModel::Edge& ed = m.edges[size_t(pe)];
      const PhaseVec& vf = v[size_t(ed.from)];
      PhaseVec& vt = v[size_t(b)];
      if (ed.kind == FeederModel::Edge::regulator) {
        for (Phase p : kPhases) {
          if (!has_phase(m.buses[size_t(b)].phases, p)) continue;
          int pi = phase_index(p);
          vt[size_t(pi)] = ratio_for(ed.index, p) * vf[size_t(pi)];
        }
      } else {
        const LineSegment& ln = m.lines[size_t(ed.index)];
        for (Phase p : kPhases) {
          if (!has_phase(m.buses[size_t(b)].phases, p)) continue;
          int pi = phase_index(p);
          cplx drop = 0.0;
          if (!zero_current)
            for (int qi = 0; qi < 3; ++qi)
              drop += ln.z[pi][qi] * branch[size_t(b)][size_t(qi)];
          vt[size_t(pi)] = vf[size_t(pi)] - drop;
        }
      }
    }
  }

  double max_delta(const std::vector<PhaseVec>& prev) const {
    double d = 0.0;
    for (size_t b = 0; b < v.size(); ++b)
      for (int pi = 0; pi < 3; ++pi)
        d = std::max(d, std::abs(v[b][size_t(pi)] - prev[b][size_t(pi)]) /
                            base_v[b]);
    return d;
  }

  // Worst per-node current mismatch of the last sweep: branch currents from
  // the final backward pass against injections recomputed at the final
  // voltages, in per-unit of the system current base.
  double residual() {
    std::vector<PhaseVec> stored = branch;
    update_injections();
    std::vector<PhaseVec> to_children(m.buses.size(), PhaseVec{});
    for (size_t k = 1; k < m.bfs_order.size(); ++k) {
      size_t c = size_t(m.bfs_order[k]);
      const FeederModel::Edge& ed = m.edges[size_t(m.parent_edge[c])];
      for (Phase p : kPhases) {
        int pi = phase_index(p);
        cplx tr = stored[c][size_t(pi)];
        if (ed.kind == FeederModel::Edge::regulator)
          tr *= ratio_for(ed.index, p);
        to_children[size_t(ed.from)][size_t(pi)] += tr;
      }
    }
    double worst = 0.0;
    for (size_t k = 1; k < m.bfs_order.size(); ++k) {
      size_t b = size_t(m.bfs_order[k]);
      double i_base = (kSystemBaseVa / 3.0) / base_v[b];
      for (int pi = 0; pi < 3; ++pi) {
        cplx r = stored[b][size_t(pi)] - inj[b][size_t(pi)] -
                 to_children[b][size_t(pi)];
        worst = std::max(worst, std::abs(r) / i_base);
      }
    }
    return worst;
  }
};

}  // namespace

SolveResult solve(const FeederModel& model, const OperatingPoint& op,
                  double tol, int max_iter) {
  if (!(tol > 0.0)) fail(ErrorCode::argument, "tolerance must be positive");
  Sweep sw(model, op);
  sw.flat_start();

  double delta = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<PhaseVec> prev = sw.v;
    sw.update_injections();
    sw.backward();
    sw.forward();
    delta = sw.max_delta(prev);
    if (delta < tol) break;
  }
  if (delta >= tol)
    fail(ErrorCode::numerical,
         "power flow did not converge after " + std::to_string(max_iter) +
             " iterations (last voltage change " + std::to_string(delta) +
             " pu)");

  SolveResult out;
  out.iterations = it + 1;
  out.residual_pu = sw.residual();
  out.snapshot.v_pu.assign(model.buses.size(), PhaseVec{});
  for (size_t b = 0; b < model.buses.size(); ++b)
    for (int pi = 0; pi < 3; ++pi)
      out.snapshot.v_pu[b][size_t(pi)] = sw.v[b][size_t(pi)] / sw.base_v[b];
  return out;
}

ControlledResult solve_with_controls(const FeederModel& model,
                                     const OperatingPoint& op, double tol,
                                     int max_iter, int control_max_rounds) {
  ControlledResult out;
  out.taps = op.taps.empty() ? std::vector<int>(model.regs.size(), 0) : op.taps;

  OperatingPoint probe = op;
  std::string last_moved;
  for (int round = 0; round < control_max_rounds; ++round) {
    probe.taps = out.taps;
    out.solved = solve(model, probe, tol, max_iter);
    out.rounds = round + 1;

    bool moved = false;
    for (int u : model.unit_order) {
      const RegulatorUnit& r = model.regs[size_t(u)];
      double vsum = 0.0;
      int n = 0;
      for (Phase p : kPhases) {
        if (!has_phase(r.phases, p)) continue;
        vsum += out.solved.snapshot.v_mag(r.to, p);
        ++n;
      }
      double vctl = vsum / double(n);
      int& tap = out.taps[size_t(u)];
      if (vctl < r.setpoint_pu - r.band_pu / 2.0 && tap < kTapMax) {
        ++tap;
        ++out.tap_moves;
        moved = true;
        last_moved = r.id;
      } else if (vctl > r.setpoint_pu + r.band_pu / 2.0 && tap > kTapMin) {
        --tap;
        ++out.tap_moves;
        moved = true;
        last_moved = r.id;
      }
    }
    if (!moved) return out;
  }
  fail(ErrorCode::numerical,
       "voltage control oscillation: regulator " + last_moved +
           " still moving after " + std::to_string(control_max_rounds) +
           " rounds");
}

}  // namespace fv
