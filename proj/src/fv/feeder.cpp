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
#include "fv/feeder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>

#include "fv/error.hpp"
#include "fv/text.hpp"

namespace fv {

int FeederModel::bus_index(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

const Bus& FeederModel::bus(const std::string& id) const {
  int i = bus_index(id);
  if (i < 0) fail(ErrorCode::argument, "unknown bus \"" + id + "\"");
  return buses[size_t(i)];
}

int FeederModel::zone_count() const {
  int mx = -1;
  for (const Bus& b : buses) mx = std::max(mx, b.zone_id);
  return mx + 1;
}

double FeederModel::dvc_per_phase_limit_kvar(int dvc_index) const {
  const Dvc& d = dvcs.at(size_t(dvc_index));
  int n = phase_count(buses[size_t(d.bus)].phases);
  return d.kvar_limit / double(n);
}

FeederModel make_model(std::vector<Bus> buses, std::vector<LineSegment> lines,
                       std::vector<ZipLoad> loads, std::vector<PvSystem> pvs,
                       std::vector<Capacitor> caps,
                       std::vector<RegulatorUnit> regs, std::vector<Dvc> dvcs,
                       const std::string& ctx) {
  FeederModel m;
  m.buses = std::move(buses);
  m.lines = std::move(lines);
  m.loads = std::move(loads);
  m.pvs = std::move(pvs);
  m.caps = std::move(caps);
  m.regs = std::move(regs);
  m.dvcs = std::move(dvcs);

  if (m.buses.empty()) fail(ErrorCode::validation, ctx + ": no buses");
  for (size_t i = 0; i < m.buses.size(); ++i) {
    const Bus& b = m.buses[i];
    if (b.phases == 0)
      fail(ErrorCode::validation, ctx + ": bus " + b.id + " has no phases");
    if (!(b.nominal_kv_ll > 0.0))
      fail(ErrorCode::validation,
           ctx + ": bus " + b.id + " nominal kV must be positive");
    if (!m.index_.emplace(b.id, int(i)).second)
      fail(ErrorCode::validation, ctx + ": duplicate bus id " + b.id);
  }
  m.source = 0;

  auto check_attachment = [&](int bus, PhaseMask ph, const std::string& what) {
    const Bus& b = m.buses[size_t(bus)];
    if ((ph & ~b.phases) != 0)
      fail(ErrorCode::validation, ctx + ": " + what + " uses phases " +
                                      phases_to_string(ph) + " absent at bus " +
                                      b.id);
  };

  // Group regulator units into banks keyed by (from, to).
  for (size_t u = 0; u < m.regs.size(); ++u) {
    RegulatorUnit& r = m.regs[u];
    r.id = m.buses[size_t(r.from)].id + "-" + m.buses[size_t(r.to)].id + ":" +
           phases_to_string(r.phases);
    if (!(r.band_pu > 0.0))
      fail(ErrorCode::validation, ctx + ": regulator " + r.id +
                                      " band must be positive");
    check_attachment(r.from, r.phases, "regulator " + r.id);
    check_attachment(r.to, r.phases, "regulator " + r.id);
    int bank = -1;
    for (size_t k = 0; k < m.reg_banks.size(); ++k) {
      if (m.reg_banks[k].from == r.from && m.reg_banks[k].to == r.to)
        bank = int(k);
    }
    if (bank < 0) {
      m.reg_banks.push_back({r.from, r.to, {}});
      bank = int(m.reg_banks.size()) - 1;
    } else {
      for (int other : m.reg_banks[size_t(bank)].units) {
        if ((m.regs[size_t(other)].phases & r.phases) != 0)
          fail(ErrorCode::validation,
               ctx + ": regulator " + r.id + " overlaps another unit on the same edge");
      }
    }
    m.reg_banks[size_t(bank)].units.push_back(int(u));
  }

  // Edge list: lines plus regulator banks.
  for (size_t i = 0; i < m.lines.size(); ++i) {
    const LineSegment& l = m.lines[i];
    check_attachment(l.from, l.phases, "line");
    check_attachment(l.to, l.phases, "line");
    for (Phase p : kPhases) {
      if (has_phase(l.phases, p)) {
        int pi = phase_index(p);
        if (!(l.z[pi][pi].real() > 0.0))
          fail(ErrorCode::validation,
               ctx + ": line " + m.buses[size_t(l.from)].id + "-" +
                   m.buses[size_t(l.to)].id +
                   " impedance diagonal must have positive resistance");
      }
    }
    m.edges.push_back({FeederModel::Edge::line, int(i), l.from, l.to});
  }
  for (size_t k = 0; k < m.reg_banks.size(); ++k)
    m.edges.push_back(
        {FeederModel::Edge::regulator, int(k), m.reg_banks[k].from, m.reg_banks[k].to});

  size_t nb = m.buses.size();
  if (m.edges.size() != nb - 1)
    fail(ErrorCode::validation,
         ctx + ": non-radial topology: " + std::to_string(m.edges.size()) +
             " segments for " + std::to_string(nb) + " buses");

  // Breadth-first search from the source; every bus must get exactly one
  // parent. With |E| = |V|-1, full reachability implies a tree.
  std::vector<std::vector<int>> adj(nb);
  for (size_t e = 0; e < m.edges.size(); ++e) {
    adj[size_t(m.edges[e].from)].push_back(int(e));
    adj[size_t(m.edges[e].to)].push_back(int(e));
  }
  m.parent_edge.assign(nb, -1);
  std::vector<char> seen(nb, 0);
  std::deque<int> queue{m.source};
  seen[size_t(m.source)] = 1;
  while (!queue.empty()) {
    int b = queue.front();
    queue.pop_front();
    m.bfs_order.push_back(b);
    for (int e : adj[size_t(b)]) {
      FeederModel::Edge& ed = m.edges[size_t(e)];
      int other = ed.from == b ? ed.to : ed.from;
      if (seen[size_t(other)]) continue;
      // Orient the edge parent -> child.
      if (ed.to != other) std::swap(ed.from, ed.to);
      seen[size_t(other)] = 1;
      m.parent_edge[size_t(other)] = e;
      queue.push_back(other);
    }
  }
  for (size_t b = 0; b < nb; ++b) {
    if (!seen[b])
      fail(ErrorCode::validation,
           ctx + ": bus " + m.buses[b].id + " is not connected to the source");
  }
  // Re-point bank/line endpoints to the oriented direction.
  for (auto& ed : m.edges) {
    if (ed.kind == FeederModel::Edge::line) {
      m.lines[size_t(ed.index)].from = ed.from;
      m.lines[size_t(ed.index)].to = ed.to;
    } else {
      m.reg_banks[size_t(ed.index)].from = ed.from;
      for (int u : m.reg_banks[size_t(ed.index)].units) {
        m.regs[size_t(u)].from = ed.from;
        m.regs[size_t(u)].to = ed.to;
      }
      m.reg_banks[size_t(ed.index)].to = ed.to;
    }
  }

  // Every bus must be energized through its parent edge.
  for (size_t b = 0; b < nb; ++b) {
    int pe = m.parent_edge[b];
    if (pe < 0) continue;
    const FeederModel::Edge& ed = m.edges[size_t(pe)];
    PhaseMask edge_ph = 0;
    if (ed.kind == FeederModel::Edge::line) {
      edge_ph = m.lines[size_t(ed.index)].phases;
    } else {
      for (int u : m.reg_banks[size_t(ed.index)].units)
        edge_ph |= m.regs[size_t(u)].phases;
    }
    if ((m.buses[b].phases & ~edge_ph) != 0)
      fail(ErrorCode::validation,
           ctx + ": bus " + m.buses[b].id + " has phases " +
               phases_to_string(m.buses[b].phases & ~edge_ph) +
               " not carried by its supply segment");
  }

  // Regulator units ordered source-to-load (upstream settles first).
  std::vector<int> depth(nb, 0);
  for (int b : m.bfs_order) {
    if (m.parent_edge[size_t(b)] >= 0)
      depth[size_t(b)] = depth[size_t(m.edges[size_t(m.parent_edge[size_t(b)])].from)] + 1;
  }
  for (size_t u = 0; u < m.regs.size(); ++u) m.unit_order.push_back(int(u));
  std::stable_sort(m.unit_order.begin(), m.unit_order.end(), [&](int a, int b) {
    return depth[size_t(m.regs[size_t(a)].to)] < depth[size_t(m.regs[size_t(b)].to)];
  });

  // Attachments.
  m.bus_loads.assign(nb, {});
  m.bus_pvs.assign(nb, {});
  m.bus_caps.assign(nb, {});
  m.bus_dvcs.assign(nb, {});
  for (size_t i = 0; i < m.loads.size(); ++i) {
    const ZipLoad& L = m.loads[i];
    check_attachment(L.bus, phase_bit(L.phase), "load");
    double sp = L.zipv[0] + L.zipv[1] + L.zipv[2];
    double sq = L.zipv[3] + L.zipv[4] + L.zipv[5];
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
      fail(ErrorCode::validation,
           ctx + ": ZIP coefficients at bus " + m.buses[size_t(L.bus)].id +
               " must each sum to 1");
    if (!(L.zipv[6] > 0.0 && L.zipv[6] < 1.0))
      fail(ErrorCode::validation,
           ctx + ": ZIP cutoff voltage at bus " + m.buses[size_t(L.bus)].id +
               " must lie in (0, 1)");
    m.bus_loads[size_t(L.bus)].push_back(int(i));
  }
  for (size_t i = 0; i < m.pvs.size(); ++i) {
    const PvSystem& p = m.pvs[i];
    check_attachment(p.bus, p.phases, "pv");
    if (!(p.rated_kw > 0.0))
      fail(ErrorCode::validation, ctx + ": pv rating must be positive");
    m.bus_pvs[size_t(p.bus)].push_back(int(i));
  }
  for (size_t i = 0; i < m.caps.size(); ++i) {
    check_attachment(m.caps[i].bus, m.caps[i].phases, "cap");
    m.bus_caps[size_t(m.caps[i].bus)].push_back(int(i));
  }
  for (size_t i = 0; i < m.dvcs.size(); ++i) {
    if (!(m.dvcs[i].kvar_limit > 0.0))
      fail(ErrorCode::validation, ctx + ": dvc limit must be positive");
    m.bus_dvcs[size_t(m.dvcs[i].bus)].push_back(int(i));
  }

  return assign_zones(std::move(m));
}

FeederModel assign_zones(FeederModel model) {
  // Walk the tree in BFS order; crossing a regulator edge opens a new zone.
  std::vector<int> edge_zone(model.edges.size(), -1);
  int next_zone = 1;
  for (Bus& b : model.buses) b.zone_id = -1;
  model.buses[size_t(model.source)].zone_id = 0;
  for (int b : model.bfs_order) {
    int pe = model.parent_edge[size_t(b)];
    if (pe < 0) continue;
    const FeederModel::Edge& ed = model.edges[size_t(pe)];
    int up = model.buses[size_t(ed.from)].zone_id;
    if (ed.kind == FeederModel::Edge::regulator) {
      if (edge_zone[size_t(pe)] < 0) edge_zone[size_t(pe)] = next_zone++;
      model.buses[size_t(b)].zone_id = edge_zone[size_t(pe)];
    } else {
      model.buses[size_t(b)].zone_id = up;
    }
  }
  return model;
}

FeederModel load_feeder(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open feeder file " + path);

  std::vector<Bus> buses;
  std::vector<LineSegment> lines;
  std::vector<ZipLoad> loads;
  std::vector<PvSystem> pvs;
  std::vector<Capacitor> caps;
  std::vector<RegulatorUnit> regs;
  std::vector<Dvc> dvcs;
  std::map<std::string, int> index;

  auto resolve = [&](const std::string& id, int lineno) {
    auto it = index.find(id);
    if (it == index.end())
      parse_fail(path, lineno, "reference to unknown bus \"" + id + "\"");
    return it->second;
  };

  std::string line;
  int lineno = 0;
  // Bus records must precede records referencing them, so references resolve
  // in one pass and errors land on the offending line.
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> t = tokenize(line);
    if (t.empty()) continue;
    const std::string& kw = t[0];
    auto want = [&](size_t n) {
      if (t.size() != n)
        parse_fail(path, lineno,
                   kw + " record expects " + std::to_string(n - 1) +
                       " fields, got " + std::to_string(t.size() - 1));
    };
    if (kw == "bus") {
      want(4);
      Bus b;
      b.id = t[1];
      b.phases = parse_phases(t[2]);
      b.nominal_kv_ll = parse_double(t[3], path, lineno);
      if (index.count(b.id))
        parse_fail(path, lineno, "duplicate bus id " + b.id);
      index[b.id] = int(buses.size());
      buses.push_back(b);
    } else if (kw == "line") {
      if (t.size() < 6) parse_fail(path, lineno, "truncated line record");
      LineSegment l;
      l.from = resolve(t[1], lineno);
      l.to = resolve(t[2], lineno);
      l.phases = parse_phases(t[3]);
      l.length_km = parse_double(t[4], path, lineno);
      if (!(l.length_km > 0.0))
        parse_fail(path, lineno, "line length must be positive");
      int n = phase_count(l.phases);
      want(size_t(5 + n * n));
      std::vector<int> idx;
      for (Phase p : kPhases)
        if (has_phase(l.phases, p)) idx.push_back(phase_index(p));
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          cplx zkm = parse_complex(t[size_t(5 + r * n + c)], path, lineno);
          l.z[idx[size_t(r)]][idx[size_t(c)]] = zkm * l.length_km;
        }
      lines.push_back(l);
    } else if (kw == "load") {
      want(12);
      ZipLoad L;
      L.bus = resolve(t[1], lineno);
      PhaseMask pm = parse_phases(t[2]);
      if (phase_count(pm) != 1)
        parse_fail(path, lineno, "load records are single-phase");
      for (Phase p : kPhases)
        if (has_phase(pm, p)) L.phase = p;
      L.p_nominal_kw = parse_double(t[3], path, lineno);
      L.q_nominal_kvar = parse_double(t[4], path, lineno);
      for (int i = 0; i < 7; ++i)
        L.zipv[i] = parse_double(t[size_t(5 + i)], path, lineno);
      loads.push_back(L);
    } else if (kw == "pv") {
      want(5);
      PvSystem p;
      p.bus = resolve(t[1], lineno);
      p.phases = parse_phases(t[2]);
      p.rated_kw = parse_double(t[3], path, lineno);
      p.profile_id = t[4];
      pvs.push_back(p);
    } else if (kw == "reg") {
      want(6);
      RegulatorUnit r;
      r.from = resolve(t[1], lineno);
      r.to = resolve(t[2], lineno);
      r.phases = parse_phases(t[3]);
      r.band_pu = parse_double(t[4], path, lineno);
      r.setpoint_pu = parse_double(t[5], path, lineno);
      regs.push_back(r);
    } else if (kw == "cap") {
      want(4);
      Capacitor c;
      c.bus = resolve(t[1], lineno);
      c.phases = parse_phases(t[2]);
      c.kvar_total = parse_double(t[3], path, lineno);
      caps.push_back(c);
    } else if (kw == "dvc") {
      want(3);
      Dvc d;
      d.bus = resolve(t[1], lineno);
      d.kvar_limit = parse_double(t[2], path, lineno);
      dvcs.push_back(d);
    } else {
      parse_fail(path, lineno, "unknown record keyword \"" + kw + "\"");
    }
  }

  return make_model(std::move(buses), std::move(lines), std::move(loads),
                    std::move(pvs), std::move(caps), std::move(regs),
                    std::move(dvcs), path);
}

std::map<std::string, TimeSeriesProfile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open profile file " + path);

  auto split_csv = [&](const std::string& row, int lineno) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < row.size(); ++i) {
      char c = row[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < row.size() && row[i + 1] == '"') {
            cur.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          cur.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    if (quoted)
      parse_fail(path, lineno, "unterminated quote in CSV row");
    cells.push_back(cur);
    return cells;
  };

  std::string row;
  if (!std::getline(in, row)) fail(ErrorCode::parse, path + ": empty file");
  std::vector<std::string> header = split_csv(row, 1);
  if (header.size() < 2)
    fail(ErrorCode::parse, path + ": header must name at least one profile");

  size_t ncols = header.size();
  std::vector<std::vector<double>> columns(ncols - 1);
  std::vector<double> stamps;
  int lineno = 1;
  while (std::getline(in, row)) {
    ++lineno;
    if (row.empty()) continue;
    std::vector<std::string> cells = split_csv(row, lineno);
    if (cells.size() != ncols)
      parse_fail(path, lineno,
                 "expected " + std::to_string(ncols) + " cells, got " +
                     std::to_string(cells.size()));
    stamps.push_back(parse_double(cells[0], path, lineno));
    for (size_t c = 1; c < ncols; ++c) {
      double v = parse_double(cells[c], path, lineno);
      if (v < 0.0)
        parse_fail(path, lineno,
                   "negative value in profile " + header[c]);
      columns[c - 1].push_back(v);
    }
  }
  if (stamps.size() < 2)
    fail(ErrorCode::parse, path + ": need at least two rows to fix the resolution");

  double res = stamps[1] - stamps[0];
  if (!(res > 0.0))
    fail(ErrorCode::parse, path + ": timestamps must be strictly increasing");
  for (size_t i = 1; i < stamps.size(); ++i) {
    double expected = stamps[0] + double(i) * res;
    if (std::abs(stamps[i] - expected) > 1e-6)
      fail(ErrorCode::parse,
           path + ": gap in time series, expected timestamp " +
               std::to_string(expected) + " got " + std::to_string(stamps[i]));
  }

  std::map<std::string, TimeSeriesProfile> out;
  for (size_t c = 1; c < ncols; ++c) {
    if (header[c].empty())
      fail(ErrorCode::parse, path + ": empty profile name in header");
    TimeSeriesProfile p;
    p.id = header[c];
    p.resolution_s = res;
    p.values = std::move(columns[c - 1]);
    if (!out.emplace(p.id, std::move(p)).second)
      fail(ErrorCode::parse, path + ": duplicate profile id " + header[c]);
  }
  return out;
}

FeederModel with_dvc_at(FeederModel model, const std::string& bus_id) {
  if (model.dvcs.size() != 1)
    fail(ErrorCode::argument, "model must carry exactly one DVC to relocate");
  int b = model.bus_index(bus_id);
  if (b < 0) fail(ErrorCode::argument, "unknown DVC bus \"" + bus_id + "\"");
  for (auto& v : model.bus_dvcs) v.clear();
  model.dvcs[0].bus = b;
  model.bus_dvcs[size_t(b)].push_back(0);
  return model;
}

}  // namespace fv
