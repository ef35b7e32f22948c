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

#include <map>
#include <string>
#include <vector>

#include "fv/types.hpp"

namespace fv {

/// One node of the feeder. zone_id is filled by assign_zones(): index of the
/// voltage zone delimited by series regulators, source zone is 0.
struct Bus {
  std::string id;
  PhaseMask phases = 0;
  double nominal_kv_ll = 0.0;
  int zone_id = -1;

  double base_v_ln() const { return nominal_kv_ll * 1000.0 / 1.7320508075688772; }
};

/// Series line between two buses with a full per-phase impedance matrix in
/// ohms (mutual coupling included). z is stored 3x3 with zeros on absent
/// phases.
struct LineSegment {
  int from = -1;
  int to = -1;
  PhaseMask phases = 0;
  double length_km = 0.0;
  cplx z[3][3] = {};  // total ohms for the segment (per-km entries * length)
};

/// Single-phase wye ZIP load. zipv = [z_p, i_p, p_p, z_q, i_q, p_q, v_cutoff].
struct ZipLoad {
  int bus = -1;
  Phase phase = Phase::A;
  double p_nominal_kw = 0.0;
  double q_nominal_kvar = 0.0;
  double zipv[7] = {0, 0, 1, 0, 0, 1, 0.8};
};

/// PV plant at unity power factor; rated power split equally across phases.
struct PvSystem {
  int bus = -1;
  PhaseMask phases = 0;
  double rated_kw = 0.0;
  std::string profile_id;
};

/// Fixed shunt capacitor bank; rated kvar split equally across phases and
/// modelled as constant susceptance (output scales with voltage squared).
struct Capacitor {
  int bus = -1;
  PhaseMask phases = 0;
  double kvar_total = 0.0;
};

/// One series regulator unit. A record listing several phases is a
/// gang-operated bank (single tap for all its phases, controlled on the mean
/// voltage); single-phase records are independent units.
struct RegulatorUnit {
  int from = -1;
  int to = -1;
  PhaseMask phases = 0;
  double band_pu = 0.0;      // total band width around the setpoint
  double setpoint_pu = 1.0;  // regulated-bus voltage target
  std::string id;            // "<from>-<to>:<phases>"
};

/// Dynamic VAR compensator attachment point. kvar_limit is the total device
/// rating; the per-phase limit is the equal split across the bus phases.
struct Dvc {
  int bus = -1;
  double kvar_limit = 0.0;
};

struct TimeSeriesProfile {
  std::string id;
  double resolution_s = 0.0;
  std::vector<double> values;  // per-unit multipliers, >= 0
};

/// Validated radial feeder. Immutable after load; safe to share read-only
/// across parallel runs. Topology arrays (parent/order) are precomputed at
/// load so solvers never re-derive them.
struct FeederModel {
  std::vector<Bus> buses;
  std::vector<LineSegment> lines;
  std::vector<ZipLoad> loads;
  std::vector<PvSystem> pvs;
  std::vector<Capacitor> caps;
  std::vector<RegulatorUnit> regs;
  std::vector<Dvc> dvcs;

  int source = 0;  // bus index of the slack (first bus record in the file)

  // Tree topology rooted at the source. parent_edge[b]: index into `edges`
  // below; order: buses in breadth-first order from the source.
  struct Edge {
    enum Kind { line, regulator } kind;
    int index;  // into lines or into reg_banks
    int from, to;
  };
  std::vector<Edge> edges;
  std::vector<int> parent_edge;  // per bus; -1 for the source
  std::vector<int> bfs_order;

  // Regulator banks: units grouped by (from, to) edge; one bank = one series
  // edge in the tree. unit_order: units sorted source-to-load for control.
  struct RegBank {
    int from, to;
    std::vector<int> units;  // indices into regs
  };
  std::vector<RegBank> reg_banks;
  std::vector<int> unit_order;

  // Attachments per bus, filled at load.
  std::vector<std::vector<int>> bus_loads;
  std::vector<std::vector<int>> bus_pvs;
  std::vector<std::vector<int>> bus_caps;
  std::vector<std::vector<int>> bus_dvcs;

  int bus_index(const std::string& id) const;  // -1 when unknown
  const Bus& bus(const std::string& id) const;  // throws Error(argument)
  int zone_count() const;

  double dvc_per_phase_limit_kvar(int dvc_index) const;

 private:
  std::map<std::string, int> index_;
  friend FeederModel load_feeder(const std::string& path);
  friend FeederModel make_model(std::vector<Bus> buses,
                                std::vector<LineSegment> lines,
                                std::vector<ZipLoad> loads,
                                std::vector<PvSystem> pvs,
                                std::vector<Capacitor> caps,
                                std::vector<RegulatorUnit> regs,
                                std::vector<Dvc> dvcs, const std::string& ctx);
};

/// Parses and validates a feeder description file. The first `bus` record is
/// the source/slack bus. Errors carry the offending line number; dangling bus
/// references and non-radial topologies are rejected.
FeederModel load_feeder(const std::string& path);

/// Builds a validated model from already-parsed parts (used by tests and by
/// load_feeder). `ctx` names the input in error messages.
FeederModel make_model(std::vector<Bus> buses, std::vector<LineSegment> lines,
                       std::vector<ZipLoad> loads, std::vector<PvSystem> pvs,
                       std::vector<Capacitor> caps,
                       std::vector<RegulatorUnit> regs, std::vector<Dvc> dvcs,
                       const std::string& ctx = "model");

/// Assigns zone ids: every bus carries the zone of the nearest upstream
/// regulator bank, the source region is zone 0. Returns the model with
/// zone_id filled on every bus.
FeederModel assign_zones(FeederModel model);

/// Loads per-id time series from an RFC-4180 style CSV. First column is the
/// timestamp in seconds, remaining header cells name the profiles. Rejects
/// irregular timestamps (reporting the expected one) and negative values.
std::map<std::string, TimeSeriesProfile> load_profiles(const std::string& path);

/// Moves the feeder's DVC to `bus_id` (placement search support). The model
/// must carry exactly one DVC.
FeederModel with_dvc_at(FeederModel model, const std::string& bus_id);

}  // namespace fv
