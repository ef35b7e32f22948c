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
#include "fv/reports.hpp"

#include <filesystem>
#include <fstream>

#include "fv/error.hpp"
#include "fv/text.hpp"

namespace fv {

namespace {

std::ofstream open_out(const std::string& path) {
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  return out;
}

std::string pct(long long part, long long total) {
  if (total == 0) return "0";
  return fmt_double(100.0 * double(part) / double(total));
}

constexpr double kHistLo = 0.90;
constexpr double kHistHi = 1.10;
constexpr int kHistBins = 40;

}  // namespace

std::vector<std::string> emit_reports(const ScenarioResult& result,
                                      const DispatchConfig& cfg,
                                      const std::string& label,
                                      const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory " + out_dir);

  std::vector<std::string> written;
  auto path_for = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / (label + "_" + name)).string();
  };

  MetricsReport rep = score_run(result, cfg);

  // Band bins per phase plus per-regulator tap counts (Tables 3-11 shape).
  {
    std::string p = path_for("metrics.csv");
    std::ofstream out = open_out(p);
    out << "case,phase,v_out_lower,v_in,v_out_upper,pct_out_lower,pct_in,"
           "pct_out_upper,total_points";
    for (const auto& [id, n] : rep.tap_changes) out << ",tap_" << id;
    out << "\n";
    const char* names[3] = {"A", "B", "C"};
    for (int pi = 0; pi < 3; ++pi) {
      size_t i = size_t(pi);
      out << label << "," << names[pi] << "," << rep.phase_out_lower[i] << ","
          << rep.phase_in[i] << "," << rep.phase_out_upper[i] << ","
          << pct(rep.phase_out_lower[i], rep.phase_points[i]) << ","
          << pct(rep.phase_in[i], rep.phase_points[i]) << ","
          << pct(rep.phase_out_upper[i], rep.phase_points[i]) << ","
          << rep.phase_points[i];
      for (const auto& [id, n] : rep.tap_changes) {
        // Unit ids end with ":<phases>".
        size_t colon = id.rfind(':');
        bool on_phase = colon != std::string::npos &&
                        id.find(names[pi][0], colon) != std::string::npos;
        out << "," << (on_phase ? n : 0);
      }
      out << "\n";
    }
    out << label << ",total," << rep.v_out_lower << "," << rep.v_in << ","
        << rep.v_out_upper << "," << pct(rep.v_out_lower, rep.total_points)
        << "," << pct(rep.v_in, rep.total_points) << ","
        << pct(rep.v_out_upper, rep.total_points) << "," << rep.total_points;
    for (const auto& [id, n] : rep.tap_changes) out << "," << n;
    out << "\n";
    written.push_back(p);
  }

  // Voltage histogram over the monitored points (Figs. 8/10 shape); the
  // two outer bins are open so the counts always sum to total_points.
  {
    std::string p = path_for("histogram.csv");
    std::ofstream out = open_out(p);
    out << "phase,bin_lo,bin_hi,count\n";
    const double width = (kHistHi - kHistLo) / kHistBins;
    for (Phase ph : kPhases) {
      std::vector<long long> bins(size_t(kHistBins) + 2, 0);
      for (const VoltageSnapshot& s : result.snapshots) {
        for (const BusPhase& mp : result.monitored) {
          if (mp.phase != ph) continue;
          double v = s.v_mag(mp.bus, mp.phase);
          int k;
          if (v < kHistLo)
            k = 0;
          else if (v >= kHistHi)
            k = kHistBins + 1;
          else
            k = 1 + int((v - kHistLo) / width);
          ++bins[size_t(k)];
        }
      }
      char name = phase_char(ph);
      out << name << ",-inf," << fmt_double(kHistLo) << "," << bins[0] << "\n";
      for (int k = 0; k < kHistBins; ++k)
        out << name << "," << fmt_double(kHistLo + k * width) << ","
            << fmt_double(kHistLo + (k + 1) * width) << ","
            << bins[size_t(k) + 1] << "\n";
      out << name << "," << fmt_double(kHistHi) << ",+inf,"
          << bins[size_t(kHistBins) + 1] << "\n";
    }
    written.push_back(p);
  }

  // Tap trajectories (Fig. 11 shape).
  {
    std::string p = path_for("taps.csv");
    std::ofstream out = open_out(p);
    out << "t";
    for (const std::string& id : result.reg_unit_ids) out << "," << id;
    out << "\n";
    for (int t = 0; t < result.steps(); ++t) {
      out << t;
      for (size_t u = 0; u < result.reg_unit_ids.size(); ++u)
        out << "," << result.taps[size_t(t)][u];
      out << "\n";
    }
    written.push_back(p);
  }

  // Q-V trajectory at the DVC bus (Fig. 13 shape).
  if (result.dvc_index >= 0) {
    std::string p = path_for("qv.csv");
    std::ofstream out = open_out(p);
    out << "t,phase,v_pu,q_kvar\n";
    for (int t = 0; t < result.steps(); ++t) {
      const VoltageSnapshot& s = result.snapshots[size_t(t)];
      for (Phase ph : kPhases) {
        int pi = phase_index(ph);
        if (std::abs(s.v_pu[size_t(result.dvc_bus)][size_t(pi)]) == 0.0)
          continue;
        out << t << "," << phase_char(ph) << ","
            << fmt_double(s.v_mag(result.dvc_bus, ph)) << ","
            << fmt_double(result.dvc_q_kvar[size_t(t)][size_t(pi)]) << "\n";
      }
    }
    written.push_back(p);
  }

  // Run metadata.
  {
    std::string p = path_for("run_info.csv");
    std::ofstream out = open_out(p);
    out << "key,value\n";
    out << "case," << label << "\n";
    out << "steps," << result.steps() << "\n";
    out << "seed," << result.seed << "\n";
    out << "config_hash," << result.config_hash << "\n";
    out << "dvc_bus," << result.dvc_bus << "\n";
    out << "monitored_points," << result.monitored.size() << "\n";
    out << "fixpoint_warnings," << result.fixpoint_warnings << "\n";
    written.push_back(p);
  }
  return written;
}

void emit_placement_csv(const PlacementReport& report,
                        const std::string& path) {
  std::ofstream out = open_out(path);
  out << "candidate,v_out_lower,v_in,v_out_upper,pct_in,out_of_band_share,"
         "tap_total,winner\n";
  for (const PlacementEntry& e : report.entries) {
    const MetricsReport& m = e.metrics;
    out << e.bus << "," << m.v_out_lower << "," << m.v_in << ","
        << m.v_out_upper << "," << pct(m.v_in, m.total_points) << ","
        << fmt_double(m.out_of_band_share()) << "," << m.tap_total() << ","
        << (e.bus == report.winner ? 1 : 0) << "\n";
  }
}

void emit_sweep_csv(const std::vector<WeightSweepRow>& rows,
                    const std::string& path) {
  std::ofstream out = open_out(path);
  out << "w_theta,v_out_lower,v_in,v_out_upper,pct_in,tap_total\n";
  for (const WeightSweepRow& r : rows) {
    out << fmt_double(r.w_theta) << "," << r.metrics.v_out_lower << ","
        << r.metrics.v_in << "," << r.metrics.v_out_upper << ","
        << pct(r.metrics.v_in, r.metrics.total_points) << ","
        << r.metrics.tap_total() << "\n";
  }
}

void emit_curve_records(const CurveSchedule& schedule, PhaseMask dvc_phases,
                        const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# per-window Volt/VAR curve records, update period "
      << schedule.update_period_min << " min\n";
  out << "# low-PV timesteps: " << vvc_record(schedule.standard) << "\n";
  for (const CurveSchedule::Window& w : schedule.windows) {
    for (Phase p : kPhases) {
      if (!has_phase(dvc_phases, p)) continue;
      out << "# window " << w.id << " steps " << w.t0 << "-" << (w.t1 - 1)
          << " phase " << phase_char(p) << "\n";
      out << vvc_record(w.curve[size_t(phase_index(p))]) << "\n";
    }
  }
}

}  // namespace fv
