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
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "fv/error.hpp"
#include "fv/powerflow.hpp"
#include "oracles.hpp"

using namespace fv;

TEST_CASE("zero load gives exactly the rotated slack everywhere") {
  std::string path = fvtest::write_temp(
      "noload.fdr",
      "bus src ABC 4.16\n"
      "bus b1 ABC 4.16\n"
      "line src b1 ABC 2.0 0.28+j0.67 0.10+j0.31 0.10+j0.24 0.10+j0.31 "
      "0.29+j0.65 0.10+j0.26 0.10+j0.24 0.10+j0.26 0.29+j0.66\n");
  FeederModel m = load_feeder(path);
  OperatingPoint op;
  SolveResult r = solve(m, op, 1e-12, 50);
  PhaseVec rot = slack_rotations();
  for (size_t b = 0; b < 2; ++b)
    for (int pi = 0; pi < 3; ++pi) {
      CHECK(std::abs(r.snapshot.v_pu[b][size_t(pi)] - rot[size_t(pi)]) ==
            doctest::Approx(0.0).epsilon(1e-12));
    }
  CHECK(r.residual_pu < 1e-10);
}

TEST_CASE("two-bus constant-power load matches the closed form and the "
          "newton oracle") {
  // 500 kW / 250 kVAR over 0.5+j1.0 ohm on a 2.4018 kV-LN base.
  FeederModel m = fvtest::two_bus(500.0, 250.0);
  OperatingPoint op;
  SolveResult r = solve(m, op, 1e-12, 200);

  double v1 = m.buses[0].base_v_ln();
  cplx expect =
      fvtest::two_bus_constant_power_voltage(v1, {0.5, 1.0}, 500e3, 250e3);
  cplx got = r.snapshot.v_pu[1][0] * v1;
  CHECK(std::abs(got - expect) / v1 < 1e-8);

  // Frozen value from the closed-form oracle (volts -> pu on 2401.777 V).
  CHECK(std::abs(r.snapshot.v_pu[1][0]) ==
        doctest::Approx(0.901217120898).epsilon(1e-8));

  VoltageSnapshot nr = fvtest::newton_oracle(m, op);
  CHECK(fvtest::max_voltage_diff(r.snapshot, nr) < 1e-8);
}

TEST_CASE("oracle equivalence on the four-bus mixed-phase fixture") {
  FeederModel m = fvtest::four_bus(1.4, 300.0, 0.0);
  OperatingPoint op;
  SolveResult r = solve(m, op, 1e-12, 200);
  VoltageSnapshot nr = fvtest::newton_oracle(m, op);
  CHECK(fvtest::max_voltage_diff(r.snapshot, nr) < 1e-8);
  CHECK(r.residual_pu < 1e-7);
}

TEST_CASE("oracle equivalence holds across load sweeps and dvc injections") {
  for (double scale : {0.4, 0.9, 1.6}) {
    FeederModel m = fvtest::four_bus(scale, 250.0, 300.0);
    OperatingPoint op;
    op.pv_mult["pv"] = 0.8;
    op.dvc_q_kvar[0] = PhaseReal{120.0, 0.0, 0.0};
    SolveResult r = solve(m, op, 1e-12, 200);
    VoltageSnapshot nr = fvtest::newton_oracle(m, op);
    CHECK(fvtest::max_voltage_diff(r.snapshot, nr) < 1e-8);
  }
}

TEST_CASE("randomized small networks match the newton oracle") {
  // Random radial trees of 3-4 buses with mixed phasing, ZIP mixes, caps
  // and PV; the sweep must track the dense solution on all of them.
  std::uint64_t state = 777;
  auto uni = [&](double lo, double hi) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return lo + (hi - lo) * double(state >> 11) * 0x1.0p-53;
  };
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + (trial % 2);
    std::vector<Bus> buses;
    std::vector<LineSegment> lines;
    std::vector<ZipLoad> loads;
    std::vector<Capacitor> caps;
    std::vector<PvSystem> pvs;
    PhaseMask prev_ph = parse_phases("ABC");
    for (int b = 0; b < n; ++b) {
      Bus bus;
      bus.id = "b" + std::to_string(b);
      // Phases shrink monotonically down the chain.
      PhaseMask ph = prev_ph;
      if (b > 0 && uni(0, 1) < 0.4) {
        std::vector<Phase> present;
        for (Phase p : kPhases)
          if (has_phase(prev_ph, p)) present.push_back(p);
        size_t drop = size_t(uni(0, double(present.size()) - 1e-9));
        ph = prev_ph & ~phase_bit(present[drop]);
      }
      bus.phases = ph;
      bus.nominal_kv_ll = 4.16;
      prev_ph = ph;
      buses.push_back(bus);
      if (b > 0) {
        LineSegment l;
        l.from = b - 1;
        l.to = b;
        l.phases = ph;
        l.length_km = uni(0.2, 1.5);
        for (Phase p : kPhases) {
          if (!has_phase(ph, p)) continue;
          int pi = phase_index(p);
          l.z[pi][pi] = cplx(uni(0.2, 0.9), uni(0.4, 1.0)) * l.length_km;
          for (Phase q : kPhases) {
            if (!has_phase(ph, q) || q <= p) continue;
            int qi = phase_index(q);
            l.z[pi][qi] = l.z[qi][pi] =
                cplx(uni(0.05, 0.12), uni(0.15, 0.35)) * l.length_km;
          }
        }
        lines.push_back(l);
        for (Phase p : kPhases) {
          if (!has_phase(ph, p) || uni(0, 1) < 0.3) continue;
          ZipLoad L;
          L.bus = b;
          L.phase = p;
          L.p_nominal_kw = uni(20, 220);
          L.q_nominal_kvar = uni(5, 110);
          double zp = uni(0, 1), ip = uni(0, 1 - zp);
          L.zipv[0] = zp;
          L.zipv[1] = ip;
          L.zipv[2] = 1.0 - zp - ip;
          double zq = uni(0, 1), iq = uni(0, 1 - zq);
          L.zipv[3] = zq;
          L.zipv[4] = iq;
          L.zipv[5] = 1.0 - zq - iq;
          L.zipv[6] = 0.8;
          loads.push_back(L);
        }
        if (uni(0, 1) < 0.3) caps.push_back({b, ph, uni(20, 120)});
        if (uni(0, 1) < 0.3) pvs.push_back({b, ph, uni(50, 300), "pv"});
      }
    }
    FeederModel m = make_model(buses, lines, loads, pvs, caps, {}, {},
                               "random");
    OperatingPoint op;
    op.pv_mult["pv"] = uni(0.0, 1.0);
    SolveResult r = solve(m, op, 1e-12, 300);
    VoltageSnapshot nr = fvtest::newton_oracle(m, op);
    CHECK(fvtest::max_voltage_diff(r.snapshot, nr) < 1e-8);
  }
}

TEST_CASE("slack bus voltage equals the configured slack exactly") {
  FeederModel m = fvtest::four_bus(1.0);
  OperatingPoint op;
  op.slack_pu = 1.02;
  SolveResult r = solve(m, op, 1e-10, 100);
  PhaseVec rot = slack_rotations();
  for (int pi = 0; pi < 3; ++pi)
    CHECK(std::abs(r.snapshot.v_pu[0][size_t(pi)] - 1.02 * rot[size_t(pi)]) <
          1e-12);
}

TEST_CASE("determinism: identical inputs give bit-identical snapshots") {
  FeederModel m = fvtest::four_bus(1.1, 200.0, 300.0);
  OperatingPoint op;
  op.pv_mult["pv"] = 0.5;
  op.dvc_q_kvar[0] = PhaseReal{30.0, 0.0, -20.0};
  SolveResult a = solve(m, op);
  SolveResult b = solve(m, op);
  for (size_t i = 0; i < a.snapshot.v_pu.size(); ++i)
    for (int pi = 0; pi < 3; ++pi) {
      CHECK(a.snapshot.v_pu[i][size_t(pi)].real() ==
            b.snapshot.v_pu[i][size_t(pi)].real());
      CHECK(a.snapshot.v_pu[i][size_t(pi)].imag() ==
            b.snapshot.v_pu[i][size_t(pi)].imag());
    }
}

TEST_CASE("ieee123 at nominal load: residual under 1e-5 pu") {
  FeederModel m = load_feeder(fvtest::data_file("ieee123.fdr"));
  OperatingPoint op;
  op.pv_mult["pv"] = 0.0;
  SolveResult r = solve(m, op, 1e-6, 50);
  CHECK(r.residual_pu < 1e-5);
  // Sanity: all energized voltages in a physically sensible range.
  for (size_t b = 0; b < m.buses.size(); ++b)
    for (Phase p : kPhases)
      if (has_phase(m.buses[b].phases, p)) {
        double v = r.snapshot.v_mag(int(b), p);
        CHECK(v > 0.85);
        CHECK(v < 1.1);
      }
}

TEST_CASE("zip low-voltage floor keeps deep sags solvable") {
  // A load far beyond nominal would diverge as constant power; the
  // constant-impedance floor below the cutoff keeps the sweep stable.
  double zipv[7] = {0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.8};
  FeederModel m = fvtest::two_bus(2500.0, 1200.0, {0.5, 1.0}, zipv);
  OperatingPoint op;
  SolveResult r = solve(m, op, 1e-9, 300);
  CHECK(r.snapshot.v_mag(1, Phase::A) < 0.8);
  CHECK(r.snapshot.v_mag(1, Phase::A) > 0.1);
}

TEST_CASE("monotone dvc response on the bundled feeders") {
  for (const char* file : {"mini13.fdr", "ieee123.fdr"}) {
    FeederModel m = load_feeder(fvtest::data_file(file));
    REQUIRE(m.dvcs.size() == 1);
    int dvc_bus = m.dvcs[0].bus;
    double lim = m.dvc_per_phase_limit_kvar(0);
    OperatingPoint op;
    op.pv_mult["pv"] = 0.3;
    for (Phase p : kPhases) {
      double prev = -1.0;
      for (int k = 0; k <= 10; ++k) {
        OperatingPoint probe = op;
        PhaseReal q{};
        q[size_t(phase_index(p))] = -lim + 2.0 * lim * double(k) / 10.0;
        probe.dvc_q_kvar[0] = q;
        SolveResult r = solve(m, probe, 1e-8, 100);
        double v = r.snapshot.v_mag(dvc_bus, p);
        CHECK(v >= prev - 1e-9);
        prev = v;
      }
    }
  }
}

TEST_CASE("non-convergence reports the worst residual") {
  FeederModel m = fvtest::two_bus(500.0, 250.0);
  OperatingPoint op;
  CHECK_THROWS_WITH_AS(solve(m, op, 1e-14, 2),
                       doctest::Contains("did not converge"), Error);
}

TEST_CASE("regulator control: in-band operating point is a fixpoint") {
  std::string path = fvtest::write_temp(
      "reg_fix.fdr",
      "bus src A 4.16\n"
      "bus b1 A 4.16\n"
      "bus b2 A 4.16\n"
      "line src b1 A 0.3 0.83+j0.84\n"
      "reg b1 b2 A 0.02 1.0\n"
      "load b2 A 50 25 0.24 0.36 0.40 0.24 0.36 0.40 0.80\n");
  FeederModel m = load_feeder(path);
  OperatingPoint op;
  ControlledResult cr = solve_with_controls(m, op);
  CHECK(cr.tap_moves == 0);
  CHECK(cr.taps == std::vector<int>{0});
  CHECK(cr.rounds == 1);
}

TEST_CASE("regulator control settles on the first in-band tap in movement "
          "order") {
  // Heavy load sags the regulated bus well below the band; taps must rise
  // to the first in-band position, matching the exhaustive enumeration.
  std::string path = fvtest::write_temp(
      "reg_rise.fdr",
      "bus src A 4.16\n"
      "bus b1 A 4.16\n"
      "bus b2 A 4.16\n"
      "bus b3 A 4.16\n"
      "line src b1 A 0.5 0.83+j0.84\n"
      "reg b1 b2 A 0.0125 1.0\n"
      "line b2 b3 A 0.2 0.83+j0.84\n"
      "load b3 A 180 80 0.24 0.36 0.40 0.24 0.36 0.40 0.80\n");
  FeederModel m = load_feeder(path);
  OperatingPoint op;

  ControlledResult cr = solve_with_controls(m, op, 1e-8, 200, 40);
  int expected = fvtest::tap_enumeration_oracle(m, op, 0, 0);
  CHECK(cr.taps[0] == expected);
  CHECK(cr.taps[0] > 0);
  double v = cr.solved.snapshot.v_mag(m.bus_index("b2"), Phase::A);
  CHECK(v > 1.0 - 0.0125 / 2.0);
  CHECK(v < 1.0 + 0.0125 / 2.0);
}

TEST_CASE("sub-step band forces a control oscillation error") {
  // Band narrower than one tap step cannot settle: the regulator hunts and
  // the round limit reports it.
  std::string path = fvtest::write_temp(
      "reg_hunt.fdr",
      "bus src A 4.16\n"
      "bus b1 A 4.16\n"
      "bus b2 A 4.16\n"
      "bus b3 A 4.16\n"
      "line src b1 A 1.0 0.83+j0.84\n"
      "reg b1 b2 A 0.02 1.0\n"
      "reg b2 b3 A 0.003 1.0\n"
      "load b3 A 300 140 0.24 0.36 0.40 0.24 0.36 0.40 0.80\n");
  FeederModel m = load_feeder(path);
  OperatingPoint op;
  CHECK_THROWS_WITH_AS(solve_with_controls(m, op, 1e-8, 200, 20),
                       doctest::Contains("oscillation"), Error);
}

TEST_CASE("taps held fixed when controls are not requested") {
  std::string path = fvtest::write_temp(
      "reg_fixed.fdr",
      "bus src A 4.16\n"
      "bus b1 A 4.16\n"
      "bus b2 A 4.16\n"
      "line src b1 A 1.0 0.83+j0.84\n"
      "reg b1 b2 A 0.02 1.0\n"
      "load b2 A 200 100 0.24 0.36 0.40 0.24 0.36 0.40 0.80\n");
  FeederModel m = load_feeder(path);
  OperatingPoint op;
  op.taps = {5};
  SolveResult r = solve(m, op);
  OperatingPoint op2 = op;
  op2.taps = {6};
  SolveResult r2 = solve(m, op2);
  CHECK(r2.snapshot.v_mag(2, Phase::A) > r.snapshot.v_mag(2, Phase::A));
}
