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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fv/feeder.hpp"

#ifndef FV_DATA_DIR
#define FV_DATA_DIR "data"
#endif

namespace fvtest {

inline std::string data_file(const std::string& name) {
  return std::string(FV_DATA_DIR) + "/" + name;
}

inline std::string write_temp(const std::string& name,
                              const std::string& content) {
  std::filesystem::create_directories("test_tmp");
  std::string path = "test_tmp/" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

// Single-phase two-bus feeder: slack, one line, one ZIP load. The load
// defaults to constant power.
inline fv::FeederModel two_bus(double p_kw, double q_kvar,
                               fv::cplx z_ohm = {0.5, 1.0},
                               const double* zipv7 = nullptr,
                               double dvc_limit_kvar = 0.0) {
  using namespace fv;
  std::vector<Bus> buses(2);
  buses[0] = {"src", phase_bit(Phase::A), 4.16, -1};
  buses[1] = {"b1", phase_bit(Phase::A), 4.16, -1};
  LineSegment l;
  l.from = 0;
  l.to = 1;
  l.phases = phase_bit(Phase::A);
  l.length_km = 1.0;
  l.z[0][0] = z_ohm;
  ZipLoad L;
  L.bus = 1;
  L.phase = Phase::A;
  L.p_nominal_kw = p_kw;
  L.q_nominal_kvar = q_kvar;
  if (zipv7) {
    for (int i = 0; i < 7; ++i) L.zipv[i] = zipv7[i];
  } else {
    double cp[7] = {0, 0, 1, 0, 0, 1, 0.6};
    for (int i = 0; i < 7; ++i) L.zipv[i] = cp[i];
  }
  std::vector<Dvc> dvcs;
  if (dvc_limit_kvar > 0.0) dvcs.push_back({1, dvc_limit_kvar});
  return make_model(buses, {l}, {L}, {}, {}, {}, std::move(dvcs), "two_bus");
}

// Four-bus mixed-phase chain: src(ABC) - b1(ABC) - b2(AC) - b3(A), loads on
// every bus, a capacitor on b1 and optionally PV on b2 and a DVC on b3.
inline fv::FeederModel four_bus(double scale = 1.0, double pv_kw = 0.0,
                                double dvc_limit_kvar = 0.0) {
  using namespace fv;
  PhaseMask abc = parse_phases("ABC");
  PhaseMask ac = parse_phases("AC");
  PhaseMask a = parse_phases("A");
  std::vector<Bus> buses = {{"src", abc, 4.16, -1},
                            {"b1", abc, 4.16, -1},
                            {"b2", ac, 4.16, -1},
                            {"b3", a, 4.16, -1}};

  auto line3 = [&](int from, int to, double len) {
    LineSegment l;
    l.from = from;
    l.to = to;
    l.phases = abc;
    l.length_km = len;
    const double zr[3][3] = {{0.2844, 0.0969, 0.0954},
                             {0.0969, 0.2899, 0.0982},
                             {0.0954, 0.0982, 0.2868}};
    const double zx[3][3] = {{0.6699, 0.3117, 0.2392},
                             {0.3117, 0.6513, 0.2632},
                             {0.2392, 0.2632, 0.6618}};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        l.z[r][c] = cplx(zr[r][c], zx[r][c]) * len;
    return l;
  };
  LineSegment l12 = line3(0, 1, 1.0);
  LineSegment l23;
  l23.from = 1;
  l23.to = 2;
  l23.phases = ac;
  l23.length_km = 1.2;
  l23.z[0][0] = cplx(0.2844, 0.6699) * 1.2;
  l23.z[0][2] = l23.z[2][0] = cplx(0.0954, 0.2392) * 1.2;
  l23.z[2][2] = cplx(0.2868, 0.6618) * 1.2;
  LineSegment l34;
  l34.from = 2;
  l34.to = 3;
  l34.phases = a;
  l34.length_km = 1.5;
  l34.z[0][0] = cplx(0.8259, 0.8373) * 1.5;

  double zip[7] = {0.24, 0.36, 0.40, 0.24, 0.36, 0.40, 0.80};
  auto mk_load = [&](int bus, Phase ph, double p, double q) {
    ZipLoad L;
    L.bus = bus;
    L.phase = ph;
    L.p_nominal_kw = p * scale;
    L.q_nominal_kvar = q * scale;
    for (int i = 0; i < 7; ++i) L.zipv[i] = zip[i];
    return L;
  };
  std::vector<ZipLoad> loads = {
      mk_load(1, Phase::A, 80, 40),  mk_load(1, Phase::B, 120, 60),
      mk_load(1, Phase::C, 60, 30),  mk_load(2, Phase::A, 100, 50),
      mk_load(2, Phase::C, 140, 70), mk_load(3, Phase::A, 110, 55)};
  std::vector<Capacitor> caps = {{1, abc, 90.0}};
  std::vector<PvSystem> pvs;
  if (pv_kw > 0.0) pvs.push_back({2, ac, pv_kw, "pv"});
  std::vector<Dvc> dvcs;
  if (dvc_limit_kvar > 0.0) dvcs.push_back({3, dvc_limit_kvar});
  return make_model(buses, {l12, l23, l34}, loads, pvs, caps, {},
                    std::move(dvcs), "four_bus");
}

}  // namespace fvtest
