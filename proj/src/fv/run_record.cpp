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
#include "fv/run_record.hpp"

#include <bit>
#include <cstring>

namespace fv {

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_double(std::string& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

}  // namespace

std::string ScenarioResult::canonical_bytes() const {
  std::string out;
  out.reserve(snapshots.size() * 64);
  put_u64(out, std::uint64_t(steps()));
  put_u64(out, seed);
  put_u64(out, config_hash);
  put_u64(out, std::uint64_t(dvc_bus + 1));
  for (const VoltageSnapshot& s : snapshots) {
    for (const PhaseVec& pv : s.v_pu) {
      for (const cplx& c : pv) {
        put_double(out, c.real());
        put_double(out, c.imag());
      }
    }
  }
  for (const auto& row : taps)
    for (int t : row) put_u64(out, std::uint64_t(t + 1000));
  for (const auto& q : dvc_q_kvar)
    for (double d : q) put_double(out, d);
  for (const auto& id : curve_ids) put_str(out, id);
  for (const auto& o : objectives) {
    put_double(out, o.f_mu);
    put_double(out, o.f_theta);
    put_double(out, o.combined);
  }
  for (const auto& id : reg_unit_ids) put_str(out, id);
  return out;
}

}  // namespace fv
