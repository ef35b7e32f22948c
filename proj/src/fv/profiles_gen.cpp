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
#include "fv/profiles_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fv/error.hpp"
#include "fv/text.hpp"

namespace fv {

namespace {

// splitmix64: tiny, stable across platforms, good enough for profile noise.
struct Rng {
  std::uint64_t state;
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() {  // [0, 1)
    return double(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
  }
};

double bell(double t_min, double center_min, double sigma_min) {
  double u = (t_min - center_min) / sigma_min;
  return std::exp(-u * u);
}

std::vector<double> clear_sky() {
  std::vector<double> pv(1440, 0.0);
  for (int t = 0; t < 1440; ++t) {
    double p = bell(double(t), 755.0, 215.0);
    pv[size_t(t)] = p < 0.02 ? 0.0 : p;
  }
  return pv;
}

}  // namespace

DayProfiles generate_synthetic_profiles(const std::string& day_type,
                                        std::uint64_t seed) {
  bool cloudy;
  if (day_type == "sunny") {
    cloudy = false;
  } else if (day_type == "cloudy") {
    cloudy = true;
  } else {
    fail(ErrorCode::argument,
         "day type must be \"sunny\" or \"cloudy\", got \"" + day_type + "\"");
  }

  DayProfiles day;
  day.pv = clear_sky();

  if (cloudy) {
    // Hazy-bright ceiling: broken-sky days rarely reach clear-sky output.
    for (double& v : day.pv) v *= 0.72;
    Rng rng{seed * 2654435761ull + 0x9e3779b9ull};
    // Cloud transmittance track: clear stretches interrupted by dips with
    // two-minute edges (an aggregate of spatially spread plants).
    std::vector<double> trans(1440, 1.0);
    int t = 5 * 60 + rng.uniform_int(0, 30);
    while (t < 19 * 60) {
      int clear_len = rng.uniform_int(3, 16);
      t += clear_len;
      if (t >= 19 * 60) break;
      double depth = rng.uniform(0.35, 0.85);
      int hold = rng.uniform_int(2, 9);
      if (t < 1440) trans[size_t(t)] = 1.0 - depth / 2.0;
      ++t;
      for (int k = 0; k < hold && t < 1440; ++k, ++t)
        trans[size_t(t)] = 1.0 - depth;
      if (t < 1440) trans[size_t(t)] = 1.0 - depth / 2.0;
      ++t;
    }
    for (int i = 0; i < 1440; ++i) day.pv[size_t(i)] *= trans[size_t(i)];
    // Per-minute change capped at 60% of rating.
    for (int i = 1; i < 1440; ++i) {
      double lo = day.pv[size_t(i - 1)] - 0.6;
      double hi = day.pv[size_t(i - 1)] + 0.6;
      day.pv[size_t(i)] = std::clamp(day.pv[size_t(i)], std::max(lo, 0.0), hi);
    }
  }

  // Mixed residential/commercial load: morning shoulder, broad midday
  // plateau and an evening peak over a night valley, with mild seeded
  // jitter. Always strictly positive.
  Rng lrng{seed ^ 0xabcdef1234567890ull};
  day.load.resize(1440);
  double jitter = 0.0;
  for (int t = 0; t < 1440; ++t) {
    double shape = 0.36 + 0.20 * bell(double(t), 7.6 * 60.0, 95.0) +
                   0.52 * bell(double(t), 19.2 * 60.0, 135.0) +
                   0.38 * bell(double(t), 13.0 * 60.0, 170.0);
    jitter = 0.85 * jitter + 0.15 * lrng.uniform(-0.05, 0.05);
    day.load[size_t(t)] = std::clamp(shape * (1.0 + jitter), 0.18, 1.1);
  }
  return day;
}

void write_profiles_csv(const DayProfiles& day, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write profile file " + path);
  out << "timestamp,load,pv\n";
  for (size_t t = 0; t < day.load.size(); ++t) {
    out << (t * 60) << "," << fmt_double(day.load[t]) << ","
        << fmt_double(day.pv[t]) << "\n";
  }
  if (!out) fail(ErrorCode::io, "failed writing profile file " + path);
}

}  // namespace fv
