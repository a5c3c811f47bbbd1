// SPDX-License-Identifier: Apache-2.0
// Minimal PCG32 generator with per-stream seeding.  Each particle owns its
// own stream, so trajectories do not depend on scheduling or thread count.
#pragma once

#include <cmath>
#include <cstdint>

namespace starfrac {

inline uint64_t splitmix64(uint64_t& s) {
  uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Pcg32 {
 public:
  Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}
  Pcg32(uint64_t seed, uint64_t seq) {
    state_ = 0u;
    inc_ = (seq << 1u) | 1u;
    next();
    state_ += seed;
    next();
  }

  /// Stream for particle `index` derived from a run seed.
  static Pcg32 for_stream(uint64_t run_seed, uint64_t index) {
    uint64_t s = run_seed + 0x632be59bd9b4e019ULL * (index + 1);
    const uint64_t a = splitmix64(s);
    const uint64_t b = splitmix64(s);
    return Pcg32(a, b ^ index);
  }

  uint32_t next() {
    const uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    const uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  /// Uniform in [0,1) with 53 random bits.
  double u01() {
    const uint64_t hi = next();
    const uint64_t lo = next();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log1p(-u01()); }

  /// Standard normal (Marsaglia polar, uncached).
  double normal() {
    while (true) {
      const double u = 2.0 * u01() - 1.0;
      const double v = 2.0 * u01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

 private:
  uint64_t state_;
  uint64_t inc_;
};

}  // namespace starfrac
