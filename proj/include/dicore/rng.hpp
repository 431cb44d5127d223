#pragma once

#include <cstdint>

namespace dicore {

// SplitMix64. Small, fast, and the exact sequence is part of the
// reproducibility contract: identical seeds give identical streams on
// every platform.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Exact uniform on {0,...,bound-1} (Lemire rejection, no modulo bias).
  uint64_t below(uint64_t bound) {
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < bound) {
      uint64_t t = (0 - bound) % bound;
      while (lo < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }
};

inline uint64_t mix64_fin(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Splits a base seed and a stream index into an independent per-stream
// seed. Used for per-trial RNGs so results do not depend on scheduling.
inline uint64_t mix64(uint64_t seed, uint64_t idx) {
  return mix64_fin(seed ^ mix64_fin(idx + 0x9e3779b97f4a7c15ULL));
}

}
