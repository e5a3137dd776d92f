#pragma once

#include <cmath>
#include <cstdint>

namespace refgame {

// SplitMix64 (Steele, Lea & Flood; the constants of SplittableRandom).
// Pinned here so generated trees, simulation runs and sweeps are
// bit-identical across platforms; <random> distributions are not.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in {0, ..., bound-1}. Plain modulo; bias is < bound / 2^64.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Exponential inter-event time by inversion; rate > 0.
  double next_exponential(double rate) {
    return -std::log1p(-next_double()) / rate;
  }

 private:
  std::uint64_t state_;
};

}  // namespace refgame
