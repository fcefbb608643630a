#pragma once

#include <cstdint>

namespace rcl {

/// SplitMix64 finalizer. Bijective 64-bit mixer with full avalanche; the
/// dependable core of a counter-based generator.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Combines up to three indices (n-point, family member, trial) into one
/// stream id so every trial owns a disjoint, order-independent substream.
inline std::uint64_t substream(std::uint64_t a, std::uint64_t b = 0,
                               std::uint64_t c = 0) {
  return mix64(a ^ mix64(b ^ mix64(c)));
}

/**
 * Counter-based random stream: output i is a pure function of
 * (seed, stream, i), so identical configs reproduce identical draws no
 * matter how trials are scheduled across threads. Not for cryptography.
 */
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed) ^ stream)) {}

  std::uint64_t next_u64() {
    return mix64(key_ ^ (counter_++ * 0x9e3779b97f4a7c15ULL));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Negligible modulo bias for desk-scale
  /// bounds (bound << 2^64).
  std::uint64_t next_below(std::uint64_t bound) {
    return next_u64() % bound;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rcl
