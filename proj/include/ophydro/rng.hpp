#pragma once

#include <cstdint>

namespace ophydro {

// splitmix64 finalizer. Passes through zero-sensitive mixing, good enough to
// key independent streams from (seed, stream) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: draw i of stream (seed, stream) is a pure function
// of (seed, stream, i), so walker trajectories are reproducible regardless of
// how work is partitioned across threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream ^ 0x5851F42D4C957F2DULL))) {}

  std::uint64_t next_u64() {
    return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ophydro
