#pragma once

#include <cstdint>

namespace demonlab {

// Deterministic per-stream generator. State is a pure function of
// (master_seed, stream_index), so trials can be farmed out in any order.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : state_(master_seed + stream_index * 0x9E3779B97F4A7C15ull) {}

  // SplitMix64 step.
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, k) by rejection: accept u when
  // u < 2^64 - (2^64 mod k), return u mod k.
  std::uint64_t uniform_below(std::uint64_t k) {
    const std::uint64_t rem = (0 - k) % k;  // 2^64 mod k
    for (;;) {
      const std::uint64_t u = next_u64();
      if (rem == 0 || u < (0 - rem)) return u % k;
    }
  }

  // Uniform double in [0,1).
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace demonlab
