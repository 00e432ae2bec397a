#pragma once

#include <cstdint>

namespace fibrow {

// SplitMix64 (Steele/Lea/Flood). A 64-bit counter-plus-mixer generator whose
// output is identical on every platform. All randomness in the library goes
// through the explicit conversions below instead of <random> distributions,
// which the standard leaves implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n) via 128-bit multiply-shift.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Derive an independent stream without advancing this one.
  SplitMix64 fork(uint64_t salt) const {
    SplitMix64 child(state_ ^ (0xD1B54A32D192ED03ull * (salt + 1)));
    child.next_u64();
    return child;
  }

 private:
  uint64_t state_;
};

}  // namespace fibrow
