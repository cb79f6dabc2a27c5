#pragma once

#include <cstdint>

namespace mhgrn {

/// Deterministic 64-bit PRNG used everywhere randomness is needed, so that
/// every seed reproduces bit-identical streams across platforms.
///
/// Construction expands the seed with one splitmix64 step:
///   z = seed + 0x9E3779B97F4A7C15
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   state = z ^ (z >> 31)            (0 is remapped to the splitmix64 gamma)
/// and each draw advances an xorshift64* generator:
///   state ^= state >> 12; state ^= state << 25; state ^= state >> 27
///   output = state * 0x2545F4914F6CDD1D
/// Doubles take the top 53 bits of the output, giving values in [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    state_ = z ^ (z >> 31);
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;  // xorshift must not be 0
  }

  std::uint64_t next_u64() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace mhgrn
