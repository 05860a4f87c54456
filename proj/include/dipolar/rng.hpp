#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace dipolar {

/// Seeded 64-bit Mersenne Twister with a (seed, stream) pair so that
/// independent chains draw from unrelated sequences.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Full engine state as text (the standard stream format of mt19937_64).
  std::string state() const;
  void restore(const std::string& text);

private:
  std::mt19937_64 engine_;
};

} // namespace dipolar
