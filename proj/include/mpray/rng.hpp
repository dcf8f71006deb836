#pragma once

// Deterministic random numbers: the mt19937_64 sequence is fixed by the
// standard, and uniforms are derived by bit manipulation rather than
// std::uniform_real_distribution (whose output may differ between standard
// library implementations).  The same seed yields the same doubles anywhere.

#include <cstdint>
#include <random>

namespace mpray {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mpray
