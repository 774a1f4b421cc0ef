#pragma once

#include <cstdint>
#include <random>

namespace indicatrix {

// mt19937_64 with hand-rolled uniform mappings. The engine itself is pinned
// by the standard; the standard *distributions* are not, so deriving reals
// and indices from raw engine output keeps runs reproducible bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // uniform in [0, 1)
  double real01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // uniform in [a, b)
  double real_in(double a, double b) { return a + (b - a) * real01(); }

  // uniform in {0, ..., n-1}; modulo bias is irrelevant at these ranges
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(bits() % n); }

  // uniform in {lo, ..., hi} inclusive
  int int_in(int lo, int hi) {
    return lo + static_cast<int>(bits() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace indicatrix
