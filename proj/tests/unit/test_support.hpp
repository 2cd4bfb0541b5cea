#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "spinjj/model.hpp"

namespace spinjj::test {

// Seeded source of random spinors for property tests.
class RandomStates {
 public:
  explicit RandomStates(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Spinor spinor() {
    std::normal_distribution<double> g(0.0, 1.0);
    Spinor f;
    for (std::size_t c = 0; c < 3; ++c) f[c] = {g(rng_), g(rng_)};
    return f;
  }

  Spinor unit_spinor() { return spinor().normalized(); }

  SpinorPair unit_pair() { return {unit_spinor(), unit_spinor()}; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(const Spinor& a, const Spinor& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < 3; ++c) m = std::max(m, std::abs(a[c] - b[c]));
  return m;
}

inline double max_abs_diff(const SpinorPair& a, const SpinorPair& b) {
  return std::max(max_abs_diff(a.left, b.left), max_abs_diff(a.right, b.right));
}

}  // namespace spinjj::test
