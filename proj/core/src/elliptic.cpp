#include "spinjj/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinjj {

namespace {

constexpr int kMaxAgmSteps = 64;

void check_modulus(double k) {
  if (!(k >= 0.0 && k < 1.0)) {
    throw std::domain_error("elliptic modulus must satisfy 0 <= k < 1, got " + std::to_string(k));
  }
}

}  // namespace

double agm(double a, double g) {
  if (!(a >= 0.0 && g >= 0.0)) throw std::domain_error("agm needs non-negative arguments");
  for (int i = 0; i < kMaxAgmSteps && std::abs(a - g) >= 1e-15 * a; ++i) {
    const double next_a = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = next_a;
  }
  return 0.5 * (a + g);
}

double elliptic_k(double k) {
  check_modulus(k);
  return std::numbers::pi / (2.0 * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))));
}

CnDn jacobi_cn_dn(double u, double k) {
  check_modulus(k);
  if (k == 0.0) return {std::cos(u), 1.0};

  // Descending AGM sequence a_n, c_n (Abramowitz & Stegun 16.4).
  std::array<double, kMaxAgmSteps + 1> a{};
  std::array<double, kMaxAgmSteps + 1> c{};
  a[0] = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  c[0] = k;
  int n = 0;
  while (std::abs(c[n]) >= 1e-16 * a[n] && n < kMaxAgmSteps) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  if (n == 0) return {std::cos(u), 1.0};

  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  const double cn = std::cos(phi);
  // dn^2 = k'^2 + k^2 cn^2: a sum of non-negative terms, exact at cn = 0.
  const double dn = std::sqrt((1.0 - k) * (1.0 + k) + k * k * cn * cn);
  return {cn, dn};
}

}  // namespace spinjj
