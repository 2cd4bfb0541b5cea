#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "spinjj/tridiagonal.hpp"

using namespace spinjj;

namespace {

SymTridiagonal random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  SymTridiagonal t;
  for (std::size_t i = 0; i < n; ++i) t.diag.push_back(3 * u(rng));
  for (std::size_t i = 0; i + 1 < n; ++i) t.off.push_back(u(rng));
  return t;
}

Eigen::MatrixXd dense(const SymTridiagonal& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = t.diag[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = t.off[i];
  }
  return m;
}

double residual(const SymTridiagonal& t, const EigenPair& p) {
  const Eigen::Map<const Eigen::VectorXd> v(p.vector.data(), static_cast<Eigen::Index>(p.vector.size()));
  return (dense(t) * v - p.value * v).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("Sturm count and bisection against a dense solver") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SymTridiagonal t = random_matrix(40, seed);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(t)).eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      CHECK(eigenvalue_bisection(t, static_cast<std::size_t>(k)) == doctest::Approx(ev(k)).epsilon(1e-12));
      CHECK(sturm_count(t, ev(k) - 1e-9) == static_cast<std::size_t>(k));
    }
    CHECK(sturm_count(t, -1e6) == 0);
    CHECK(sturm_count(t, 1e6) == 40);
  }
  CHECK_THROWS_AS(eigenvalue_bisection(random_matrix(5, 1), 5), std::out_of_range);
  SymTridiagonal bad{{1, 2}, {1, 2}};
  CHECK_THROWS_AS(sturm_count(bad, 0.0), std::invalid_argument);
}

TEST_CASE("shifted solve against a dense solver") {
  const SymTridiagonal t = random_matrix(30, 7);
  std::vector<double> b(30);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(1.0 + i);
  const std::vector<double> x = solve_shifted(t, 0.37, b);
  const Eigen::MatrixXd a = dense(t) - 0.37 * Eigen::MatrixXd::Identity(30, 30);
  const Eigen::VectorXd ref = a.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 30));
  for (int i = 0; i < 30; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-10));
  SUBCASE("zero diagonal needs pivoting") {
    const SymTridiagonal z{{0, 0, 0, 0}, {1, 1, 1}};
    const std::vector<double> y = solve_shifted(z, 0.0, {1, 2, 3, 4});
    const Eigen::VectorXd r = dense(z) * Eigen::Map<const Eigen::VectorXd>(y.data(), 4);
    for (int i = 0; i < 4; ++i) CHECK(r(i) == doctest::Approx(i + 1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(solve_shifted(t, 0.0, {1, 2}), std::invalid_argument);
}

TEST_CASE("lowest eigenpairs") {
  const SymTridiagonal t = random_matrix(200, 11);
  const auto pairs = lowest_eigenpairs(t, 4);
  REQUIRE(pairs.size() == 4);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(residual(t, pairs[i]) < 1e-10);
    double n = 0.0;
    for (double v : pairs[i].vector) n += v * v;
    CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t j = 0; j < i; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) d += pairs[i].vector[k] * pairs[j].vector[k];
      CHECK(std::abs(d) < 1e-10);
    }
  }
  CHECK_THROWS_AS(lowest_eigenpairs(t, 201), std::out_of_range);
}

TEST_CASE("near-degenerate pair: two decoupled blocks") {
  // Two identical blocks joined by a tiny coupling give a pair split by ~1e-12.
  const SymTridiagonal block = random_matrix(50, 5);
  SymTridiagonal t;
  t.diag = block.diag;
  t.diag.insert(t.diag.end(), block.diag.rbegin(), block.diag.rend());
  t.off = block.off;
  t.off.push_back(1e-12);
  t.off.insert(t.off.end(), block.off.rbegin(), block.off.rend());
  const auto pairs = lowest_eigenpairs(t, 2);
  CHECK(pairs[1].value - pairs[0].value < 1e-10);
  for (const EigenPair& p : pairs) CHECK(residual(t, p) < 1e-10);
  double d = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) d += pairs[0].vector[k] * pairs[1].vector[k];
  CHECK(std::abs(d) < 1e-8);
}
