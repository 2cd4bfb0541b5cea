#include <cmath>
#include <sstream>

#include "doctest.h"
#include "spinjj/wellmodes.hpp"

using namespace spinjj;

namespace {

const Grid1D kGrid{-6.0, 6.0, 1024};

double integral_of_square(const std::vector<double>& f, double h) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return trapezoid(sq, h);
}

}  // namespace

TEST_CASE("grid") {
  CHECK(kGrid.spacing() == doctest::Approx(12.0 / 1023));
  CHECK(kGrid.x(0) == -6.0);
  CHECK(kGrid.x(1023) == 6.0);
  for (std::size_t i = 0; i < 1024; i += 17) CHECK(kGrid.x(i) + kGrid.x(1023 - i) == 0.0);
  CHECK_THROWS_AS((Grid1D{-1, 1, 63}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((Grid1D{1, 1, 100}).validate(), std::invalid_argument);
  CHECK(trapezoid({1, 1, 1}, 0.5) == 1.0);
}

TEST_CASE("potentials") {
  const DoubleWellPotential q = DoubleWellPotential::quartic(10, 2);
  CHECK(q(0.0) == 10.0);
  CHECK(q(2.0) == 0.0);
  CHECK(q(-2.0) == 0.0);
  for (double x = 0.1; x < 6; x += 0.37) CHECK(q(x) == q(-x));
  CHECK_THROWS_AS(DoubleWellPotential::quartic(10, 0), std::invalid_argument);

  const DoubleWellPotential t = DoubleWellPotential::tabulated({-1, 0, 2}, {4, 0, 2});
  CHECK(t(-0.5) == 2.0);
  CHECK(t(1.0) == 1.0);
  CHECK(t(-5.0) == 4.0);
  CHECK(t(5.0) == 2.0);
  CHECK(t.shape() == DoubleWellPotential::Shape::Tabulated);
  CHECK_THROWS_AS(DoubleWellPotential::tabulated({0, 0}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWellPotential::tabulated({0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(DoubleWellPotential::tabulated({0, 1}, {1, NAN}), std::invalid_argument);

  std::istringstream good("# x V\n-1 4\n0 0  # centre\n\n2 2\n");
  CHECK(DoubleWellPotential::from_table(good)(1.0) == 1.0);
  std::istringstream bad("0 1\n1\n");
  CHECK_THROWS_AS(DoubleWellPotential::from_table(bad), std::invalid_argument);
}

TEST_CASE("quartic well, V0 = 10, a = 2") {
  const DoubleWellPotential pot = DoubleWellPotential::quartic(10, 2);
  const WellModes m = lowest_modes(pot, kGrid);
  const double h = kGrid.spacing();
  CHECK(m.e_s < m.e_a);
  CHECK(m.e_a < m.e_third);
  // Splitting small against the single-well level spacing.
  CHECK(m.e_a - m.e_s < 0.05 * (m.e_third - m.e_a));
  CHECK(m.gap_ratio > 10);
  CHECK(m.warning.empty());
  CHECK(integral_of_square(m.psi_s, h) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integral_of_square(m.psi_a, h) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(integral_of_square(m.sqrt_n_left, h) - 1.0) < 1e-10);
  CHECK(std::abs(integral_of_square(m.sqrt_n_right, h) - 1.0) < 1e-10);
  for (std::size_t i = 0; i < kGrid.n_points; ++i) {
    CHECK(std::abs(m.sqrt_n_left[i] - m.sqrt_n_right[kGrid.n_points - 1 - i]) < 1e-9);
  }
  // Home-well lobe positive; any negative lobe in the far well is small.
  double lo = 0.0;
  for (double v : m.sqrt_n_left) lo = std::min(lo, v);
  CHECK(lo > -1e-2);
  CHECK(m.sqrt_n_left[kGrid.n_points / 3] > 0.1);

  const WellParameters w = well_parameters(m, pot, kGrid, {});
  CHECK(std::abs(w.params.eps_left - w.params.eps_right) <= 1e-10 * std::abs(w.params.eps_left));
  CHECK(std::abs(w.params.lambda_s_left - w.params.lambda_s_right) <= 1e-10 * w.params.lambda_s_left);
  CHECK(std::abs(w.params.lambda_a_left - w.params.lambda_a_right) <= 1e-10 * std::abs(w.params.lambda_a_left));
  CHECK(w.params.lambda_a_left < 0.0);
  CHECK(w.params.j == std::abs(w.j_signed));
  CHECK(w.j_signed < 0.0);
  CHECK(w.overlap < 0.05);
  CHECK(std::abs(w.params.j - 0.5 * (m.e_a - m.e_s)) < 0.1 * 0.5 * (m.e_a - m.e_s));
  // Same numbers with the symmetric constructor.
  SystemParams sym = SystemParams::symmetric(w.params.eps_left, w.params.lambda_s_left, w.params.lambda_a_left, w.params.j);
  CHECK(std::abs(sym.eps_right - w.params.eps_right) <= 1e-10 * std::abs(sym.eps_right));

  CHECK_THROWS_AS(well_parameters(m, pot, Grid1D{-6, 6, 512}, {}), std::invalid_argument);
}

TEST_CASE("barrier scan") {
  double prev = INFINITY;
  for (double v0 : {5.0, 10.0, 20.0, 40.0}) {
    const DoubleWellPotential pot = DoubleWellPotential::quartic(v0, 2);
    const WellModes m = lowest_modes(pot, kGrid);
    const WellParameters w = well_parameters(m, pot, kGrid, {});
    CHECK(w.params.j < prev);
    prev = w.params.j;
    if (w.overlap < 0.05) CHECK(std::abs(w.params.j - 0.5 * (m.e_a - m.e_s)) < 0.1 * 0.5 * (m.e_a - m.e_s));
  }
}

TEST_CASE("grid refinement: second order") {
  const DoubleWellPotential pot = DoubleWellPotential::quartic(10, 2);
  auto energies = [&](std::size_t n) {
    const WellModes m = lowest_modes(pot, Grid1D{-6, 6, n});
    return std::pair{m.e_s, m.e_a};
  };
  const auto a = energies(513), b = energies(1025), c = energies(2049);
  CHECK((a.first - b.first) / (b.first - c.first) == doctest::Approx(4.0).epsilon(0.01));
  CHECK((a.second - b.second) / (b.second - c.second) == doctest::Approx(4.0).epsilon(0.01));
  const auto f = energies(8193), g = energies(16385);
  CHECK(std::abs(f.first - g.first) < 1e-6 * std::abs(g.first));
  CHECK(std::abs(f.second - g.second) < 1e-6 * std::abs(g.second));
}

TEST_CASE("harmonic limit") {
  // Tabulated 0.5 x^2: levels 0.5, 1.5, 2.5 with spacing omega = 1.
  std::vector<double> xs, vs;
  for (int i = 0; i <= 1600; ++i) {
    const double x = -8 + 0.01 * i;
    xs.push_back(x);
    vs.push_back(0.5 * x * x);
  }
  const WellModes m = lowest_modes(DoubleWellPotential::tabulated(xs, vs), Grid1D{-8, 8, 2049});
  CHECK(m.e_s == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(m.e_a == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(m.e_third == doctest::Approx(2.5).epsilon(1e-4));
  CHECK_FALSE(m.warning.empty());
}
