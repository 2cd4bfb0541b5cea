#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spinjj/analysis.hpp"
#include "spinjj/integrator.hpp"
#include "test_support.hpp"

using namespace spinjj;
using spinjj::test::max_abs_diff;

namespace {

const SpinorPair kFig4Init{{1, 0, 0}, {0, 0, 1}};

SystemParams fig4(double j, double la = -0.01) { return SystemParams::symmetric(1.0, 1.0, la, j); }

IntegratorConfig cfg(double t_max, double sample_dt) {
  IntegratorConfig c;
  c.t_max = t_max;
  c.sample_dt = sample_dt;
  return c;
}

// Linear two-level limit: lambda_S = lambda_A = eps = 0 gives
// xi(t) = cos(J t) xi0 - i sin(J t) eta0, eta(t) = cos(J t) eta0 - i sin(J t) xi0.
SpinorPair two_level(const SpinorPair& s0, double j, double t) {
  const Complex c = std::cos(j * t), s = Complex(0, -std::sin(j * t));
  return {c * s0.left + s * s0.right, c * s0.right + s * s0.left};
}

}  // namespace

TEST_CASE("sample grid") {
  CHECK(sample_count(2500, 0.5) == 5001);
  CHECK(sample_count(1.0, 0.3) == 5);
  CHECK(sample_time(4, 1.0, 0.3) == 1.0);
  CHECK(sample_time(2, 1.0, 0.3) == doctest::Approx(0.6));
  const Trajectory tr = integrate(kFig4Init, fig4(0.0051), cfg(2500, 0.5));
  CHECK(tr.size() == 5001);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 2500.0);
  for (std::size_t k = 0; k < tr.size(); k += 997) CHECK(tr.times[k] == doctest::Approx(0.5 * k).epsilon(1e-15));
  CHECK(tr.states.front() == kFig4Init);
}

TEST_CASE("RK4 step") {
  const SystemParams p = SystemParams::symmetric(0.0, 0.0, 0.0, 0.01);
  SUBCASE("vanishing step returns the input") {
    CHECK(max_abs_diff(step_fixed(kFig4Init, 1e-20, p), kFig4Init) <= 1e-20);
    CHECK(max_abs_diff(step_fixed(kFig4Init, 1e-300, p), kFig4Init) <= 1e-300);
  }
  SUBCASE("fourth order: halving dt cuts the error by ~16") {
    // Linear case with a known solution: phase exp(-i eps t) on the two-level rotation.
    const SystemParams q = SystemParams::symmetric(1.0, 0.0, 0.0, 0.02);
    auto run = [&](double dt) {
      SpinorPair s = kFig4Init;
      const int n = static_cast<int>(std::lround(20.0 / dt));
      for (int i = 0; i < n; ++i) s = step_fixed(s, dt, q);
      return s;
    };
    const SpinorPair ref = std::polar(1.0, -20.0) * two_level(kFig4Init, 0.02, 20.0);
    const double e1 = max_abs_diff(run(0.1), ref);
    const double e2 = max_abs_diff(run(0.05), ref);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
  }
  CHECK_THROWS_AS(step_fixed(kFig4Init, 0.0, p), std::invalid_argument);
}

TEST_CASE("linear two-level closed form") {
  const SystemParams p = SystemParams::symmetric(0.0, 0.0, 0.0, 0.01);
  const SpinorPair s0{Spinor{0.6, Complex(0, 0.8), 0}, Spinor{0, 0, 1}};
  const Trajectory tr = integrate(s0, p, cfg(1000, 5));
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) worst = std::max(worst, max_abs_diff(tr.states[k], two_level(s0, 0.01, tr.times[k])));
  CHECK(worst < 1e-10);
  const Trajectory fx = integrate_fixed(s0, p, 0.5, 1000, 5);
  double worst_fixed = 0.0;
  for (std::size_t k = 0; k < fx.size(); ++k) worst_fixed = std::max(worst_fixed, max_abs_diff(fx.states[k], two_level(s0, 0.01, fx.times[k])));
  CHECK(worst_fixed < 1e-8);
}

TEST_CASE("figure 4 preset regimes") {
  struct Case {
    double j, lo, hi;
  };
  for (const Case& c : {Case{0.001, 0.9797, 0.9799}, Case{0.0049, 0.19, 1.0}}) {
    const Trajectory tr = integrate(kFig4Init, fig4(c.j), cfg(2500, 0.5));
    const Extent e = oscillation_extent(tr, "M_left");
    CHECK(e.min >= c.lo);
    CHECK(e.min <= c.hi);
    CHECK(e.max == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double j : {0.0051, 0.01}) {
    const Extent e = oscillation_extent(integrate(kFig4Init, fig4(j), cfg(2500, 0.5)), "M_left");
    CHECK(e.min <= -0.999);
  }
}

TEST_CASE("spin-flip symmetric states stay symmetric") {
  const Trajectory tr = integrate(kFig4Init, fig4(0.0051), cfg(1200, 1));
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(std::abs(tr.states[k].left.norm_squared() - tr.states[k].right.norm_squared()) < 1e-9);
    CHECK(std::abs(tr.observables_left[k].m + tr.observables_right[k].m) < 1e-9);
    CHECK(max_abs_diff(tr.states[k].right, spin_flip(tr.states[k].left)) < 1e-9);
  }
}

TEST_CASE("fixed-step RK4 converges to the adaptive solution") {
  const SpinorPair s0 = spin_flip_symmetric(Spinor{0.9962, 0.0872, 0}.normalized());
  const SystemParams p = fig4(0.001);
  const Trajectory a = integrate(s0, p, cfg(500, 5));
  auto gap = [&](double dt) {
    const Trajectory f = integrate_fixed(s0, p, dt, 500, 5);
    REQUIRE(a.size() == f.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, max_abs_diff(a.states[k], f.states[k]));
    return worst;
  };
  const double coarse = gap(0.025), fine = gap(0.0125);
  CHECK(coarse / fine > 15.0);
  CHECK(fine < 1e-4);
}

TEST_CASE("determinism") {
  const Trajectory a = integrate(kFig4Init, fig4(0.003), cfg(300, 0.5));
  const Trajectory b = integrate(kFig4Init, fig4(0.003), cfg(300, 0.5));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.states[k] == b.states[k]);
}

TEST_CASE("conservation ledger at default tolerances") {
  const SystemParams p = fig4(0.0051);
  const double tau = analytic_period({0.0051, -0.01});
  const Trajectory tr = integrate(kFig4Init, p, cfg(3 * tau, 1));
  const LedgerDrift d = ledger_drift(tr);
  CHECK(d.total_norm < 1e-8);
  CHECK(d.energy < 1e-8);
  CHECK(d.total_magnetization < 1e-8);
  CHECK(d.r_plus < 1e-8);
  CHECK(d.max() == std::max({d.total_norm, d.energy, d.total_magnetization, d.r_plus}));
  CHECK(tr.total_norm.front() == 2.0);
  CHECK(tr.energy.front() == doctest::Approx(2.99).epsilon(1e-15));
}

TEST_CASE("trajectory bookkeeping") {
  Trajectory tr;
  tr.params = fig4(0.001);
  tr.push_back(0.0, kFig4Init);
  CHECK(tr.size() == 1);
  CHECK(tr.observables_left[0].m == 1.0);
  CHECK(tr.observables_right[0].m == -1.0);
  CHECK(tr.total_magnetization[0] == 0.0);
  CHECK(tr.r_plus[0] == 0.0);
  CHECK(from_vec(to_vec(kFig4Init)) == kFig4Init);
}

TEST_CASE("integrator errors") {
  SUBCASE("step-size underflow") {
    IntegratorConfig c = cfg(100, 1);
    c.rtol = 1e-30;
    c.atol = 1e-30;
    c.dt_min = 1e-3;
    try {
      integrate(kFig4Init, fig4(0.0051), c);
      FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
      CHECK(e.t_reached() >= 0.0);
      CHECK(std::string(e.what()).find("dt_min") != std::string::npos);
    }
  }
  SUBCASE("unnormalized initial state") {
    CHECK_THROWS_AS(integrate({{1, 1, 0}, {0, 0, 1}}, fig4(0.001), cfg(10, 1)), std::invalid_argument);
    CHECK_THROWS_AS(integrate({{1.00001, 0, 0}, {0, 0, 1}}, fig4(0.001), cfg(10, 1)), std::invalid_argument);
    CHECK_NOTHROW(integrate({{1 + 1e-11, 0, 0}, {0, 0, 1}}, fig4(0.001), cfg(10, 1)));
  }
  SUBCASE("non-finite initial state") {
    CHECK_THROWS_AS(integrate({{NAN, 0, 0}, {0, 0, 1}}, fig4(0.001), cfg(10, 1)), InvalidStateError);
  }
  SUBCASE("config validation") {
    IntegratorConfig c = cfg(10, 1);
    c.rtol = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = cfg(10, 1);
    c.dt_min = c.dt_init;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = cfg(10, 0);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = cfg(INFINITY, 1);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_NOTHROW(cfg(10, 1).validate());
  }
}
