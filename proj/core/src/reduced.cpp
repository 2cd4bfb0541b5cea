#include "spinjj/reduced.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spinjj/elliptic.hpp"

namespace spinjj {

void ReducedParams::validate() const {
  if (!(std::isfinite(j) && j > 0.0)) throw std::invalid_argument("tunnelling J must be finite and positive");
  if (!std::isfinite(lambda_a)) throw std::invalid_argument("lambda_A must be finite");
}

ReducedState reduced_rhs(const ReducedState& s, const ReducedParams& p) {
  return {4.0 * p.j * s.i0, -2.0 * p.lambda_a * s.i0 * s.m,
          2.0 * p.lambda_a * s.r0 * s.m - p.j * s.m};
}

double conserved_quantity(const ReducedState& s) {
  return s.r0 * s.r0 + s.i0 * s.i0 + 0.25 * s.m * s.m;
}

ReducedState reduced_from_observables(const Observables& o) { return {o.m, o.r0, o.i0}; }

std::string_view to_string(FixedPointFamily f) {
  switch (f) {
    case FixedPointFamily::CenterFamily: return "CenterFamily";
    case FixedPointFamily::SecondFamily: return "SecondFamily";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SelfTrapped: return "SelfTrapped";
    case Regime::Critical: return "Critical";
    case Regime::FullOscillation: return "FullOscillation";
  }
  return "?";
}

std::vector<FixedPointReport> fixed_points(const ReducedParams& p) {
  p.validate();
  std::vector<FixedPointReport> out;
  for (double r0 : {-0.5, 0.0, 0.5}) {
    const ReducedState s{0.0, r0, 0.0};
    out.push_back({s, FixedPointFamily::CenterFamily, stability_eigenvalues(s, p)});
  }
  if (p.lambda_a != 0.0 && p.j <= std::abs(p.lambda_a)) {
    const double r0 = p.j / (2.0 * p.lambda_a);
    for (double m : {-0.5, 0.0, 0.5}) {
      const ReducedState s{m, r0, 0.0};
      out.push_back({s, FixedPointFamily::SecondFamily, stability_eigenvalues(s, p)});
    }
  }
  return out;
}

Matrix3 jacobian(const ReducedState& s, const ReducedParams& p) {
  const double la = p.lambda_a;
  return {{{0.0, 0.0, 4.0 * p.j},
           {-2.0 * la * s.i0, 0.0, -2.0 * la * s.m},
           {2.0 * la * s.r0 - p.j, 2.0 * la * s.m, 0.0}}};
}

std::array<Complex, 3> stability_eigenvalues(const ReducedState& s, const ReducedParams& p) {
  const Matrix3 jac = jacobian(s, p);
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = jac[r][c];
  }
  Eigen::EigenSolver<Eigen::Matrix3d> solver(m, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

double trajectory_relation_r0(double m, const ReducedParams& p) {
  p.validate();
  return p.lambda_a * (1.0 - m * m) / (4.0 * p.j);
}

Regime classify_regime(const ReducedParams& p) {
  p.validate();
  const double diff = 2.0 * p.j - std::abs(p.lambda_a);
  if (std::abs(diff) <= kCriticalTolerance) return Regime::Critical;
  return diff < 0.0 ? Regime::SelfTrapped : Regime::FullOscillation;
}

double analytic_period(const ReducedParams& p) {
  p.validate();
  const double la = std::abs(p.lambda_a);
  if (la == 0.0) return std::numbers::pi / p.j;
  switch (classify_regime(p)) {
    case Regime::Critical:
      throw std::domain_error("period diverges at 2J = |lambda_A| (homoclinic orbit)");
    case Regime::SelfTrapped:
      return 2.0 * elliptic_k(2.0 * p.j / la) / la;
    case Regime::FullOscillation:
      break;
  }
  return 4.0 * elliptic_k(la / (2.0 * p.j)) / (2.0 * p.j);
}

double analytic_magnetization(double t, const ReducedParams& p) {
  p.validate();
  const double la = std::abs(p.lambda_a);
  switch (classify_regime(p)) {
    case Regime::Critical:
      throw std::domain_error("closed form not available at 2J = |lambda_A|");
    case Regime::SelfTrapped:
      return jacobi_cn_dn(la * t, 2.0 * p.j / la).dn;
    case Regime::FullOscillation:
      break;
  }
  return jacobi_cn_dn(2.0 * p.j * t, la / (2.0 * p.j)).cn;
}

ReducedTrajectory integrate_reduced(const ReducedState& s0, const ReducedParams& p,
                                    const IntegratorConfig& cfg) {
  p.validate();
  ReducedTrajectory traj;
  traj.params = p;
  auto f = [&p](double, const StateVec<3>& y) {
    const ReducedState d = reduced_rhs({y[0], y[1], y[2]}, p);
    return StateVec<3>{d.m, d.r0, d.i0};
  };
  integrate_adaptive_sampled<3>(f, StateVec<3>{s0.m, s0.r0, s0.i0}, cfg,
                                [&](double t, const StateVec<3>& y) {
                                  traj.times.push_back(t);
                                  traj.states.push_back({y[0], y[1], y[2]});
                                });
  return traj;
}

}  // namespace spinjj
