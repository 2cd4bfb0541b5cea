#pragma once

// Reduced magnetization dynamics for spin-flip-symmetric states with an
// empty |0> component:
//
//   dM/dt  = 4 J I0
//   dR0/dt = -2 lambda_A I0 M
//   dI0/dt = 2 lambda_A R0 M - J M
//
// plus its first integrals, fixed points, linear stability and the
// closed-form solution from M(0) = 1, R0(0) = I0(0) = 0.

#include <array>
#include <string_view>
#include <vector>

#include "spinjj/model.hpp"
#include "spinjj/ode.hpp"

namespace spinjj {

struct ReducedState {
  double m = 0.0;
  double r0 = 0.0;
  double i0 = 0.0;

  friend bool operator==(const ReducedState&, const ReducedState&) = default;
};

struct ReducedParams {
  double j = 0.0;
  double lambda_a = 0.0;

  /// Throws std::invalid_argument unless j is finite and positive and
  /// lambda_a is finite.
  void validate() const;
};

/// Two parameters within this absolute distance count as equal when
/// comparing 2J against |lambda_A|.
inline constexpr double kCriticalTolerance = 1e-12;

ReducedState reduced_rhs(const ReducedState& s, const ReducedParams& p);

/// C = R0^2 + I0^2 + M^2 / 4, a first integral of the reduced flow.
double conserved_quantity(const ReducedState& s);

/// (M, R0, I0) of one well.
ReducedState reduced_from_observables(const Observables& o);

enum class FixedPointFamily { CenterFamily, SecondFamily };

std::string_view to_string(FixedPointFamily f);

struct FixedPointReport {
  ReducedState location;
  FixedPointFamily family = FixedPointFamily::CenterFamily;
  std::array<Complex, 3> eigenvalues{};
};

/// Representative members of the fixed-point families: I0 = M = 0 at
/// R0 in {-1/2, 0, 1/2}, and (when lambda_A != 0 and J <= |lambda_A|)
/// I0 = 0, R0 = J / (2 lambda_A) at M in {-1/2, 0, 1/2}.
std::vector<FixedPointReport> fixed_points(const ReducedParams& p);

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// d(reduced_rhs)/d(M, R0, I0).
Matrix3 jacobian(const ReducedState& s, const ReducedParams& p);

std::array<Complex, 3> stability_eigenvalues(const ReducedState& s, const ReducedParams& p);

/// R0 = lambda_A (1 - M^2) / (4 J) on the orbit through M = 1, R0 = I0 = 0.
double trajectory_relation_r0(double m, const ReducedParams& p);

enum class Regime { SelfTrapped, Critical, FullOscillation };

std::string_view to_string(Regime r);

/// SelfTrapped iff 2J < |lambda_A|, Critical iff equal within
/// kCriticalTolerance.
Regime classify_regime(const ReducedParams& p);

/// Oscillation period of M from M(0) = 1:
///   2 K(2J/|lambda_A|) / |lambda_A|   for 2J < |lambda_A|
///   4 K(|lambda_A|/2J) / (2J)         for 2J > |lambda_A|
/// and pi / J when lambda_A = 0. Throws std::domain_error at the critical
/// point, where the period diverges.
double analytic_period(const ReducedParams& p);

/// M(t) from M(0) = 1, R0(0) = I0(0) = 0: dn(|lambda_A| t, 2J/|lambda_A|)
/// when self-trapped, cn(2J t, |lambda_A|/(2J)) otherwise.
double analytic_magnetization(double t, const ReducedParams& p);

struct ReducedTrajectory {
  ReducedParams params;
  std::vector<double> times;
  std::vector<ReducedState> states;
};

ReducedTrajectory integrate_reduced(const ReducedState& s0, const ReducedParams& p,
                                    const IntegratorConfig& cfg);

}  // namespace spinjj
