#pragma once

#include <cstddef>
#include <vector>

#include "spinjj/model.hpp"
#include "spinjj/ode.hpp"

namespace spinjj {

/// Uniformly sampled solution of the six-amplitude system together with
/// per-well observables and the conserved-quantity ledger.
struct Trajectory {
  SystemParams params;
  double sample_dt = 0.0;
  std::vector<double> times;
  std::vector<SpinorPair> states;
  std::vector<Observables> observables_left;
  std::vector<Observables> observables_right;
  std::vector<double> energy;
  std::vector<double> total_norm;
  std::vector<double> total_magnetization;
  std::vector<double> r_plus;  // R+ of the left well

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }

  /// Appends a sample and evaluates all derived columns.
  void push_back(double t, const SpinorPair& state);
};

/// Largest deviation of each ledger column from its initial value,
/// divided by max(|initial|, 1).
struct LedgerDrift {
  double total_norm = 0.0;
  double energy = 0.0;
  double total_magnetization = 0.0;
  double r_plus = 0.0;

  double max() const;
};

LedgerDrift ledger_drift(const Trajectory& traj);

StateVec<12> to_vec(const SpinorPair& s);
SpinorPair from_vec(const StateVec<12>& y);

/// One classical RK4 step of the coupled spinor equations.
SpinorPair step_fixed(const SpinorPair& state, double dt, const SystemParams& params);

/// Adaptive integration to cfg.t_max on the grid k * cfg.sample_dt.
///
/// Each well spinor of state0 must have unit norm within 1e-9. The state
/// is never renormalized during the run. Throws IntegrationError on step
/// size underflow or a non-finite state.
Trajectory integrate(const SpinorPair& state0, const SystemParams& params,
                     const IntegratorConfig& cfg);

/// Fixed-step RK4 counterpart of integrate(), for convergence studies.
Trajectory integrate_fixed(const SpinorPair& state0, const SystemParams& params, double dt,
                           double t_max, double sample_dt);

}  // namespace spinjj
