#include "spinjj/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spinjj {

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("rtol and atol must be positive");
  if (!(dt_min > 0.0) || !(dt_min < dt_init)) throw std::invalid_argument("need 0 < dt_min < dt_init");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be positive");
}

std::size_t sample_count(double t_max, double sample_dt) {
  // Grid points strictly below t_max, plus t_max itself. A point within
  // 1e-9 sample spacings of t_max is merged with it.
  const double ratio = t_max / sample_dt;
  auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  if (std::abs(ratio - static_cast<double>(full)) <= 1e-9 * std::max(1.0, ratio)) {
    return full + 1;
  }
  return full + 2;
}

double sample_time(std::size_t k, double t_max, double sample_dt) {
  const std::size_t n = sample_count(t_max, sample_dt);
  if (k + 1 >= n) return t_max;
  return static_cast<double>(k) * sample_dt;
}

void Trajectory::push_back(double t, const SpinorPair& state) {
  times.push_back(t);
  states.push_back(state);
  observables_left.push_back(observables(state.left));
  observables_right.push_back(observables(state.right));
  energy.push_back(spinjj::energy(state, params));
  total_norm.push_back(spinjj::total_norm(state));
  total_magnetization.push_back(spinjj::total_magnetization(state));
  r_plus.push_back(observables_left.back().r_plus);
}

double LedgerDrift::max() const {
  return std::max({total_norm, energy, total_magnetization, r_plus});
}

LedgerDrift ledger_drift(const Trajectory& traj) {
  auto drift = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double scale = std::max(std::abs(v.front()), 1.0);
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x - v.front()));
    return d / scale;
  };
  return {drift(traj.total_norm), drift(traj.energy), drift(traj.total_magnetization),
          drift(traj.r_plus)};
}

StateVec<12> to_vec(const SpinorPair& s) {
  StateVec<12> y{};
  for (std::size_t i = 0; i < 3; ++i) {
    y[2 * i] = s.left[i].real();
    y[2 * i + 1] = s.left[i].imag();
    y[6 + 2 * i] = s.right[i].real();
    y[6 + 2 * i + 1] = s.right[i].imag();
  }
  return y;
}

SpinorPair from_vec(const StateVec<12>& y) {
  SpinorPair s;
  for (std::size_t i = 0; i < 3; ++i) {
    s.left[i] = {y[2 * i], y[2 * i + 1]};
    s.right[i] = {y[6 + 2 * i], y[6 + 2 * i + 1]};
  }
  return s;
}

namespace {

struct SpinorRhs {
  const SystemParams& params;
  StateVec<12> operator()(double, const StateVec<12>& y) const {
    return to_vec(rhs(from_vec(y), params));
  }
};

void require_normalized(const SpinorPair& s) {
  if (!s.is_finite()) throw InvalidStateError("initial state contains non-finite amplitudes");
  for (double n : {s.left.norm_squared(), s.right.norm_squared()}) {
    if (std::abs(n - 1.0) > 1e-9) {
      throw std::invalid_argument("initial well spinor must have unit norm, got |f|^2=" +
                                  std::to_string(n));
    }
  }
}

}  // namespace

SpinorPair step_fixed(const SpinorPair& state, double dt, const SystemParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("step must be positive");
  const StateVec<12> y = rk4_step<12>(SpinorRhs{params}, 0.0, to_vec(state), dt);
  SpinorPair out = from_vec(y);
  if (!out.is_finite()) throw IntegrationError("non-finite state after fixed step", dt);
  return out;
}

Trajectory integrate(const SpinorPair& state0, const SystemParams& params,
                     const IntegratorConfig& cfg) {
  params.validate();
  require_normalized(state0);
  Trajectory traj;
  traj.params = params;
  traj.sample_dt = cfg.sample_dt;
  const std::size_t n = sample_count(cfg.t_max, cfg.sample_dt);
  traj.times.reserve(n);
  traj.states.reserve(n);
  integrate_adaptive_sampled<12>(SpinorRhs{params}, to_vec(state0), cfg,
                                 [&](double t, const StateVec<12>& y) { traj.push_back(t, from_vec(y)); });
  return traj;
}

Trajectory integrate_fixed(const SpinorPair& state0, const SystemParams& params, double dt,
                           double t_max, double sample_dt) {
  params.validate();
  require_normalized(state0);
  if (!(sample_dt > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("need positive t_max and sample_dt");
  Trajectory traj;
  traj.params = params;
  traj.sample_dt = sample_dt;
  integrate_fixed_sampled<12>(SpinorRhs{params}, to_vec(state0), dt, t_max, sample_dt,
                              [&](double t, const StateVec<12>& y) { traj.push_back(t, from_vec(y)); });
  return traj;
}

}  // namespace spinjj
