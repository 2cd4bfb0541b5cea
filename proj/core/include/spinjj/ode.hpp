#pragma once

// Generic explicit Runge-Kutta drivers over fixed-size real state vectors.
// Used by both the six-amplitude spinor system and the reduced
// three-variable system.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinjj {

template <std::size_t N>
using StateVec = std::array<double, N>;

struct IntegratorConfig {
  double rtol = 1e-12;
  double atol = 1e-14;
  double dt_init = 1e-2;
  double dt_min = 1e-12;
  double t_max = 1.0;
  double sample_dt = 0.5;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// Failure of an integration, with the time reached before it stopped.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t_reached)
      : std::runtime_error(what), t_reached_(t_reached) {}
  double t_reached() const { return t_reached_; }

 private:
  double t_reached_;
};

/// Uniform sample grid 0, dt, 2dt, ..., t_max (last interval may be short).
std::size_t sample_count(double t_max, double sample_dt);
double sample_time(std::size_t k, double t_max, double sample_dt);

namespace detail {

template <std::size_t N>
inline bool all_finite(const StateVec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

// y + h * sum_i c_i k_i
template <std::size_t N, std::size_t S>
inline StateVec<N> combine(const StateVec<N>& y, double h, const std::array<double, S>& c,
                           const std::array<const StateVec<N>*, S>& k) {
  StateVec<N> out = y;
  for (std::size_t s = 0; s < S; ++s) {
    if (c[s] == 0.0) continue;
    const double hc = h * c[s];
    const StateVec<N>& ks = *k[s];
    for (std::size_t i = 0; i < N; ++i) out[i] += hc * ks[i];
  }
  return out;
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step.
template <std::size_t N, class Rhs>
StateVec<N> rk4_step(const Rhs& f, double t, const StateVec<N>& y, double h) {
  const StateVec<N> k1 = f(t, y);
  const StateVec<N> k2 = f(t + 0.5 * h, detail::combine<N, 1>(y, 0.5 * h, {1.0}, {&k1}));
  const StateVec<N> k3 = f(t + 0.5 * h, detail::combine<N, 1>(y, 0.5 * h, {1.0}, {&k2}));
  const StateVec<N> k4 = f(t + h, detail::combine<N, 1>(y, h, {1.0}, {&k3}));
  return detail::combine<N, 4>(y, h / 6.0, {1.0, 2.0, 2.0, 1.0}, {&k1, &k2, &k3, &k4});
}

/// Fixed-step RK4 from 0 to cfg.t_max. Each sample interval is divided into
/// ceil(interval / dt) equal steps so samples land exactly on the grid.
template <std::size_t N, class Rhs, class Sink>
void integrate_fixed_sampled(const Rhs& f, StateVec<N> y, double dt, double t_max,
                             double sample_dt, Sink&& sink) {
  if (!(dt > 0.0)) throw std::invalid_argument("fixed step must be positive");
  const std::size_t n = sample_count(t_max, sample_dt);
  double t = 0.0;
  sink(t, y);
  for (std::size_t k = 1; k < n; ++k) {
    const double target = sample_time(k, t_max, sample_dt);
    const auto steps = static_cast<std::size_t>(std::ceil((target - t) / dt - 1e-9));
    const double h = (target - t) / static_cast<double>(std::max<std::size_t>(steps, 1));
    for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s) {
      y = rk4_step<N>(f, t + static_cast<double>(s) * h, y, h);
    }
    t = target;
    if (!detail::all_finite(y)) throw IntegrationError("non-finite state", t);
    sink(t, y);
  }
}

/// Adaptive Dormand-Prince 5(4) with PI step-size control.
///
/// Accepted steps satisfy |err_i| <= atol + rtol * max(|y_i|, |y_new_i|)
/// for every component. Steps are shortened to land exactly on each sample
/// time, so sink(t, y) receives integrator states, never interpolants.
template <std::size_t N, class Rhs, class Sink>
void integrate_adaptive_sampled(const Rhs& f, StateVec<N> y, const IntegratorConfig& cfg,
                                Sink&& sink) {
  cfg.validate();
  if (!detail::all_finite(y)) throw IntegrationError("non-finite initial state", 0.0);

  // Dormand-Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // b - b_hat
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  constexpr double kSafety = 0.9;
  constexpr double kFacMin = 0.2;
  constexpr double kFacMax = 10.0;
  constexpr double kBeta = 0.04;
  constexpr double kAlpha = 0.2 - 0.75 * kBeta;

  const std::size_t n_samples = sample_count(cfg.t_max, cfg.sample_dt);
  double t = 0.0;
  double h = cfg.dt_init;
  double err_prev = 1e-4;
  bool last_rejected = false;
  StateVec<N> k1 = f(t, y);

  sink(t, y);
  for (std::size_t k = 1; k < n_samples; ++k) {
    const double target = sample_time(k, cfg.t_max, cfg.sample_dt);
    while (t < target) {
      double h_step = h;
      bool landing = false;
      if (t + h_step >= target - 0.01 * h_step) {
        h_step = target - t;
        landing = true;
      }

      const StateVec<N> k2 = f(t + c2 * h_step, detail::combine<N, 1>(y, h_step, {a21}, {&k1}));
      const StateVec<N> k3 =
          f(t + c3 * h_step, detail::combine<N, 2>(y, h_step, {a31, a32}, {&k1, &k2}));
      const StateVec<N> k4 =
          f(t + c4 * h_step, detail::combine<N, 3>(y, h_step, {a41, a42, a43}, {&k1, &k2, &k3}));
      const StateVec<N> k5 = f(t + c5 * h_step, detail::combine<N, 4>(y, h_step, {a51, a52, a53, a54},
                                                                      {&k1, &k2, &k3, &k4}));
      const StateVec<N> k6 =
          f(t + h_step, detail::combine<N, 5>(y, h_step, {a61, a62, a63, a64, a65},
                                              {&k1, &k2, &k3, &k4, &k5}));
      const StateVec<N> y_new = detail::combine<N, 6>(y, h_step, {b1, 0.0, b3, b4, b5, b6},
                                                      {&k1, &k2, &k3, &k4, &k5, &k6});
      const StateVec<N> k7 = f(t + h_step, y_new);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h_step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
        const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err) || !detail::all_finite(y_new)) {
        if (h_step <= cfg.dt_min) throw IntegrationError("non-finite state", t);
        h = 0.25 * h_step;
        last_rejected = true;
        continue;
      }

      if (err <= 1.0) {
        double fac = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_prev, kBeta);
        fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
        const double h_next = h_step * fac;
        err_prev = std::max(err, 1e-4);
        t = landing ? target : t + h_step;
        y = y_new;
        k1 = k7;
        h = landing ? std::max(h_next, h) : h_next;
        last_rejected = false;
      } else {
        const double fac = std::max(kFacMin, kSafety * std::pow(err, -kAlpha));
        h = h_step * fac;
        last_rejected = true;
        if (h < cfg.dt_min) {
          throw IntegrationError("step size underflow below dt_min at t=" + std::to_string(t), t);
        }
      }
    }
    sink(t, y);
  }
}

}  // namespace spinjj
