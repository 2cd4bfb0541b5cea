#include "spinjj/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>

namespace spinjj {

// ---------------------------------------------------------------------------
// Observable access

const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names = {
      "M_left", "M_right", "n0_left", "n0_right", "R_plus", "R_minus", "I_plus", "I_minus",
      "R0", "I0", "theta", "rho_pp_minus_rho_00", "energy", "total_norm", "total_Fz"};
  return names;
}

std::vector<double> observable_series(const Trajectory& traj, std::string_view name) {
  auto map_left = [&](auto field) {
    std::vector<double> out;
    out.reserve(traj.size());
    for (const Observables& o : traj.observables_left) out.push_back(field(o));
    return out;
  };
  if (name == "M_left") return map_left([](const Observables& o) { return o.m; });
  if (name == "n0_left") return map_left([](const Observables& o) { return o.n0; });
  if (name == "R_plus") return map_left([](const Observables& o) { return o.r_plus; });
  if (name == "R_minus") return map_left([](const Observables& o) { return o.r_minus; });
  if (name == "I_plus") return map_left([](const Observables& o) { return o.i_plus; });
  if (name == "I_minus") return map_left([](const Observables& o) { return o.i_minus; });
  if (name == "R0") return map_left([](const Observables& o) { return o.r0; });
  if (name == "I0") return map_left([](const Observables& o) { return o.i0; });
  if (name == "theta") return map_left([](const Observables& o) { return o.theta; });
  if (name == "M_right" || name == "n0_right") {
    std::vector<double> out;
    out.reserve(traj.size());
    for (const Observables& o : traj.observables_right) out.push_back(name == "M_right" ? o.m : o.n0);
    return out;
  }
  if (name == "rho_pp_minus_rho_00") {
    std::vector<double> out;
    out.reserve(traj.size());
    for (const SpinorPair& s : traj.states) out.push_back(std::norm(s.left.plus()) - std::norm(s.left.zero()));
    return out;
  }
  if (name == "energy") return traj.energy;
  if (name == "total_norm") return traj.total_norm;
  if (name == "total_Fz") return traj.total_magnetization;

  std::string msg = "unknown observable '" + std::string(name) + "'; valid names:";
  for (const auto& n : observable_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// Extrema

namespace {

void require_same_length(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
}

// Vertex of the parabola through three (possibly unevenly spaced) points.
double parabola_vertex(double t0, double y0, double t1, double y1, double t2, double y2) {
  const double d10 = t1 - t0;
  const double d12 = t1 - t2;
  const double num = d10 * d10 * (y1 - y2) - d12 * d12 * (y1 - y0);
  const double den = d10 * (y1 - y2) - d12 * (y1 - y0);
  if (den == 0.0) return t1;
  const double t = t1 - 0.5 * num / den;
  return std::clamp(t, t0, t2);
}

Extremum make_extremum(std::span<const double> times, std::span<const double> values, std::size_t i) {
  return {i, parabola_vertex(times[i - 1], values[i - 1], times[i], values[i], times[i + 1], values[i + 1]),
          values[i]};
}

}  // namespace

Extrema find_extrema(std::span<const double> times, std::span<const double> values,
                     double hysteresis_fraction) {
  require_same_length(times, values);
  Extrema ex;
  const std::size_t n = values.size();
  if (n < 3) return ex;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return ex;
  const double h = hysteresis_fraction * range;

  auto interior = [n](std::size_t i) { return i > 0 && i + 1 < n; };
  int direction = 0;  // +1 rising (tracking a max), -1 falling (tracking a min)
  std::size_t imax = 0;
  std::size_t imin = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double v = values[i];
    if (direction >= 0 && v > values[imax]) imax = i;
    if (direction <= 0 && v < values[imin]) imin = i;

    if (direction >= 0 && v < values[imax] - h) {
      if (interior(imax)) ex.maxima.push_back(make_extremum(times, values, imax));
      direction = -1;
      imin = i;
    } else if (direction <= 0 && v > values[imin] + h) {
      if (interior(imin)) ex.minima.push_back(make_extremum(times, values, imin));
      direction = 1;
      imax = i;
    }
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Periods

std::string_view to_string(PeriodMethod m) {
  return m == PeriodMethod::ExtremaSpacing ? "ExtremaSpacing" : "AutocorrelationPeak";
}

PeriodEstimate measure_period(std::span<const double> times, std::span<const double> values) {
  const Extrema ex = find_extrema(times, values);
  if (ex.count() < 3) {
    throw InsufficientCyclesError("insufficient cycles: found " + std::to_string(ex.count()) +
                                  " extrema, need at least 3 (extend t_max)");
  }
  const auto& peaks = ex.maxima.size() >= ex.minima.size() ? ex.maxima : ex.minima;
  if (peaks.size() < 2) throw InsufficientCyclesError("insufficient cycles: need two maxima or minima");

  std::vector<double> spacing;
  for (std::size_t i = 1; i < peaks.size(); ++i) spacing.push_back(peaks[i].time - peaks[i - 1].time);
  const double mean = (peaks.back().time - peaks.front().time) / static_cast<double>(spacing.size());
  double var = 0.0;
  for (double s : spacing) var += (s - mean) * (s - mean);
  const double sd = spacing.size() > 1 ? std::sqrt(var / static_cast<double>(spacing.size() - 1)) : 0.0;
  return {mean, PeriodMethod::ExtremaSpacing, static_cast<int>(spacing.size()), sd};
}

PeriodEstimate measure_period(const Trajectory& traj, std::string_view observable) {
  const std::vector<double> v = observable_series(traj, observable);
  return measure_period(traj.times, v);
}

PeriodEstimate measure_period_autocorrelation(std::span<const double> times,
                                              std::span<const double> values) {
  require_same_length(times, values);
  const std::size_t n = values.size();
  if (n < 8) throw InsufficientCyclesError("series too short for autocorrelation");
  const double dt = times[1] - times[0];
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

  const std::size_t max_lag = n / 2;
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (values[i] - mean) * (values[i + lag] - mean);
    r[lag] = s / static_cast<double>(n - lag);
  }
  if (!(r[0] > 0.0)) throw InsufficientCyclesError("constant series has no period");

  std::size_t lag = 1;
  while (lag < max_lag && r[lag] > 0.0) ++lag;
  std::size_t best = 0;
  for (; lag + 1 <= max_lag; ++lag) {
    if (r[lag] > 0.0 && r[lag] >= r[lag - 1] && r[lag] > r[lag + 1]) {
      best = lag;
      break;
    }
  }
  if (best == 0) throw InsufficientCyclesError("no autocorrelation peak within half the series");
  const auto l = static_cast<double>(best);
  const double refined = parabola_vertex(l - 1.0, r[best - 1], l, r[best], l + 1.0, r[best + 1]);
  const double period = refined * dt;
  return {period, PeriodMethod::AutocorrelationPeak,
          static_cast<int>((times.back() - times.front()) / period), dt};
}

// ---------------------------------------------------------------------------
// Extents, trapping, beats

Extent oscillation_extent(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty series has no extent");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

Extent oscillation_extent(const Trajectory& traj, std::string_view observable) {
  const std::vector<double> v = observable_series(traj, observable);
  return oscillation_extent(v);
}

std::vector<double> cycle_ranges(std::span<const double> times, std::span<const double> values) {
  const Extrema ex = find_extrema(times, values);
  std::vector<double> ranges;
  for (std::size_t k = 1; k < ex.maxima.size(); ++k) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(ex.maxima[k - 1].index);
    const auto last = values.begin() + static_cast<std::ptrdiff_t>(ex.maxima[k].index) + 1;
    const auto [lo, hi] = std::minmax_element(first, last);
    ranges.push_back(*hi - *lo);
  }
  return ranges;
}

bool detect_self_trapping(const Trajectory& traj) {
  const std::vector<double> m = observable_series(traj, "M_left");
  const Extrema ex = find_extrema(traj.times, m);
  if (ex.count() < 3) {
    throw InsufficientCyclesError("self-trapping test needs at least 3 extrema of M_left (extend t_max)");
  }
  int sign = 0;
  for (double v : m) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return true;
}

namespace {

std::vector<double> interpolate_extrema(std::span<const double> times, const std::vector<Extremum>& pts) {
  std::vector<double> out(times.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t <= pts.front().time) {
      out[i] = pts.front().value;
      continue;
    }
    if (t >= pts.back().time) {
      out[i] = pts.back().value;
      continue;
    }
    while (pts[seg + 1].time < t) ++seg;
    const double w = (t - pts[seg].time) / (pts[seg + 1].time - pts[seg].time);
    out[i] = (1.0 - w) * pts[seg].value + w * pts[seg + 1].value;
  }
  return out;
}

}  // namespace

BeatEnvelope beat_envelope(std::span<const double> times, std::span<const double> values,
                           double threshold) {
  const Extrema ex = find_extrema(times, values);
  if (ex.count() < 6 || ex.maxima.size() < 2 || ex.minima.size() < 2) {
    throw InsufficientCyclesError("beat envelope needs at least 6 extrema, found " +
                                  std::to_string(ex.count()));
  }
  BeatEnvelope env;
  env.upper = interpolate_extrema(times, ex.maxima);
  env.lower = interpolate_extrema(times, ex.minima);

  double carrier = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) carrier += 0.5 * (env.upper[i] - env.lower[i]);
  carrier /= static_cast<double>(times.size());
  const auto [lo, hi] = std::minmax_element(env.upper.begin(), env.upper.end());
  env.relative_variation = carrier > 0.0 ? (*hi - *lo) / carrier : 0.0;

  if (env.relative_variation >= threshold) {
    try {
      env.modulation_period = measure_period(times, env.upper).period;
    } catch (const InsufficientCyclesError&) {
      // Modulation slower than the record: variation seen, period unknown.
    }
  }
  return env;
}

BeatEnvelope beat_envelope(const Trajectory& traj, std::string_view observable, double threshold) {
  const std::vector<double> v = observable_series(traj, observable);
  return beat_envelope(traj.times, v, threshold);
}

// ---------------------------------------------------------------------------
// Phase portraits

std::vector<double> unwrap_phase(std::span<const double> phase) {
  std::vector<double> out(phase.begin(), phase.end());
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double offset = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double jump = phase[i] - phase[i - 1];
    offset -= kTwoPi * std::round(jump / kTwoPi);
    out[i] = phase[i] + offset;
  }
  return out;
}

std::vector<PortraitPoint> phase_portrait(const Trajectory& traj) {
  std::vector<double> theta;
  theta.reserve(traj.size());
  for (const Observables& o : traj.observables_left) theta.push_back(o.theta);
  const std::vector<double> unwrapped = unwrap_phase(theta);
  std::vector<PortraitPoint> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) out.push_back({unwrapped[i], traj.observables_left[i].m});
  return out;
}

std::vector<PortraitPoint> phase_portrait(const ReducedTrajectory& traj) {
  std::vector<double> theta;
  theta.reserve(traj.states.size());
  for (const ReducedState& s : traj.states) {
    theta.push_back(s.r0 == 0.0 && s.i0 == 0.0 ? 0.0 : std::atan2(s.i0, s.r0));
  }
  const std::vector<double> unwrapped = unwrap_phase(theta);
  std::vector<PortraitPoint> out;
  out.reserve(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out.push_back({unwrapped[i], traj.states[i].m});
  return out;
}

// ---------------------------------------------------------------------------
// Period scan

namespace {

PeriodScanRow scan_point(double j, double lambda_a, const PeriodScanOptions& opt) {
  PeriodScanRow row;
  row.j = j;
  try {
    const ReducedParams rp{j, lambda_a};
    rp.validate();
    row.ratio = lambda_a != 0.0 ? 2.0 * j / std::abs(lambda_a) : std::numeric_limits<double>::infinity();
    if (std::abs(row.ratio - 1.0) < opt.critical_exclusion) {
      row.status = "skipped: within critical exclusion of 2J/|lambda_A| = 1";
      return row;
    }
    row.tau_analytic = analytic_period(rp);

    IntegratorConfig cfg = opt.integrator;
    cfg.t_max = opt.periods * row.tau_analytic;
    cfg.sample_dt = row.tau_analytic / opt.samples_per_period;
    const SystemParams params = SystemParams::symmetric(opt.eps, opt.lambda_s, lambda_a, j);
    const Trajectory traj = integrate(SpinorPair{{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}}, params, cfg);
    const PeriodEstimate est = measure_period(traj, "M_left");
    row.tau_measured = est.period;
    row.uncertainty = est.uncertainty;
    row.ok = true;
    row.status = "ok";
  } catch (const std::exception& e) {
    row.ok = false;
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<PeriodScanRow> period_scan(std::span<const double> j_values, double lambda_a,
                                       const PeriodScanOptions& options) {
  std::vector<PeriodScanRow> rows(j_values.size());
  if (!options.parallel) {
    for (std::size_t i = 0; i < j_values.size(); ++i) rows[i] = scan_point(j_values[i], lambda_a, options);
    return rows;
  }
  std::vector<std::future<PeriodScanRow>> jobs;
  jobs.reserve(j_values.size());
  for (double j : j_values) {
    jobs.push_back(std::async(std::launch::async, scan_point, j, lambda_a, std::cref(options)));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = jobs[i].get();
  return rows;
}

// ---------------------------------------------------------------------------
// Physical estimates

PhysicalEstimateInputs PhysicalEstimateInputs::with_poisson_sigma(double n_atoms, double c_s,
                                                                  double c_a, double mean_density) {
  return {n_atoms, std::sqrt(n_atoms), c_s, c_a, mean_density};
}

PhaseDiffusionTimes phase_diffusion_times(const PhysicalEstimateInputs& inp, double hbar) {
  if (!(inp.n_atoms > 0.0 && inp.sigma_n > 0.0 && inp.c_s > 0.0 && inp.mean_density > 0.0)) {
    throw std::invalid_argument("phase diffusion inputs must be positive");
  }
  const double ratio = hbar * inp.n_atoms / (inp.sigma_n * inp.mean_density);
  const double tau_a = inp.c_a == 0.0 ? std::numeric_limits<double>::infinity() : ratio / std::abs(inp.c_a);
  return {ratio / inp.c_s, tau_a};
}

double period_sensitivity(double n_atoms) {
  if (!(n_atoms >= 1.0)) throw std::invalid_argument("atom number must be at least 1");
  const double s = std::sqrt(n_atoms);
  // tau(N') / tau(N) - 1 = N / N' - 1 with N' = N -+ sqrt(N).
  const double fewer = s / (n_atoms - s);
  const double more = s / (n_atoms + s);
  return std::max(std::abs(fewer), std::abs(more));
}

PhysicalEstimateInputs rb87_reference_inputs() {
  const auto c = CouplingConstants::from_scattering_lengths(101.8 * si::kBohrRadius, 100.4 * si::kBohrRadius,
                                                            si::kRb87Mass);
  return PhysicalEstimateInputs::with_poisson_sigma(1e7, c.c_s, c.c_a, 1.7e13 * 1e6);
}

}  // namespace spinjj
