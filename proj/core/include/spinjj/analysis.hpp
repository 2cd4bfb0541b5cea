#pragma once

// Post-processing of sampled trajectories: extrema and period extraction,
// oscillation extents, self-trapping detection, beat envelopes, phase
// portraits, period scans and the physical-unit estimates.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinjj/integrator.hpp"
#include "spinjj/reduced.hpp"

namespace spinjj {

/// Not enough extrema in a series to extract the requested quantity.
class InsufficientCyclesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Observable access

/// Names accepted by observable_series(). Single-well quantities without a
/// suffix refer to the left well.
const std::vector<std::string>& observable_names();

/// Column of a trajectory by name. Throws std::invalid_argument listing the
/// valid names for an unknown one.
std::vector<double> observable_series(const Trajectory& traj, std::string_view name);

// ---------------------------------------------------------------------------
// Extrema

struct Extremum {
  std::size_t index = 0;
  double time = 0.0;   // parabola-refined
  double value = 0.0;  // sampled
};

struct Extrema {
  std::vector<Extremum> maxima;
  std::vector<Extremum> minima;

  std::size_t count() const { return maxima.size() + minima.size(); }
};

/// Alternating maxima and minima found with a hysteresis of
/// `hysteresis_fraction` times the sampled range, so rounding-level wiggles
/// are ignored. Extrema on the first or last sample are not reported.
Extrema find_extrema(std::span<const double> times, std::span<const double> values,
                     double hysteresis_fraction = 0.05);

// ---------------------------------------------------------------------------
// Periods

enum class PeriodMethod { ExtremaSpacing, AutocorrelationPeak };

std::string_view to_string(PeriodMethod m);

struct PeriodEstimate {
  double period = 0.0;
  PeriodMethod method = PeriodMethod::ExtremaSpacing;
  int n_cycles_used = 0;
  double uncertainty = 0.0;
};

/// Mean spacing of successive maxima (or minima, when those are more
/// numerous); uncertainty is the standard deviation of the spacings.
/// Throws InsufficientCyclesError with fewer than 3 extrema.
PeriodEstimate measure_period(std::span<const double> times, std::span<const double> values);
PeriodEstimate measure_period(const Trajectory& traj, std::string_view observable);

/// First autocorrelation peak after the first zero crossing. Needs a
/// uniform grid; cost is O(n^2), intended as a cross-check on short series.
PeriodEstimate measure_period_autocorrelation(std::span<const double> times,
                                              std::span<const double> values);

// ---------------------------------------------------------------------------
// Extents, trapping, beats

struct Extent {
  double min = 0.0;
  double max = 0.0;
};

Extent oscillation_extent(std::span<const double> values);
Extent oscillation_extent(const Trajectory& traj, std::string_view observable);

/// max - min of the samples between each pair of consecutive maxima.
std::vector<double> cycle_ranges(std::span<const double> times, std::span<const double> values);

/// True iff the left-well magnetization never changes sign.
bool detect_self_trapping(const Trajectory& traj);

struct BeatEnvelope {
  std::vector<double> upper;
  std::vector<double> lower;
  /// Spread of the upper envelope relative to the mean carrier amplitude.
  double relative_variation = 0.0;
  std::optional<double> modulation_period;
};

/// Envelopes by linear interpolation of successive maxima / minima. The
/// modulation period is reported only when relative_variation reaches
/// `threshold`. Needs at least 6 extrema.
BeatEnvelope beat_envelope(std::span<const double> times, std::span<const double> values,
                           double threshold = 0.01);
BeatEnvelope beat_envelope(const Trajectory& traj, std::string_view observable,
                           double threshold = 0.01);

// ---------------------------------------------------------------------------
// Phase portraits

struct PortraitPoint {
  double theta = 0.0;
  double m = 0.0;
};

/// Removes 2 pi jumps between consecutive samples.
std::vector<double> unwrap_phase(std::span<const double> phase);

/// (theta_{+-}, M) of the left well with theta unwrapped.
std::vector<PortraitPoint> phase_portrait(const Trajectory& traj);
std::vector<PortraitPoint> phase_portrait(const ReducedTrajectory& traj);

// ---------------------------------------------------------------------------
// Period scan

struct PeriodScanOptions {
  double eps = 1.0;
  double lambda_s = 1.0;
  double periods = 4.25;          // integration length in analytic periods
  double samples_per_period = 2000.0;
  double critical_exclusion = 0.01;  // skip |2J/|lambda_A| - 1| below this
  IntegratorConfig integrator;    // t_max and sample_dt are overwritten
  bool parallel = true;
};

struct PeriodScanRow {
  double j = 0.0;
  double ratio = 0.0;  // 2J / |lambda_A|
  double tau_analytic = 0.0;
  double tau_measured = 0.0;
  double uncertainty = 0.0;
  bool ok = false;
  std::string status;
};

/// For each J, integrates the full system from xi = (1,0,0), eta = (0,0,1)
/// and compares the measured M_left period to analytic_period. Failures
/// are recorded per row; rows follow input order.
std::vector<PeriodScanRow> period_scan(std::span<const double> j_values, double lambda_a,
                                       const PeriodScanOptions& options = {});

// ---------------------------------------------------------------------------
// Physical estimates (SI units)

struct PhysicalEstimateInputs {
  double n_atoms = 0.0;
  double sigma_n = 0.0;       // atom-number standard deviation
  double c_s = 0.0;           // J m^3
  double c_a = 0.0;           // J m^3
  double mean_density = 0.0;  // m^-3

  /// Inputs with sigma_n = sqrt(n_atoms).
  static PhysicalEstimateInputs with_poisson_sigma(double n_atoms, double c_s, double c_a,
                                                   double mean_density);
};

struct PhaseDiffusionTimes {
  double tau_c_s = 0.0;  // s
  double tau_c_a = 0.0;  // s; +inf when c_a = 0
};

/// hbar N / (sigma c <n>) for the symmetric and asymmetric couplings.
PhaseDiffusionTimes phase_diffusion_times(const PhysicalEstimateInputs& inp,
                                          double hbar = si::kHbar);

/// max over both signs of |tau(N +- sqrt N) / tau(N) - 1| for tau ~ 1/N.
double period_sensitivity(double n_atoms);

/// Reference 87Rb inputs: a0 = 101.8 a_B, a2 = 100.4 a_B, N = 1e7,
/// sigma = sqrt(N), <n> = 1.7e13 cm^-3.
PhysicalEstimateInputs rb87_reference_inputs();

}  // namespace spinjj
