#pragma once

// One-dimensional double-well mode solver (hbar = m = 1) and the two-mode
// parameters built from it: on-site energies, tunnelling and interaction
// integrals of the localized left/right modes.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinjj/model.hpp"

namespace spinjj {

struct Grid1D {
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t n_points = 1024;

  double spacing() const;
  /// Mirror-symmetric about the centre: x(i) + x(n-1-i) == x_min + x_max.
  double x(std::size_t i) const;
  std::vector<double> points() const;
  /// Throws std::invalid_argument for n_points < 64 or an empty interval.
  void validate() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

class DoubleWellPotential {
 public:
  enum class Shape { Quartic, Tabulated };

  /// V(x) = v0 ((x / a)^2 - 1)^2, minima at +-a, barrier height v0.
  static DoubleWellPotential quartic(double v0, double a);
  /// Linear interpolation of samples, clamped to the end values outside
  /// the table. xs must be strictly increasing.
  static DoubleWellPotential tabulated(std::vector<double> xs, std::vector<double> vs);
  /// Two whitespace-separated columns (x, V) per line; '#' starts a comment.
  static DoubleWellPotential from_table(std::istream& in);

  double operator()(double x) const;

  Shape shape() const { return shape_; }
  double v0() const { return v0_; }
  double a() const { return a_; }
  std::string describe() const;

 private:
  Shape shape_ = Shape::Quartic;
  double v0_ = 0.0;
  double a_ = 1.0;
  std::vector<double> xs_;
  std::vector<double> vs_;
};

struct WellModes {
  Grid1D grid;
  std::vector<double> x;
  std::vector<double> psi_s;  // symmetric (ground) state, int psi^2 dx = 1
  std::vector<double> psi_a;  // antisymmetric (first excited) state
  double e_s = 0.0;
  double e_a = 0.0;
  double e_third = 0.0;
  /// (e_third - e_a) / (e_a - e_s); below 10 the two-mode picture is marginal.
  double gap_ratio = 0.0;
  std::vector<double> sqrt_n_left;
  std::vector<double> sqrt_n_right;
  std::string warning;  // empty unless the two-mode picture is marginal
};

/// Lowest two eigenstates of -psi''/2 + V psi = E psi with a three-point
/// Laplacian and hard walls at the grid ends, and the localized modes
/// (psi_s +- psi_a)/sqrt(2). The left mode is the one concentrated at
/// x < 0; both are signed so their home-well lobe is positive.
WellModes lowest_modes(const DoubleWellPotential& pot, const Grid1D& grid);

/// Effective 1D interaction constants (energy times length).
struct InteractionStrengths {
  double c_s = 1.0;
  double c_a = -0.01;
};

struct WellParameters {
  SystemParams params;  // params.j = |J|
  double j_signed = 0.0;
  double overlap = 0.0;  // int sqrt(n_L) sqrt(n_R) dx
};

/// Trapezoidal quadrature of
///   eps_nu = int [ (d sqrt(n_nu)/dx)^2 / 2 + V n_nu ] dx
///   J      = int [ (d sqrt(n_L)/dx)(d sqrt(n_R)/dx) / 2 + sqrt(n_L) V sqrt(n_R) ] dx
///   lambda = c int n_nu^2 dx
/// with central differences inside and one-sided ones at the boundary.
/// Throws std::invalid_argument if `grid` differs from the one in `modes`.
WellParameters well_parameters(const WellModes& modes, const DoubleWellPotential& pot, const Grid1D& grid,
                               const InteractionStrengths& couplings);

/// Trapezoidal integral of uniformly spaced samples.
double trapezoid(const std::vector<double>& f, double dx);

}  // namespace spinjj
