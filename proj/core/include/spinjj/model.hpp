#pragma once

// Spin-1 double-well mean-field model: spinor algebra, the coupled
// equations of motion, energy, collective observables and stationary
// states. Units are hbar = 1 throughout.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinjj {

using Complex = std::complex<double>;

// Zeeman component indices, fixed ordering (+, 0, -).
inline constexpr std::size_t kPlus = 0;
inline constexpr std::size_t kZero = 1;
inline constexpr std::size_t kMinus = 2;

/// Thrown when a state or parameter set contains NaN/Inf.
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Spinor {
  std::array<Complex, 3> amp{};

  constexpr Spinor() = default;
  constexpr Spinor(Complex plus, Complex zero, Complex minus)
      : amp{plus, zero, minus} {}

  constexpr Complex& operator[](std::size_t i) { return amp[i]; }
  constexpr const Complex& operator[](std::size_t i) const { return amp[i]; }

  constexpr Complex plus() const { return amp[kPlus]; }
  constexpr Complex zero() const { return amp[kZero]; }
  constexpr Complex minus() const { return amp[kMinus]; }

  double norm_squared() const;
  bool is_finite() const;
  /// Copy scaled to unit norm; throws InvalidStateError on a zero spinor.
  Spinor normalized() const;

  Spinor& operator+=(const Spinor& o);
  Spinor& operator-=(const Spinor& o);
  Spinor& operator*=(Complex s);

  friend Spinor operator+(Spinor a, const Spinor& b) { return a += b; }
  friend Spinor operator-(Spinor a, const Spinor& b) { return a -= b; }
  friend Spinor operator*(Complex s, Spinor a) { return a *= s; }
  friend Spinor operator*(double s, Spinor a) { return a *= Complex(s, 0.0); }
  friend bool operator==(const Spinor&, const Spinor&) = default;
};

/// Hermitian inner product a^dagger b.
Complex inner(const Spinor& a, const Spinor& b);

/// Left-well spinor xi and right-well spinor eta.
struct SpinorPair {
  Spinor left;
  Spinor right;

  bool is_finite() const;

  SpinorPair& operator+=(const SpinorPair& o);
  SpinorPair& operator*=(Complex s);
  friend SpinorPair operator+(SpinorPair a, const SpinorPair& b) { return a += b; }
  friend SpinorPair operator-(SpinorPair a, const SpinorPair& b) {
    a.left -= b.left;
    a.right -= b.right;
    return a;
  }
  friend SpinorPair operator*(Complex s, SpinorPair a) { return a *= s; }
  friend SpinorPair operator*(double s, SpinorPair a) { return a *= Complex(s, 0.0); }
  friend bool operator==(const SpinorPair&, const SpinorPair&) = default;
};

struct SystemParams {
  double eps_left = 0.0;
  double eps_right = 0.0;
  double lambda_s_left = 0.0;
  double lambda_s_right = 0.0;
  double lambda_a_left = 0.0;   // < 0 ferromagnetic, > 0 antiferromagnetic
  double lambda_a_right = 0.0;
  double j = 0.0;

  static SystemParams symmetric(double eps, double lambda_s, double lambda_a, double j);

  bool is_symmetric() const;
  bool is_finite() const;
  /// Throws InvalidStateError if any coefficient is non-finite.
  void validate() const;
};

/// Physical constants in SI units used by the conversions below.
namespace si {
inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kBohrRadius = 5.29177210903e-11;  // m
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kRb87Mass = 86.909180527 * kAtomicMassUnit;
}  // namespace si

/// Contact-interaction strengths from the spin-0 and spin-2 channel
/// scattering lengths. SI units: lengths in m, mass in kg, c in J m^3.
struct CouplingConstants {
  double a0 = 0.0;
  double a2 = 0.0;
  double atom_mass = 0.0;
  double c_s = 0.0;
  double c_a = 0.0;

  static CouplingConstants from_scattering_lengths(double a0, double a2,
                                                   double atom_mass,
                                                   double hbar = si::kHbar);
};

using Matrix3c = std::array<std::array<Complex, 3>, 3>;

struct SpinMatrices {
  Matrix3c fx;
  Matrix3c fy;
  Matrix3c fz;
};

/// Spin-1 matrices in the (+, 0, -) basis.
const SpinMatrices& spin_matrices();

Spinor apply(const Matrix3c& m, const Spinor& f);

/// rho_ij = conj(f_i) f_j.
Matrix3c density_matrix(const Spinor& f);

/// Collective variables of one well, built from its density matrix.
struct Observables {
  double m = 0.0;   // rho_++ - rho_--
  double n0 = 0.0;  // rho_00
  double r_plus = 0.0;
  double r_minus = 0.0;
  double i_plus = 0.0;
  double i_minus = 0.0;
  double r0 = 0.0;
  double i0 = 0.0;
  double theta = 0.0;  // atan2(i0, r0), 0 when both vanish
};

Observables observables(const Spinor& f);

/// Theta = 2 f+ f- - f0^2, so that h f = Theta * conj(f') with
/// f' = (f-, -f0, f+).
Complex singlet_amplitude(const Spinor& f);

/// (f+, f0, f-) -> (f-, f0, f+).
Spinor spin_flip(const Spinor& f);

/// Pair (xi, spin_flip(xi)).
SpinorPair spin_flip_symmetric(const Spinor& xi);

/// Time derivative of (xi, eta) from the coupled spinor equations, with
/// the spin-mixing term evaluated through the singlet amplitude.
SpinorPair rhs(const SpinorPair& state, const SystemParams& params);

/// Same derivative from the spin-matrix form
/// lambda_S |f|^2 f + lambda_A sum_j <F_j> F_j f. Independent cross-check
/// of rhs().
SpinorPair rhs_spin_form(const SpinorPair& state, const SystemParams& params);

double energy(const SpinorPair& state, const SystemParams& params);

/// |xi|^2 + |eta|^2.
double total_norm(const SpinorPair& state);

/// <xi|F_z|xi> + <eta|F_z|eta>.
double total_magnetization(const SpinorPair& state);

/// || i d/dt Psi - mu Psi ||.
double stationary_residual(const SpinorPair& state, double mu, const SystemParams& params);

struct StationaryOptions {
  int max_iterations = 200;
  double fd_step = 1e-7;
};

struct StationaryResult {
  SpinorPair state;
  double mu = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// Damped Newton search for a stationary state i dPsi/dt = mu Psi.
///
/// mu is the Rayleigh quotient of the effective Hamiltonian at each
/// iterate and each well spinor is renormalized to unit norm after every
/// step. Non-convergence is reported through `converged == false`; the
/// state returned in that case is the best iterate found.
StationaryResult find_stationary(const SpinorPair& seed, const SystemParams& params,
                                 double tol, const StationaryOptions& options = {});

}  // namespace spinjj
