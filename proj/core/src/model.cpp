#include "spinjj/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace spinjj {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double expectation(const Matrix3c& m, const Spinor& f) {
  return inner(f, apply(m, f)).real();
}

// |f|^2 summed as |f0|^2 + (|f+|^2 + |f-|^2): identical bits for f and
// spin_flip(f), so spin-flip-symmetric pairs stay exactly symmetric.
double mirror_norm(const Spinor& f) {
  return std::norm(f.zero()) + (std::norm(f.plus()) + std::norm(f.minus()));
}

// H_eff f for one well in the singlet-amplitude form, without tunnelling.
Spinor onsite(const Spinor& f, double eps, double lambda_s, double lambda_a) {
  const double n = mirror_norm(f);
  const Complex theta = singlet_amplitude(f);
  const Spinor primed_conj{std::conj(f.minus()), -std::conj(f.zero()), std::conj(f.plus())};
  return Complex(eps + (lambda_s + lambda_a) * n, 0.0) * f - (lambda_a * theta) * primed_conj;
}

Spinor onsite_spin_form(const Spinor& f, double eps, double lambda_s, double lambda_a) {
  const auto& s = spin_matrices();
  Spinor out = (eps + lambda_s * f.norm_squared()) * f;
  for (const Matrix3c* fj : {&s.fx, &s.fy, &s.fz}) {
    out += (lambda_a * expectation(*fj, f)) * apply(*fj, f);
  }
  return out;
}

// H_eff Psi, i.e. i dPsi/dt.
SpinorPair apply_hamiltonian(const SpinorPair& s, const SystemParams& p) {
  return {onsite(s.left, p.eps_left, p.lambda_s_left, p.lambda_a_left) + p.j * s.right,
          onsite(s.right, p.eps_right, p.lambda_s_right, p.lambda_a_right) + p.j * s.left};
}

void require_finite(const SpinorPair& state, const SystemParams& params) {
  if (!state.is_finite()) throw InvalidStateError("spinor state contains non-finite amplitudes");
  params.validate();
}

double pair_norm(const SpinorPair& s) { return std::sqrt(total_norm(s)); }

}  // namespace

double Spinor::norm_squared() const {
  return std::norm(amp[0]) + std::norm(amp[1]) + std::norm(amp[2]);
}

bool Spinor::is_finite() const { return finite(amp[0]) && finite(amp[1]) && finite(amp[2]); }

Spinor Spinor::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidStateError("cannot normalize a zero or non-finite spinor");
  return (1.0 / n) * *this;
}

Spinor& Spinor::operator+=(const Spinor& o) {
  for (std::size_t i = 0; i < 3; ++i) amp[i] += o.amp[i];
  return *this;
}

Spinor& Spinor::operator-=(const Spinor& o) {
  for (std::size_t i = 0; i < 3; ++i) amp[i] -= o.amp[i];
  return *this;
}

Spinor& Spinor::operator*=(Complex s) {
  for (auto& a : amp) a *= s;
  return *this;
}

Complex inner(const Spinor& a, const Spinor& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

bool SpinorPair::is_finite() const { return left.is_finite() && right.is_finite(); }

SpinorPair& SpinorPair::operator+=(const SpinorPair& o) {
  left += o.left;
  right += o.right;
  return *this;
}

SpinorPair& SpinorPair::operator*=(Complex s) {
  left *= s;
  right *= s;
  return *this;
}

SystemParams SystemParams::symmetric(double eps, double lambda_s, double lambda_a, double j) {
  SystemParams p{eps, eps, lambda_s, lambda_s, lambda_a, lambda_a, j};
  p.validate();
  return p;
}

bool SystemParams::is_symmetric() const {
  return eps_left == eps_right && lambda_s_left == lambda_s_right && lambda_a_left == lambda_a_right;
}

bool SystemParams::is_finite() const {
  for (double v : {eps_left, eps_right, lambda_s_left, lambda_s_right, lambda_a_left, lambda_a_right, j}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void SystemParams::validate() const {
  if (!is_finite()) throw InvalidStateError("system parameters contain non-finite values");
}

CouplingConstants CouplingConstants::from_scattering_lengths(double a0, double a2, double atom_mass,
                                                             double hbar) {
  if (!(atom_mass > 0.0)) throw std::invalid_argument("atom mass must be positive");
  const double prefactor = 4.0 * std::numbers::pi * hbar * hbar / (3.0 * atom_mass);
  return {a0, a2, atom_mass, prefactor * (a0 + 2.0 * a2), prefactor * (a2 - a0)};
}

const SpinMatrices& spin_matrices() {
  static const SpinMatrices m = [] {
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex z{};
    const Complex a{r, 0.0};
    const Complex ia{0.0, r};
    SpinMatrices s;
    s.fx = {{{z, a, z}, {a, z, a}, {z, a, z}}};
    s.fy = {{{z, -ia, z}, {ia, z, -ia}, {z, ia, z}}};
    s.fz = {{{Complex(1.0), z, z}, {z, z, z}, {z, z, Complex(-1.0)}}};
    return s;
  }();
  return m;
}

Spinor apply(const Matrix3c& m, const Spinor& f) {
  Spinor out;
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = m[i][0] * f[0] + m[i][1] * f[1] + m[i][2] * f[2];
  }
  return out;
}

Matrix3c density_matrix(const Spinor& f) {
  Matrix3c rho;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) rho[i][j] = std::conj(f[i]) * f[j];
  }
  return rho;
}

Observables observables(const Spinor& f) {
  const Matrix3c rho = density_matrix(f);
  const Complex rho_p0 = rho[kPlus][kZero];
  const Complex rho_0m = rho[kZero][kMinus];
  const Complex rho_pm = rho[kPlus][kMinus];

  Observables o;
  o.m = rho[kPlus][kPlus].real() - rho[kMinus][kMinus].real();
  o.n0 = rho[kZero][kZero].real();
  // (z + conj z)/2 = Re z and (z - conj z)/2i = Im z.
  o.r_plus = (rho_p0 + rho_0m).real();
  o.r_minus = (rho_p0 - rho_0m).real();
  o.i_plus = (rho_p0 + rho_0m).imag();
  o.i_minus = (rho_p0 - rho_0m).imag();
  o.r0 = rho_pm.real();
  o.i0 = rho_pm.imag();
  o.theta = (o.r0 == 0.0 && o.i0 == 0.0) ? 0.0 : std::atan2(o.i0, o.r0);
  return o;
}

Complex singlet_amplitude(const Spinor& f) {
  return 2.0 * f.plus() * f.minus() - f.zero() * f.zero();
}

Spinor spin_flip(const Spinor& f) { return {f.minus(), f.zero(), f.plus()}; }

SpinorPair spin_flip_symmetric(const Spinor& xi) { return {xi, spin_flip(xi)}; }

SpinorPair rhs(const SpinorPair& state, const SystemParams& params) {
  require_finite(state, params);
  return -kI * apply_hamiltonian(state, params);
}

SpinorPair rhs_spin_form(const SpinorPair& state, const SystemParams& params) {
  require_finite(state, params);
  const SpinorPair h{
      onsite_spin_form(state.left, params.eps_left, params.lambda_s_left, params.lambda_a_left) +
          params.j * state.right,
      onsite_spin_form(state.right, params.eps_right, params.lambda_s_right, params.lambda_a_right) +
          params.j * state.left};
  return -kI * h;
}

double energy(const SpinorPair& state, const SystemParams& params) {
  const auto& s = spin_matrices();
  auto well = [&](const Spinor& f, double eps, double lambda_s, double lambda_a) {
    const double n = f.norm_squared();
    double spin2 = 0.0;
    for (const Matrix3c* fj : {&s.fx, &s.fy, &s.fz}) {
      const double e = expectation(*fj, f);
      spin2 += e * e;
    }
    return eps * n + 0.5 * lambda_s * n * n + 0.5 * lambda_a * spin2;
  };
  const double tunnelling = 2.0 * params.j * inner(state.left, state.right).real();
  return well(state.left, params.eps_left, params.lambda_s_left, params.lambda_a_left) +
         well(state.right, params.eps_right, params.lambda_s_right, params.lambda_a_right) +
         tunnelling;
}

double total_norm(const SpinorPair& state) {
  return state.left.norm_squared() + state.right.norm_squared();
}

double total_magnetization(const SpinorPair& state) {
  return std::norm(state.left.plus()) - std::norm(state.left.minus()) +
         std::norm(state.right.plus()) - std::norm(state.right.minus());
}

double stationary_residual(const SpinorPair& state, double mu, const SystemParams& params) {
  require_finite(state, params);
  return pair_norm(apply_hamiltonian(state, params) - mu * state);
}

namespace {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

Vec12 pack(const SpinorPair& s) {
  Vec12 x;
  for (std::size_t i = 0; i < 3; ++i) {
    x(2 * i) = s.left[i].real();
    x(2 * i + 1) = s.left[i].imag();
    x(6 + 2 * i) = s.right[i].real();
    x(6 + 2 * i + 1) = s.right[i].imag();
  }
  return x;
}

SpinorPair unpack(const Vec12& x) {
  SpinorPair s;
  for (std::size_t i = 0; i < 3; ++i) {
    s.left[i] = {x(2 * i), x(2 * i + 1)};
    s.right[i] = {x(6 + 2 * i), x(6 + 2 * i + 1)};
  }
  return s;
}

SpinorPair renormalize(const SpinorPair& s) { return {s.left.normalized(), s.right.normalized()}; }

double rayleigh_mu(const SpinorPair& s, const SystemParams& p) {
  const SpinorPair h = apply_hamiltonian(s, p);
  return (inner(s.left, h.left) + inner(s.right, h.right)).real() / total_norm(s);
}

// Residual of the renormalized state as a real 12-vector.
Vec12 residual_vector(const Vec12& x, const SystemParams& p) {
  const SpinorPair s = renormalize(unpack(x));
  const double mu = rayleigh_mu(s, p);
  return pack(apply_hamiltonian(s, p) - mu * s);
}

}  // namespace

StationaryResult find_stationary(const SpinorPair& seed, const SystemParams& params, double tol,
                                 const StationaryOptions& options) {
  require_finite(seed, params);
  if (!(tol > 0.0)) throw std::invalid_argument("stationary tolerance must be positive");

  StationaryResult result;
  Vec12 x = pack(renormalize(seed));
  Vec12 f = residual_vector(x, params);
  double fnorm = f.norm();

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    if (fnorm < tol) {
      result.state = renormalize(unpack(x));
      result.mu = rayleigh_mu(result.state, params);
      result.residual = stationary_residual(result.state, result.mu, params);
      result.converged = result.residual < tol;
      if (result.converged) return result;
    }

    Mat12 jac;
    for (int k = 0; k < 12; ++k) {
      const double h = options.fd_step * std::max(1.0, std::abs(x(k)));
      Vec12 xp = x;
      Vec12 xm = x;
      xp(k) += h;
      xm(k) -= h;
      jac.col(k) = (residual_vector(xp, params) - residual_vector(xm, params)) / (2.0 * h);
    }
    // Gauge and normalization directions make the Jacobian singular; take
    // the minimum-norm step.
    Eigen::CompleteOrthogonalDecomposition<Mat12> cod(jac);
    cod.setThreshold(1e-10);
    const Vec12 step = -cod.solve(f);

    double alpha = 1.0;
    Vec12 trial = x + step;
    Vec12 ftrial = residual_vector(trial, params);
    while (ftrial.norm() >= fnorm && alpha > 1.0 / 1024.0) {
      alpha *= 0.5;
      trial = x + alpha * step;
      ftrial = residual_vector(trial, params);
    }
    if (!ftrial.allFinite()) break;
    x = pack(renormalize(unpack(trial)));
    f = residual_vector(x, params);
    fnorm = f.norm();
  }

  result.state = renormalize(unpack(x));
  result.mu = rayleigh_mu(result.state, params);
  result.residual = stationary_residual(result.state, result.mu, params);
  result.converged = result.residual < tol;
  if (result.converged) return result;
  result.message = "no convergence after " + std::to_string(options.max_iterations) +
                   " iterations, residual " + std::to_string(result.residual);
  return result;
}

}  // namespace spinjj
