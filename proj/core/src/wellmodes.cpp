#include "spinjj/wellmodes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spinjj/tridiagonal.hpp"

namespace spinjj {

double Grid1D::spacing() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }

double Grid1D::x(std::size_t i) const {
  const double centre = 0.5 * (x_min + x_max);
  const double offset = static_cast<double>(i) - 0.5 * static_cast<double>(n_points - 1);
  return centre + offset * spacing();
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_points);
  for (std::size_t i = 0; i < n_points; ++i) xs[i] = x(i);
  return xs;
}

void Grid1D::validate() const {
  if (n_points < 64) throw std::invalid_argument("grid needs at least 64 points");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw std::invalid_argument("grid needs finite x_min < x_max");
  }
}

DoubleWellPotential DoubleWellPotential::quartic(double v0, double a) {
  if (!(a > 0.0) || !std::isfinite(v0)) throw std::invalid_argument("quartic well needs a > 0 and finite v0");
  DoubleWellPotential p;
  p.shape_ = Shape::Quartic;
  p.v0_ = v0;
  p.a_ = a;
  return p;
}

DoubleWellPotential DoubleWellPotential::tabulated(std::vector<double> xs, std::vector<double> vs) {
  if (xs.size() != vs.size() || xs.size() < 2) throw std::invalid_argument("potential table needs >= 2 (x, V) rows");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("potential table x must be strictly increasing");
  }
  for (double v : vs) {
    if (!std::isfinite(v)) throw std::invalid_argument("potential table contains non-finite V");
  }
  DoubleWellPotential p;
  p.shape_ = Shape::Tabulated;
  p.xs_ = std::move(xs);
  p.vs_ = std::move(vs);
  return p;
}

DoubleWellPotential DoubleWellPotential::from_table(std::istream& in) {
  std::vector<double> xs;
  std::vector<double> vs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x = 0.0;
    double v = 0.0;
    if (!(row >> x)) continue;
    if (!(row >> v)) throw std::invalid_argument("potential table line " + std::to_string(line_no) + ": expected two columns");
    xs.push_back(x);
    vs.push_back(v);
  }
  return tabulated(std::move(xs), std::move(vs));
}

double DoubleWellPotential::operator()(double x) const {
  if (shape_ == Shape::Quartic) {
    const double u = (x / a_) * (x / a_) - 1.0;
    return v0_ * u * u;
  }
  if (x <= xs_.front()) return vs_.front();
  if (x >= xs_.back()) return vs_.back();
  const auto hi = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto i = static_cast<std::size_t>(hi - xs_.begin());
  const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return (1.0 - w) * vs_[i - 1] + w * vs_[i];
}

std::string DoubleWellPotential::describe() const {
  std::ostringstream os;
  if (shape_ == Shape::Quartic) {
    os << "quartic v0=" << v0_ << " a=" << a_;
  } else {
    os << "tabulated rows=" << xs_.size();
  }
  return os.str();
}

double trapezoid(const std::vector<double>& f, double dx) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * dx;
}

namespace {

std::vector<double> derivative(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  d[0] = (f[1] - f[0]) / dx;
  d[n - 1] = (f[n - 1] - f[n - 2]) / dx;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  return d;
}

void normalize(std::vector<double>& f, double dx) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  const double n = std::sqrt(trapezoid(sq, dx));
  for (double& v : f) v /= n;
}

// Weight of f^2 on the x < centre half minus the x > centre half.
double left_bias(const std::vector<double>& f, const Grid1D& grid) {
  const double centre = 0.5 * (grid.x_min + grid.x_max);
  double bias = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.x(i);
    if (x < centre) bias += f[i] * f[i];
    if (x > centre) bias -= f[i] * f[i];
  }
  return bias;
}

}  // namespace

WellModes lowest_modes(const DoubleWellPotential& pot, const Grid1D& grid) {
  grid.validate();
  const std::size_t n = grid.n_points;
  const double h = grid.spacing();
  const double kinetic = 0.5 / (h * h);

  // Interior points only; psi vanishes on both end points.
  SymTridiagonal hamiltonian;
  hamiltonian.diag.resize(n - 2);
  hamiltonian.off.assign(n - 3, -kinetic);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = pot(grid.x(i));
    if (!std::isfinite(v)) throw std::invalid_argument("potential is not finite on the grid");
    hamiltonian.diag[i - 1] = 2.0 * kinetic + v;
  }
  const std::vector<EigenPair> pairs = lowest_eigenpairs(hamiltonian, 3);

  WellModes modes;
  modes.grid = grid;
  modes.x = grid.points();
  modes.e_s = pairs[0].value;
  modes.e_a = pairs[1].value;
  modes.e_third = pairs[2].value;
  modes.gap_ratio = (modes.e_third - modes.e_a) / (modes.e_a - modes.e_s);
  if (modes.gap_ratio < 10.0) {
    modes.warning = "two-mode picture marginal: gap ratio " + std::to_string(modes.gap_ratio) + " < 10";
  }

  auto embed = [n](const std::vector<double>& interior) {
    std::vector<double> f(n, 0.0);
    std::copy(interior.begin(), interior.end(), f.begin() + 1);
    return f;
  };
  modes.psi_s = embed(pairs[0].vector);
  modes.psi_a = embed(pairs[1].vector);
  normalize(modes.psi_s, h);
  normalize(modes.psi_a, h);
  double sum = 0.0;
  for (double v : modes.psi_s) sum += v;
  if (sum < 0.0) {
    for (double& v : modes.psi_s) v = -v;
  }

  const double r = 1.0 / std::numbers::sqrt2;
  modes.sqrt_n_left.resize(n);
  modes.sqrt_n_right.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    modes.sqrt_n_left[i] = r * (modes.psi_s[i] + modes.psi_a[i]);
    modes.sqrt_n_right[i] = r * (modes.psi_s[i] - modes.psi_a[i]);
  }
  if (left_bias(modes.sqrt_n_left, grid) < 0.0) {
    std::swap(modes.sqrt_n_left, modes.sqrt_n_right);
    for (double& v : modes.psi_a) v = -v;
  }
  return modes;
}

WellParameters well_parameters(const WellModes& modes, const DoubleWellPotential& pot, const Grid1D& grid,
                               const InteractionStrengths& couplings) {
  if (!(modes.grid == grid) || modes.sqrt_n_left.size() != grid.n_points) {
    throw std::invalid_argument("well modes were computed on a different grid");
  }
  const double h = grid.spacing();
  const std::size_t n = grid.n_points;
  const std::vector<double>& left = modes.sqrt_n_left;
  const std::vector<double>& right = modes.sqrt_n_right;
  const std::vector<double> d_left = derivative(left, h);
  const std::vector<double> d_right = derivative(right, h);

  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = pot(grid.x(i));

  auto integrate = [&](auto integrand) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = integrand(i);
    return trapezoid(f, h);
  };
  const double eps_left = integrate([&](std::size_t i) { return 0.5 * d_left[i] * d_left[i] + left[i] * v[i] * left[i]; });
  const double eps_right =
      integrate([&](std::size_t i) { return 0.5 * d_right[i] * d_right[i] + right[i] * v[i] * right[i]; });
  const double j = integrate([&](std::size_t i) { return 0.5 * d_left[i] * d_right[i] + left[i] * v[i] * right[i]; });
  const double n4_left = integrate([&](std::size_t i) { return std::pow(left[i], 4); });
  const double n4_right = integrate([&](std::size_t i) { return std::pow(right[i], 4); });

  WellParameters out;
  out.params = {eps_left,
                eps_right,
                couplings.c_s * n4_left,
                couplings.c_s * n4_right,
                couplings.c_a * n4_left,
                couplings.c_a * n4_right,
                std::abs(j)};
  out.j_signed = j;
  out.overlap = integrate([&](std::size_t i) { return left[i] * right[i]; });
  return out;
}

}  // namespace spinjj
