#include "spinjj/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace spinjj {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ||(t - lambda I) x||_inf
double residual_inf(const SymTridiagonal& t, double lambda, const std::vector<double>& x) {
  const std::size_t n = t.size();
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double y = (t.diag[i] - lambda) * x[i];
    if (i > 0) y += t.off[i - 1] * x[i - 1];
    if (i + 1 < n) y += t.off[i] * x[i + 1];
    r = std::max(r, std::abs(y));
  }
  return r;
}

void check_shape(const SymTridiagonal& t) {
  if (t.diag.empty() || t.off.size() + 1 != t.diag.size()) {
    throw std::invalid_argument("tridiagonal matrix needs n diagonal and n-1 off-diagonal entries");
  }
}

}  // namespace

std::size_t sturm_count(const SymTridiagonal& t, double x) {
  check_shape(t);
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = t.diag[0] - x;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    if (i + 1 == t.size()) break;
    q = t.diag[i + 1] - x - t.off[i] * t.off[i] / q;
  }
  return count;
}

double eigenvalue_bisection(const SymTridiagonal& t, std::size_t k, double rel_tol) {
  check_shape(t);
  if (k >= t.size()) throw std::out_of_range("eigenvalue index exceeds matrix size");
  // Gershgorin bounds.
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < t.size() ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi)) + 1e-300 || mid == lo || mid == hi) break;
    if (sturm_count(t, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> solve_shifted(const SymTridiagonal& t, double shift, std::vector<double> b) {
  check_shape(t);
  const std::size_t n = t.size();
  if (b.size() != n) throw std::invalid_argument("right-hand side size mismatch");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
  std::vector<double> dl = t.off;
  std::vector<double> du = t.off;
  std::vector<double> du2(n > 2 ? n - 2 : 0, 0.0);
  std::vector<bool> swapped(n > 1 ? n - 1 : 0, false);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]));
  for (double v : t.off) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = true;
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!swapped[i]) {
      b[i + 1] -= dl[i] * b[i];
    } else {
      const double temp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = temp - dl[i] * b[i];
    }
  }
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t i = n > 2 ? n - 2 : 0; i-- > 0;) {
    b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
  return b;
}

std::vector<EigenPair> lowest_eigenpairs(const SymTridiagonal& t, std::size_t count,
                                         double vector_tol, int max_iterations) {
  check_shape(t);
  if (count > t.size()) throw std::out_of_range("more eigenpairs requested than matrix size");
  std::vector<EigenPair> out;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (std::size_t k = 0; k < count; ++k) {
    EigenPair pair;
    pair.value = eigenvalue_bisection(t, k);
    std::vector<double> x(t.size());
    for (double& v : x) v = uni(rng);

    double norm_inf = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      norm_inf = std::max(norm_inf, std::abs(t.diag[i]) + (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                                        (i + 1 < t.size() ? std::abs(t.off[i]) : 0.0));
    }
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * norm_inf;

    bool converged = false;
    for (int iter = 0; iter < max_iterations; ++iter) {
      std::vector<double> y = solve_shifted(t, pair.value, x);
      for (const EigenPair& lower : out) {
        const double c = dot(y, lower.vector);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * lower.vector[i];
      }
      const double ny = norm2(y);
      if (!(ny > 0.0) || !std::isfinite(ny)) throw std::runtime_error("inverse iteration broke down");
      for (double& v : y) v /= ny;
      if (dot(y, x) < 0.0) {
        for (double& v : y) v = -v;
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) diff = std::max(diff, std::abs(y[i] - x[i]));
      x = std::move(y);
      // Near-degenerate pairs plateau at a rounding floor before diff
      // reaches vector_tol; accept once the residual is at that floor.
      if (iter > 0 && (diff < vector_tol || residual_inf(t, pair.value, x) <= floor)) {
        converged = true;
        break;
      }
    }
    if (!converged) throw std::runtime_error("inverse iteration did not converge");
    pair.vector = std::move(x);
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace spinjj
