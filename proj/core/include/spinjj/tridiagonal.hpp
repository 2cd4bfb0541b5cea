#pragma once

#include <cstddef>
#include <vector>

namespace spinjj {

/// Real symmetric tridiagonal matrix: diag has n entries, off has n - 1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t sturm_count(const SymTridiagonal& t, double x);

/// k-th smallest eigenvalue (0-based) by bisection, to a bracket width of
/// rel_tol * |lambda| (or an absolute 1e-300 floor).
double eigenvalue_bisection(const SymTridiagonal& t, std::size_t k, double rel_tol = 1e-15);

/// Solves (t - shift I) x = b by Gaussian elimination with partial
/// pivoting. Exactly singular pivots are perturbed, which is what inverse
/// iteration wants.
std::vector<double> solve_shifted(const SymTridiagonal& t, double shift, std::vector<double> b);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit Euclidean norm
};

/// The `count` lowest eigenpairs: bisection for the values, inverse
/// iteration (orthogonalized against lower vectors) for the vectors,
/// stopped once successive iterates differ by less than vector_tol.
std::vector<EigenPair> lowest_eigenpairs(const SymTridiagonal& t, std::size_t count,
                                         double vector_tol = 1e-10, int max_iterations = 50);

}  // namespace spinjj
