#pragma once

// Complete elliptic integral of the first kind and the Jacobi elliptic
// functions cn, dn. All arguments use the modulus k (not the parameter
// m = k^2).

namespace spinjj {

/// Arithmetic-geometric mean of two non-negative numbers.
double agm(double a, double g);

/// K(k) = pi / (2 agm(1, sqrt(1 - k^2))). Throws std::domain_error unless
/// 0 <= k < 1.
double elliptic_k(double k);

struct CnDn {
  double cn = 1.0;
  double dn = 1.0;
};

/// cn(u, k) and dn(u, k) by descending Landen transformation. Throws
/// std::domain_error unless 0 <= k < 1.
CnDn jacobi_cn_dn(double u, double k);

}  // namespace spinjj
