#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "pii/core.hpp"

namespace pii {

using BigInt = boost::multiprecision::cpp_int;

// Integer polynomial, coefficients from the constant term upwards.
struct YvPolynomial {
  std::vector<BigInt> coeffs;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Q_0 .. Q_{n_max} from Q_{n+1} Q_{n-1} = x Q_n^2 - 4 (Q_n Q_n'' - Q_n'^2); n_max <= 8.
std::vector<YvPolynomial> yv_polys(int n_max);

// Real roots of an integer polynomial with simple roots, isolated by Sturm sequences on
// dyadic rationals and bisected to width below tol.
std::vector<double> real_roots(const YvPolynomial& p, double tol = 1e-12);

// u(x; n) = Q_n'/Q_n - Q_{n-1}'/Q_{n-1}, the rational solution at alpha = n (1 <= n <= 8).
State rational_u(int n, double x);

// Roots of Q_n (residue +1) and of Q_{n-1} (residue -1), ascending.
std::vector<Pole> rational_poles(int n);

}  // namespace pii
