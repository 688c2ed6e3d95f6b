#pragma once
#include <vector>

#include "pii/core.hpp"

namespace pii {

// Coefficients a_n of B(x; alpha) ~ (alpha/x) sum a_n x^{-3n}.
struct SeriesCoeffs {
  double alpha;
  std::vector<double> a;
};

// a_{n+1} = (3n+1)(3n+2) a_n - 2 alpha^2 sum_{k+l+m=n} a_k a_l a_m, a_0 = 1. n_max <= 30.
SeriesCoeffs series_coeffs(double alpha, int n_max);

struct BValue {
  double value;
  double derivative;
  double trunc_err;  // first omitted term
  int terms;
};

// Optimal truncation: terms are summed up to (not including) the smallest one. |x| >= 4.
BValue eval_B(double x, double alpha);
BValue eval_B(double x, const SeriesCoeffs& c);

struct ConnectionData {
  double d;
  double phi;
};

// Amplitude and phase of the oscillatory tail at -infinity. Needs |k| < |cos(pi alpha)|.
ConnectionData connection_constants(double k, double alpha);

// Seeding data at x = L.
//   b, db: real part of the lateral Borel-type sum of B (the median sum), obtained by
//          continuing the optimally truncated series from a point far out on the level
//          curve Re zeta = zeta(L) down to L.
//   a, da: decaying solution of the linearization around B, normalized to Ai at +infinity.
//   stokes: Im of the lateral sum at L divided by a; close to -sin(pi alpha).
struct SeedBasis {
  double L;
  double alpha;
  double b, db;
  double a, da;
  double stokes;
  double trunc_err;
};

SeedBasis seed_basis(double alpha, double L = 8.0);

// u = B + c A at L (A is the dressed Airy solution; A/Ai -> 1 as x -> +infinity).
Seed seed_plus(double alpha, double airy_coeff, double L = 8.0);
Seed seed_from(const SeedBasis& basis, double airy_coeff);

// d (-x)^{-1/4} cos((2/3)(-x)^{3/2} - (3/4) d^2 ln(-x) + phi); x <= -10.
double tail_minus_AS(double x, const ConnectionData& cd);
double tail_phase_AS(double x, const ConnectionData& cd);

// sigma sqrt(-x/2) - alpha/(2x); x <= -4 (separatrix runs rarely get deeper than -10).
double tail_minus_HM(double x, double alpha, int sigma);

}  // namespace pii
