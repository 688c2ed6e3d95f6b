#pragma once
#include <complex>

namespace pii {

struct AiryPair {
  double ai;
  double dai;
};

// Ai and Ai' for x in [-60, 60]. Relative accuracy ~1e-13 away from zeros.
AiryPair airy(double x);

// e^{zeta} Ai(x), e^{zeta} Ai'(x) with zeta = (2/3) x^{3/2}; x >= 0, any size.
AiryPair airy_scaled(double x);

// Continuous branch of Im log Gamma(iy), y > 0, tending to -pi/2 as y -> 0+.
double arg_gamma_imag(double y);

// log Gamma(z) for Re z >= 0, z != 0 (continuous in the closed right half-plane).
std::complex<double> log_gamma(std::complex<double> z);

}  // namespace pii
