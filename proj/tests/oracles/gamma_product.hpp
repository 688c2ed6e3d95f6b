#pragma once
// arg Gamma(iy) from the Weierstrass product:
//   -pi/2 - gamma*y + sum_k (y/k - atan(y/k))
#include <cmath>
#include <numbers>

namespace oracle {

inline double arg_gamma_product(double y) {
  long double s = 0.0L;
  const long K = 2000000;
  long double yy = y;
  for (long k = K; k >= 1; --k) s += yy / k - std::atan(yy / k);
  // tail: sum_{k>K} y^3/(3k^3) - y^5/(5k^5)
  long double kk = K + 0.5L;
  s += yy * yy * yy / (6.0L * kk * kk) - std::pow(yy, 5) / (20.0L * std::pow(kk, 4));
  return static_cast<double>(-std::numbers::pi_v<long double> / 2 -
                             std::numbers::egamma_v<long double> * yy + s);
}

}  // namespace oracle
