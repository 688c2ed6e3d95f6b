#pragma once
// Independent Airy reference: Maclaurin series carried in 50-digit floats.
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <utility>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

inline std::pair<double, double> airy_mp(double xd) {
  mp x = xd;
  mp third = mp(1) / 3;
  mp c1 = pow(mp(3), -2 * third) / boost::math::tgamma(2 * third);
  mp c2 = pow(mp(3), -third) / boost::math::tgamma(third);
  // f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
  mp f = 1, g = x, df = 0, dg = 1;
  mp tf = 1, tg = x;
  mp x3 = x * x * x;
  for (int k = 1; k < 400; ++k) {
    tf *= x3 / ((3 * k - 1) * mp(3 * k));
    tg *= x3 / ((3 * k) * mp(3 * k + 1));
    f += tf;
    g += tg;
    df += tf * (3 * k) / x;
    dg += tg * (3 * k + 1) / x;
    if (abs(tf) < mp("1e-45") && abs(tg) < mp("1e-45") && k > 10) break;
  }
  // handle x == 0 derivative terms (division by x above only used when x != 0)
  if (xd == 0.0) {
    df = 0;
    dg = 1;
  }
  mp ai = c1 * f - c2 * g;
  mp dai = c1 * df - c2 * dg;
  return {static_cast<double>(ai), static_cast<double>(dai)};
}

}  // namespace oracle
