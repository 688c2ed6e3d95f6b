#include "pii/specfun.hpp"

#include <cmath>
#include <numbers>

#include "pii/errors.hpp"

namespace pii {
namespace {

constexpr double kAi0 = 0.355028053887817239260;
constexpr double kDAi0 = -0.258819403792806798405;
constexpr double kAsyRight = 8.0;
constexpr double kAsyLeft = -9.0;
constexpr double kTaylorStep = 0.5;

// Taylor series of y'' = x y about x0, evaluated at x0 + t.
AiryPair taylor_step(double x0, AiryPair y, double t) {
  double cm1 = 0.0, c0 = y.ai, c1 = y.dai;
  double val = c0 + c1 * t, der = c1;
  double tp = t;  // t^(n+1) at loop top
  int quiet = 0;
  for (int n = 0; n < 200; ++n) {
    double c2 = (x0 * c0 + cm1) / ((n + 1.0) * (n + 2.0));
    double dv = c2 * tp * t;
    double dd = (n + 2.0) * c2 * tp;
    val += dv;
    der += dd;
    bool small = std::abs(dv) <= 1e-18 * std::abs(val) && std::abs(dd) <= 1e-18 * std::abs(der);
    quiet = small ? quiet + 1 : 0;
    if (quiet >= 3) break;
    cm1 = c0;
    c0 = c1;
    c1 = c2;
    tp *= t;
  }
  return {val, der};
}

AiryPair taylor_walk(double x0, AiryPair y, double x1) {
  int n = static_cast<int>(std::ceil(std::abs(x1 - x0) / kTaylorStep));
  if (n == 0) return y;
  double h = (x1 - x0) / n;
  for (int i = 0; i < n; ++i) y = taylor_step(x0 + i * h, y, h);
  return y;
}

// Asymptotic sums for x >= 8 without the e^{-zeta} factor.
AiryPair airy_right_scaled(double x) {
  double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double su = 1.0, sv = 1.0, uk = 1.0, prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    uk *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    double vk = -(6.0 * k + 1) / (6.0 * k - 1) * uk;
    double tu = uk / std::pow(-zeta, k);
    if (std::abs(tu) > prev) break;
    prev = std::abs(tu);
    su += tu;
    sv += vk / std::pow(-zeta, k);
    if (prev < 1e-17) break;
  }
  double x4 = std::sqrt(std::sqrt(x));
  double c = 0.5 / std::sqrt(std::numbers::pi);
  return {c * su / x4, -c * x4 * sv};
}

AiryPair airy_left(double x) {
  double z = -x;
  double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  double p = 0, q = 0, r = 0, s = 0;
  double uk = 1.0, prev = INFINITY, zk = 1.0;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) {
      uk *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
      zk *= zeta;
    }
    double vk = k == 0 ? 1.0 : -(6.0 * k + 1) / (6.0 * k - 1) * uk;
    double tu = uk / zk;
    if (std::abs(tu) > prev) break;
    prev = std::abs(tu);
    // (-1)^floor(k/2), split by parity
    double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sgn * tu;
      r += sgn * vk / zk;
    } else {
      q += sgn * tu;
      s += sgn * vk / zk;
    }
    if (prev < 1e-17) break;
  }
  double th = zeta - std::numbers::pi / 4;
  double z4 = std::sqrt(std::sqrt(z));
  double isp = 1.0 / std::sqrt(std::numbers::pi);
  return {isp / z4 * (std::cos(th) * p + std::sin(th) * q),
          isp * z4 * (std::sin(th) * r - std::cos(th) * s)};
}

}  // namespace

AiryPair airy(double x) {
  if (!std::isfinite(x) || x < -60.0 || x > 60.0) throw DomainError("airy: x outside [-60, 60]");
  if (x >= kAsyRight) {
    AiryPair s = airy_right_scaled(x);
    double e = std::exp(-2.0 / 3.0 * x * std::sqrt(x));
    return {s.ai * e, s.dai * e};
  }
  if (x <= kAsyLeft) return airy_left(x);
  // Leftward continuation from x = 8 is stable for the decaying solution.
  if (x > 2.0) return taylor_walk(kAsyRight, airy(kAsyRight), x);
  return taylor_walk(0.0, {kAi0, kDAi0}, x);
}

AiryPair airy_scaled(double x) {
  if (!std::isfinite(x) || x < 0.0) throw DomainError("airy_scaled: x must be >= 0");
  if (x >= kAsyRight) return airy_right_scaled(x);
  AiryPair a = airy(x);
  double e = std::exp(2.0 / 3.0 * x * std::sqrt(x));
  return {a.ai * e, a.dai * e};
}

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() < 0.0 || std::abs(z) == 0.0) throw DomainError("log_gamma: need Re z >= 0, z != 0");
  std::complex<double> shift = 0.0;
  while (std::abs(z) < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  // Stirling with B_{2k} / (2k (2k-1) z^{2k-1})
  static const double b[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
                             -691.0 / 2730, 7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330};
  std::complex<double> iz = 1.0 / z, iz2 = iz * iz, pw = iz, corr = 0.0;
  for (int k = 1; k <= 10; ++k) {
    corr += b[k - 1] / (2.0 * k * (2.0 * k - 1)) * pw;
    pw *= iz2;
  }
  std::complex<double> lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * std::numbers::pi) + corr;
  return lg - shift;
}

double arg_gamma_imag(double y) {
  if (!std::isfinite(y) || y <= 0.0) throw DomainError("arg_gamma_imag: y must be > 0");
  return log_gamma({0.0, y}).imag();
}

}  // namespace pii
