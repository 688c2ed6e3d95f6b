#include "pii/asymptotics.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "pii/detail/dopri5.hpp"
#include "pii/errors.hpp"
#include "pii/specfun.hpp"

namespace pii {

namespace {

constexpr int kMaxTerms = 30;
using cplx = std::complex<double>;

}  // namespace

SeriesCoeffs series_coeffs(double alpha, int n_max) {
  if (n_max < 0 || n_max > kMaxTerms) throw DomainError("series_coeffs: n_max must be in [0, 30]");
  SeriesCoeffs s{alpha, std::vector<double>(n_max + 1, 0.0)};
  s.a[0] = 1.0;
  std::vector<double> sq(n_max + 1, 0.0);  // [a*a]_m
  for (int n = 0; n < n_max; ++n) {
    sq[n] = 0;
    for (int k = 0; k <= n; ++k) sq[n] += s.a[k] * s.a[n - k];
    double cube = 0;
    for (int k = 0; k <= n; ++k) cube += s.a[k] * sq[n - k];
    s.a[n + 1] = (3.0 * n + 1) * (3.0 * n + 2) * s.a[n] - 2 * alpha * alpha * cube;
  }
  return s;
}

namespace {

template <class T>
struct BSum {
  T value, derivative;
  double trunc_err;
  int terms;
};

template <class T>
BSum<T> sum_B(T x, const SeriesCoeffs& c) {
  double alpha = c.alpha;
  if (alpha == 0.0) return {T(0.0), T(0.0), 0.0, 0};
  int N = static_cast<int>(c.a.size()) - 1;
  T ix3 = T(1.0) / (x * x * x);
  std::vector<T> terms(N + 1);
  T pw = alpha / x;
  for (int n = 0; n <= N; ++n) {
    terms[n] = c.a[n] * pw;
    pw *= ix3;
  }
  int m = N;
  for (int n = 0; n < N; ++n)
    if (std::abs(terms[n + 1]) > std::abs(terms[n])) {
      m = n;
      break;
    }
  // m is the smallest term of the decreasing run; sum strictly before it
  if (m == 0) m = 1;
  T v(0.0), d(0.0);
  for (int n = 0; n < m; ++n) {
    v += terms[n];
    d -= (3.0 * n + 1) * terms[n] / x;
  }
  return {v, d, std::abs(terms[m]), m};
}

}  // namespace

BValue eval_B(double x, const SeriesCoeffs& c) {
  if (!(std::abs(x) >= 4.0)) throw DomainError("eval_B: asymptotic regime only (|x| >= 4)");
  auto s = sum_B<double>(x, c);
  return {s.value, s.derivative, s.trunc_err, s.terms};
}

BValue eval_B(double x, double alpha) { return eval_B(x, series_coeffs(alpha, kMaxTerms)); }

ConnectionData connection_constants(double k, double alpha) {
  double c = std::cos(std::numbers::pi * alpha);
  double arg = c * c - k * k;
  if (!(std::abs(k) < std::abs(c)) || !(arg > 0)) throw ParameterError("connection_constants: need |k| < |cos(pi alpha)|");
  double d2 = -std::log(arg) / std::numbers::pi;
  double d = std::sqrt(std::max(0.0, d2));
  double ag = d2 > 0 ? arg_gamma_imag(0.5 * d2) : -std::numbers::pi / 2;
  double s = std::sin(std::numbers::pi * alpha);
  // +0.0 folds signed zeros so the principal branch is used consistently
  double phase = std::atan2(-k + 0.0, -s + 0.0);
  double phi = -1.5 * d2 * std::log(2.0) + ag - std::numbers::pi / 4 - phase;
  return {d, phi};
}

namespace {

struct MedianB {
  double b, db, im, trunc_err;
};

// Continues B from x0 = (1.5 (zeta_L + i s0))^{2/3} along Re zeta = zeta_L down to x = L.
MedianB median_B(const SeriesCoeffs& c, double L, double gap) {
  double zl = 2.0 / 3.0 * L * std::sqrt(L);
  double Z = zl + gap;
  double s0 = std::sqrt(Z * Z - zl * zl);
  auto x_of = [zl](double s) { return std::pow(cplx(1.5 * zl, 1.5 * s), 2.0 / 3.0); };
  cplx x0 = x_of(s0);
  auto st = sum_B<cplx>(x0, c);
  double alpha = c.alpha;
  using V = detail::Vec2<cplx>;
  auto rhs = [&](double s, const V& y) {
    cplx x = x_of(s);
    cplx dx = cplx(0, 1) / std::sqrt(x);
    return V{y[1] * dx, (2.0 * y[0] * y[0] * y[0] + x * y[0] - alpha) * dx};
  };
  V y{st.value, st.derivative};
  double s = s0, h = -0.05 * s0;
  V k1 = rhs(s, y);
  detail::StepControl ctl;
  double scale = std::abs(st.value);
  for (int it = 0; it < 200000 && s > 0; ++it) {
    if (s + h < 0) h = -s;
    auto step = detail::dp5_step(rhs, s, y, k1, h);
    bool ok = false;
    double fac = ctl.factor(detail::dp5_norm(step, y, 1e-14, 1e-16 * scale), ok);
    if (ok) {
      s = (s + h <= 1e-15 * s0) ? 0.0 : s + h;
      y = step.y;
      k1 = step.k7;
    }
    h *= fac;
  }
  if (s != 0.0) throw NumericalError("median_B: path continuation did not reach the real axis");
  return {y[0].real(), y[1].real(), y[0].imag(), st.trunc_err};
}

struct Dressed {
  double a, da;
};

// Decaying solution of d'' = (x + 6 B^2) d with d / Ai -> 1, from the Riccati form of
// q = d'/d - Ai'/Ai integrated leftward from a far abscissa.
Dressed dressed_airy(const SeriesCoeffs& c, double L) {
  AiryPair ai = airy(L);
  if (c.alpha == 0.0) return {ai.ai, ai.dai};
  const double X = 400.0;
  double a2 = c.alpha * c.alpha;
  using V = detail::Vec2<double>;
  auto rhs = [&](double x, const V& y) {
    double b = eval_B(x, c).value;
    AiryPair s = airy_scaled(x);
    double yai = s.dai / s.ai;
    double q = y[0];
    return V{6 * b * b - 2 * yai * q - q * q, q};
  };
  V y{-3 * a2 * std::pow(X, -2.5), 0.0};  // quasi-static q ~ -g / (2 sqrt(x))
  double x = X, h = -1.0;
  V k1 = rhs(x, y);
  detail::StepControl ctl;
  for (int it = 0; it < 200000 && x > L; ++it) {
    if (x + h < L) h = L - x;
    auto step = detail::dp5_step(rhs, x, y, k1, h);
    bool ok = false;
    double fac = ctl.factor(detail::dp5_norm(step, y, 1e-13, 1e-18), ok);
    if (ok) {
      x = (x + h - L <= 1e-14 * L) ? L : x + h;
      y = step.y;
      k1 = step.k7;
    }
    h *= fac;
  }
  if (x != L) throw NumericalError("dressed_airy: Riccati integration did not reach L");
  double logw = y[1] + 2 * a2 * std::pow(X, -1.5);  // minus the tail integral of q beyond X
  double w = std::exp(logw);
  return {ai.ai * w, (ai.dai + y[0] * ai.ai) * w};
}

}  // namespace

SeedBasis seed_basis(double alpha, double L) {
  if (!std::isfinite(alpha)) throw ParameterError("seed_basis: alpha must be finite");
  if (!(L >= 6.0 && L <= 12.0)) throw DomainError("seed_basis: L must lie in [6, 12]");
  SeriesCoeffs c = series_coeffs(alpha, kMaxTerms);
  SeedBasis sb{L, alpha, 0, 0, 0, 0, 0, 0};
  if (alpha != 0.0) {
    MedianB m1 = median_B(c, L, 30.0);
    MedianB m2 = median_B(c, L, 24.0);
    sb.b = m1.b;
    sb.db = m1.db;
    sb.trunc_err = std::abs(m1.b - m2.b) + m1.trunc_err;
    Dressed d = dressed_airy(c, L);
    sb.a = d.a;
    sb.da = d.da;
    sb.stokes = m1.im / d.a;
  } else {
    AiryPair ai = airy(L);
    sb.a = ai.ai;
    sb.da = ai.dai;
  }
  return sb;
}

Seed seed_from(const SeedBasis& s, double c) {
  return {s.L, s.b + c * s.a, s.db + c * s.da, s.trunc_err};
}

Seed seed_plus(double alpha, double airy_coeff, double L) {
  if (!(L >= 6.0)) throw DomainError("seed_plus: L must be >= 6");
  return seed_from(seed_basis(alpha, L), airy_coeff);
}

double tail_phase_AS(double x, const ConnectionData& cd) {
  if (!(x <= -10.0)) throw DomainError("tail_minus_AS: x must be <= -10");
  double z = -x;
  return 2.0 / 3.0 * z * std::sqrt(z) - 0.75 * cd.d * cd.d * std::log(z) + cd.phi;
}

double tail_minus_AS(double x, const ConnectionData& cd) {
  double th = tail_phase_AS(x, cd);
  return cd.d * std::pow(-x, -0.25) * std::cos(th);
}

double tail_minus_HM(double x, double alpha, int sigma) {
  if (!(x <= -4.0)) throw DomainError("tail_minus_HM: x must be <= -4");
  if (sigma != 1 && sigma != -1) throw ParameterError("tail_minus_HM: sigma must be +1 or -1");
  return sigma * std::sqrt(-x / 2) - alpha / (2 * x);
}

}  // namespace pii
