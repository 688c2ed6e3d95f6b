#pragma once
// Dormand-Prince 5(4) single step for a two-component system, FSAL.
#include <array>
#include <cmath>

namespace pii::detail {

template <class T>
using Vec2 = std::array<T, 2>;

template <class T>
struct Dp5Step {
  Vec2<T> y;     // 5th order solution
  Vec2<T> k7;    // derivative at the new point
  Vec2<T> err;   // embedded error estimate
};

template <class T, class F>
Dp5Step<T> dp5_step(F&& f, double t, const Vec2<T>& y, const Vec2<T>& k1, double h) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  auto comb = [&](auto... terms) {
    Vec2<T> r = y;
    ((r[0] += terms.first * terms.second[0], r[1] += terms.first * terms.second[1]), ...);
    return r;
  };
  using P = std::pair<double, Vec2<T>>;
  Vec2<T> k2 = f(t + h / 5, comb(P{h * a21, k1}));
  Vec2<T> k3 = f(t + 3 * h / 10, comb(P{h * a31, k1}, P{h * a32, k2}));
  Vec2<T> k4 = f(t + 4 * h / 5, comb(P{h * a41, k1}, P{h * a42, k2}, P{h * a43, k3}));
  Vec2<T> k5 = f(t + 8 * h / 9, comb(P{h * a51, k1}, P{h * a52, k2}, P{h * a53, k3}, P{h * a54, k4}));
  Vec2<T> k6 = f(t + h, comb(P{h * a61, k1}, P{h * a62, k2}, P{h * a63, k3}, P{h * a64, k4}, P{h * a65, k5}));
  Dp5Step<T> s;
  s.y = comb(P{h * b1, k1}, P{h * b3, k3}, P{h * b4, k4}, P{h * b5, k5}, P{h * b6, k6});
  s.k7 = f(t + h, s.y);
  for (int i = 0; i < 2; ++i)
    s.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * s.k7[i]);
  return s;
}

// RMS error norm against atol + rtol * max(|y|, |y_new|). With pole_scaling the
// derivative component is measured relative to |u'|/max(1,|u|), which keeps the
// absolute error of u' from growing like u^2 on the approach to a pole.
template <class T>
double dp5_norm(const Dp5Step<T>& s, const Vec2<T>& y, double rtol, double atol, bool pole_scaling = false) {
  double acc = 0;
  for (int i = 0; i < 2; ++i) {
    double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(s.y[i]));
    if (pole_scaling && i == 1) sc = atol + (sc - atol) / std::max(1.0, std::abs(y[0]));
    double e = std::abs(s.err[i]) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / 2);
}

// PI step-size controller.
struct StepControl {
  double err_prev = 1e-4;
  bool rejected_last = false;

  // Returns the factor to apply to h; accept tells whether the step stands.
  double factor(double err, bool& accept) {
    constexpr double safety = 0.9, beta = 0.04, expo = 0.2 - 0.75 * beta;
    if (!std::isfinite(err)) {
      accept = false;
      rejected_last = true;
      return 0.2;
    }
    if (err <= 1.0) {
      accept = true;
      double fac = err == 0.0 ? 5.0 : safety * std::pow(err, -expo) * std::pow(err_prev, beta);
      fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 5.0);
      err_prev = std::max(err, 1e-4);
      rejected_last = false;
      return fac;
    }
    accept = false;
    rejected_last = true;
    return std::max(0.2, safety * std::pow(err, -0.2));
  }
};

}  // namespace pii::detail
