#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pii/core.hpp"
#include "pii/errors.hpp"

using namespace pii;

TEST_CASE("params validation") {
  CHECK_NOTHROW(PiiParams::make(0.3, Family::AS, 0.2));
  CHECK_THROWS_AS(PiiParams::make(0.3, Family::AS, 0.7), ParameterError);  // |k| >= cos(0.3 pi)
  CHECK_THROWS_AS(PiiParams::make(0.6, Family::AS, 0.1), ParameterError);
  CHECK_THROWS_AS(PiiParams::make(1.5, Family::qAS, 0.0), ParameterError);
  CHECK_THROWS_AS(PiiParams::make(1.3, Family::qAS), ParameterError);
  CHECK_THROWS_AS(PiiParams::make(0.2, Family::pHM, {}, -1), ParameterError);
  CHECK_THROWS_AS(PiiParams::make(1.3, Family::qHM, 0.1), ParameterError);
  auto p = PiiParams::make(0.2, Family::pHM, {}, 1);
  CHECK(p.airy_coeff == doctest::Approx(std::cos(0.2 * std::numbers::pi)));
  auto s = PiiParams::make(0.2, Family::sHM, {}, -1);
  CHECK(s.airy_coeff == doctest::Approx(-std::cos(0.2 * std::numbers::pi)));
  auto q = PiiParams::make(1.3, Family::qHM);
  CHECK(q.airy_coeff == doctest::Approx(-std::cos(1.3 * std::numbers::pi)));
  auto qn = PiiParams::make(-1.3, Family::qHM);
  CHECK(qn.airy_coeff == doctest::Approx(std::cos(1.3 * std::numbers::pi)));
  CHECK(parse_family("QAS") == Family::qAS);
  CHECK_THROWS_AS(parse_family("foo"), ParameterError);
}

TEST_CASE("f value") {
  State s{0.5, 1.0, 0.25};
  CHECK(f_value(s) == doctest::Approx(2.0 - 0.5 + 0.5));
}

TEST_CASE("laurent low coefficients") {
  LaurentExpansion le{0.7, 1, 1.3, 0.11};
  auto c = laurent_coeffs(le, 6);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == doctest::Approx(-0.7 / 6));
  CHECK(c[3] == doctest::Approx((1.3 - 1) / 4));
  CHECK(c[4] == doctest::Approx(0.11));
  LaurentExpansion lm{0.7, -1, 1.3, 0.11};
  auto d = laurent_coeffs(lm, 6);
  CHECK(d[2] == doctest::Approx(0.7 / 6));
  CHECK(d[3] == doctest::Approx((1.3 + 1) / 4));
}

TEST_CASE("rational solution 1/x is reproduced exactly") {
  // u = 1/x solves the equation with alpha = 1: c3 = 0 and all higher vanish.
  LaurentExpansion le{0.0, 1, 1.0, 0.0};
  auto c = laurent_coeffs(le, 20);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-15);
  LaurentValue v = laurent_eval(le, 0.3, 3);
  CHECK(v.u == doctest::Approx(1 / 0.3));
  CHECK(v.du == doctest::Approx(-1 / 0.09));
  CHECK_THROWS_AS(laurent_eval(le, 0.0), DomainError);
  CHECK_THROWS_AS(laurent_eval(le, 0.6), DomainError);
}

TEST_CASE("full laurent series satisfies the equation") {
  LaurentExpansion le{-1.2, -1, 0.4, 0.37};
  for (double t : {0.05, -0.1, 0.2}) {
    double x = le.p + t, h = 1e-4;
    double up = laurent_eval(le, x + h, kLaurentFullOrder).u;
    double um = laurent_eval(le, x - h, kLaurentFullOrder).u;
    double u0 = laurent_eval(le, x, kLaurentFullOrder).u;
    double d2 = (up - 2 * u0 + um) / (h * h);
    CHECK(d2 == doctest::Approx(pii_rhs(x, u0, le.alpha)).epsilon(1e-5));
  }
}

TEST_CASE("laurent_fit recovers p and c3") {
  LaurentExpansion le{2.3, 1, 0.8, -0.25};
  auto at = [&](double t) {
    auto v = laurent_eval(le, le.p + t, kLaurentFullOrder);
    return State{le.p + t, v.u, v.du};
  };
  LaurentFit f = laurent_fit(at(-0.04), at(-0.03), le.alpha);
  CHECK(f.le.residue == 1);
  CHECK(f.le.p == doctest::Approx(2.3).epsilon(1e-13));
  CHECK(f.le.c3 == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(f.fit_err < 1e-10);
  LaurentExpansion lm{-0.4, -1, 2.2, 0.6};
  auto at2 = [&](double t) {
    auto v = laurent_eval(lm, lm.p + t, kLaurentFullOrder);
    return State{lm.p + t, v.u, v.du};
  };
  LaurentFit g = laurent_fit(at2(0.035), at2(0.02), lm.alpha);
  CHECK(g.le.residue == -1);
  CHECK(g.le.p == doctest::Approx(-0.4).epsilon(1e-13));
  CHECK(g.le.c3 == doctest::Approx(0.6).epsilon(1e-6));
  CHECK_THROWS_AS(laurent_fit(State{0, 1, 1}, State{0.1, 2, 1}, 0.3), FitError);
}

TEST_CASE("hermite7 reproduces a septic exactly and interpolates the rational solution") {
  // u = 1/x with alpha = 1 through nodes at 1 and 1.05; error falls like h^8 in u
  Node a{1.0, 1.0, -1.0}, b{1.05, 1 / 1.05, -1 / (1.05 * 1.05)};
  double x = 1.025;
  Jet j = hermite7(a, b, 1.0, x);
  CHECK(std::abs(j.u - 1 / x) < 1e-12);
  CHECK(std::abs(j.du + 1 / (x * x)) < 1e-12);
  CHECK(std::abs(j.d2u - 2 / (x * x * x)) < 1e-8);
}

TEST_CASE("trajectory eval across a pole gap") {
  // Build u = 1/x on [-1, -0.05] and [0.05, 1] by hand.
  Trajectory t;
  t.params = PiiParams::make(1.0, Family::raw, 0.0);
  Segment l, r;
  for (double x = -1.0; x < -0.05; x *= 0.97) l.nodes.push_back({x, 1 / x, -1 / (x * x)});
  l.nodes.push_back({-0.05, -20.0, -400.0});
  r.nodes.push_back({0.05, 20.0, -400.0});
  for (double x = 0.05 / 0.97; x < 1.0; x /= 0.97) r.nodes.push_back({x, 1 / x, -1 / (x * x)});
  t.segments = {l, r};
  t.poles = {{0.0, 1, 0.0, 0.0}};
  CHECK(t.eval(0.02).u == doctest::Approx(50.0));
  CHECK(t.eval(-0.5).u == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK_THROWS_AS(t.eval(0.0), DomainError);
  CHECK_THROWS_AS(t.eval(1.5), DomainError);
  CHECK(ode_residual(t) < 1e-8);
  CHECK(f_identity_residual(t) < 1e-8);
  Trajectory cut = t.restricted(-0.5, 0.5);
  CHECK(cut.poles.size() == 1);
  CHECK(cut.lo() == -0.5);
  Trajectory side = t.restricted(0.2, 0.9);
  CHECK(side.poles.empty());
}
