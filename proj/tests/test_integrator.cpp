#include <doctest.h>

#include <cmath>

#include "pii/errors.hpp"
#include "pii/integrator.hpp"
#include "pii/specfun.hpp"

using namespace pii;

TEST_CASE("zero solution stays zero") {
  Trajectory t = integrate_line({8, 0, 0}, 0.0, -30.0);
  CHECK(t.poles.empty());
  CHECK(t.lo() == -30.0);
  CHECK(t.hi() == 8.0);
  CHECK(t.eval(-12.3).u == 0.0);
  auto z = find_f_zeros(t);
  REQUIRE(z.size() == 1);
  CHECK(z[0].x0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(z[0].slope == doctest::Approx(1.0));
}

TEST_CASE("crossing the pole of 1/x") {
  IntegratorOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-13;
  Trajectory t = integrate_line({5, 0.2, -0.04}, 1.0, -5.0, o);
  REQUIRE(t.poles.size() == 1);
  CHECK(std::abs(t.poles[0].x) < 1e-8);
  CHECK(t.poles[0].residue == 1);
  CHECK(std::abs(t.poles[0].c3) < 1e-5);
  CHECK(t.eval(-3).u == doctest::Approx(-1.0 / 3).epsilon(1e-7));
  CHECK(t.eval(-1).u == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(t.segments.size() == 2);
  CHECK(t.segments[0].hi() - t.segments[1].lo() < 0);
  // gap half-width stays below the residual exclusion radius
  CHECK(t.segments[1].lo() - t.segments[0].hi() < 0.21);
  CHECK(t.quality.ode_residual < 1e-8);
  CHECK(t.quality.f_identity < 1e-8);
  auto z = find_f_zeros(t);
  REQUIRE(z.size() == 1);
  CHECK(z[0].x0 == doctest::Approx(-std::cbrt(4.0)).epsilon(1e-9));
  CHECK(z[0].slope == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("crossing is accurate for several handoff radii") {
  for (double r : {0.1, 0.07, 0.05}) {
    IntegratorOptions o;
    o.handoff_radius = r;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-14;
    Trajectory t = integrate_line({5, 0.2, -0.04}, 1.0, -5.0, o);
    REQUIRE(t.poles.size() == 1);
    // one unit past the pole
    double xe = t.poles[0].x - 1.0;
    CHECK(std::abs(t.eval(xe).u - 1 / xe) < 1e-8);
  }
}

TEST_CASE("rightward integration through poles of the alpha = 2 rational solution") {
  auto u = [](double x) { return -1 / x + 3 * x * x / (x * x * x + 4); };
  auto du = [](double x) {
    double q = x * x * x + 4;
    return 1 / (x * x) + (6 * x * q - 9 * x * x * x * x) / (q * q);
  };
  IntegratorOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  Trajectory t = integrate_line({-4, u(-4), du(-4)}, 2.0, 3.0, o);
  REQUIRE(t.poles.size() == 2);
  CHECK(t.poles[0].x == doctest::Approx(-std::cbrt(4.0)).epsilon(1e-9));
  CHECK(t.poles[0].residue == 1);
  CHECK(std::abs(t.poles[1].x) < 1e-9);
  CHECK(t.poles[1].residue == -1);
  for (double x : {-3.0, -1.0, 0.5, 2.5}) CHECK(t.eval(x).u == doctest::Approx(u(x)).epsilon(1e-8));
}

TEST_CASE("max_poles stops at the first pole") {
  IntegratorOptions o;
  o.max_poles = 0;
  Trajectory t = integrate_line({5, 0.2, -0.04}, 1.0, -5.0, o);
  CHECK(t.truncated);
  CHECK(t.poles.empty());
  REQUIRE(t.terminal_pole.has_value());
  CHECK(t.terminal_pole->residue == 1);
  CHECK(t.hi() == 5.0);
  CHECK(t.lo() > 0.0);
}

TEST_CASE("stop predicate") {
  Trajectory t = integrate_line({8, 0, 0}, 0.0, -30.0, {}, [](const State& s) { return s.x < -3; });
  CHECK(t.truncated);
  CHECK(t.lo() < -3);
  CHECK(t.lo() > -4);
}

TEST_CASE("tolerance convergence on a pole-free solution") {
  // small Airy-like seed at alpha = 0 gives a bounded oscillatory solution
  AiryPair a = airy(8.0);
  State seed{8.0, 0.5 * a.ai, 0.5 * a.dai};
  IntegratorOptions o1, o2;
  o2.rel_tol = o1.rel_tol / 2;
  Trajectory t1 = integrate_line(seed, 0.0, -20.0, o1), t2 = integrate_line(seed, 0.0, -20.0, o2);
  CHECK(t1.poles.empty());
  for (int i = 0; i < 10; ++i) {
    double x = -19.0 + 2.6 * i;
    double scale = std::max(1.0, std::abs(t1.eval(x).u));
    CHECK(std::abs(t1.eval(x).u - t2.eval(x).u) < 10 * o1.rel_tol * scale);
  }
}

TEST_CASE("pole crossing error falls with the tolerance") {
  double prev = INFINITY;
  for (double rt : {1e-9, 1e-11, 1e-13}) {
    IntegratorOptions o;
    o.rel_tol = rt;
    o.abs_tol = rt / 100;
    Trajectory t = integrate_line({5, 0.2, -0.04}, 1.0, -5.0, o);
    double e = std::abs(t.eval(-3).u + 1.0 / 3);
    CHECK(e < 1e4 * rt);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("option validation") {
  IntegratorOptions o;
  o.rel_tol = -1;
  CHECK_THROWS_AS(integrate_line({0, 0, 0}, 0, 1, o), ParameterError);
  CHECK_THROWS_AS(integrate_line({0, 0, 0}, 0, 0), ParameterError);
  IntegratorOptions p;
  p.handoff_radius = 0.3;
  CHECK_THROWS_AS(integrate_line({0, 0, 0}, 0, 1, p), ParameterError);
}
