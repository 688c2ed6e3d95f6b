#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pii/errors.hpp"
#include "pii/rational.hpp"
#include "pii/solutions.hpp"

using namespace pii;

TEST_CASE("chain plans") {
  auto p = resolve_family(1.0, Family::qAS, 0.4);
  CHECK(p.base_alpha == 0.0);
  CHECK(p.steps == 1);
  CHECK(p.base_family == Family::AS);
  CHECK(p.base_airy_coeff == doctest::Approx(-0.4));
  REQUIRE(p.stage_coeffs.size() == 2);
  CHECK(p.stage_coeffs[1] == doctest::Approx(0.4));

  auto h = resolve_family(1.0, Family::qHM);
  CHECK(h.base_family == Family::pHM);
  CHECK(h.base_sigma == -1);
  CHECK(h.base_airy_coeff == doctest::Approx(-1.0));

  auto s = resolve_family(2.3, Family::qHM);
  CHECK(s.base_alpha == doctest::Approx(0.3));
  CHECK(s.steps == 2);
  CHECK(s.base_family == Family::sHM);
  // coefficient after two flips is the qHM one at 2.3
  CHECK(s.stage_coeffs.back() == doctest::Approx(-std::cos(std::numbers::pi * 2.3)));

  auto n = resolve_family(-1.3, Family::qAS, 0.2);
  CHECK(n.negate);
  CHECK(n.steps == 1);
  CHECK(n.base_alpha == doctest::Approx(0.3));
  CHECK(n.base_airy_coeff == doctest::Approx(0.2));

  CHECK_THROWS_AS(resolve_family(1.5, Family::qAS, 0.1), ParameterError);
  CHECK_THROWS_AS(resolve_family(0.3, Family::qAS, 0.1), ParameterError);
  CHECK_THROWS_AS(resolve_family(1.3, Family::AS, 0.1), ParameterError);
}

TEST_CASE("AS solutions") {
  Trajectory z = solve_AS(0, 0, {-20, 8});
  CHECK(z.poles.empty());
  CHECK(z.eval(-10).u == 0.0);
  Trajectory t = solve_AS(0, 0.5, {-40, 8});
  CHECK(t.poles.empty());
  CHECK(t.lo() == -40);
  CHECK(!t.truncated);
  double mx = 0;
  for (double x = -40; x < -30; x += 0.01) mx = std::max(mx, std::abs(t.eval(x).u) * std::pow(-x, 0.25));
  CHECK(mx == doctest::Approx(0.302606).epsilon(0.03));
  CHECK_THROWS_AS(solve_AS(0.3, 0.9, {-10, 8}), ParameterError);
  CHECK_THROWS_AS(solve_AS(0.0, 0.2, {-10, 14}), ParameterError);
}

TEST_CASE("separatrix shooting") {
  auto hm = solve_HM(0, 1, {-12, 8});
  CHECK(hm.k_star == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(hm.traj.poles.empty());
  CHECK(hm.depth < -4);
  CHECK(hm.traj.lo() == hm.depth);
  CHECK(hm.traj.truncated);
  // Hastings-McLeod is monotone and follows sqrt(-x/2)
  for (double x = hm.traj.lo(); x < 6; x += 0.1) CHECK(hm.traj.eval(x).du < 0);
  double xl = hm.traj.lo();
  CHECK(std::abs(hm.traj.eval(xl).u - tail_minus_HM(xl, 0, 1)) < 0.02);

  double c = std::cos(0.3 * std::numbers::pi);
  auto p = solve_HM(0.3, 1, {-12, 8});
  CHECK(p.k_star == doctest::Approx(c).epsilon(1e-4));
  CHECK(p.traj.params.family == Family::pHM);
  auto s = solve_HM(0.3, -1, {-12, 8});
  CHECK(s.k_star == doctest::Approx(-c).epsilon(1e-4));
  CHECK(s.traj.params.family == Family::sHM);
  int crossings = 0;
  double prev = s.traj.eval(s.traj.hi()).u;
  for (double x = s.traj.hi(); x >= s.traj.lo(); x -= 0.01) {
    double u = s.traj.eval(x).u;
    if ((u > 0) != (prev > 0)) ++crossings;
    prev = u;
  }
  CHECK(crossings == 1);
  CHECK_THROWS_AS(solve_HM(0.6, 1, {-12, 8}), ParameterError);
}

TEST_CASE("quasi solutions against the rational oracle") {
  auto q1 = build_quasi(1.0, Family::qAS, 0.0, {-8, 8});
  REQUIRE(q1.poles.size() == 1);
  CHECK(q1.poles[0].x == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(q1.poles[0].residue == 1);
  CHECK(q1.construction == Construction::both);
  CHECK(*q1.cross_err < 1e-7);
  CHECK(q1.census_complete);

  auto q2 = build_quasi(2.0, Family::qAS, 0.0, {-8, 8});
  REQUIRE(q2.poles.size() == 2);
  CHECK(q2.poles[0].x == doctest::Approx(-1.587401).epsilon(1e-6));
  CHECK(q2.poles[1].residue == -1);
  for (double x = -6; x <= 6; x += 0.37)
    if (q2.traj.pole_distance(x) > 0.1) CHECK(q2.traj.eval(x).u == doctest::Approx(rational_u(2, x).u).epsilon(1e-6));

  auto q3 = build_quasi(3.0, Family::qAS, 0.0, {-10, 8});
  auto c3 = pole_census(q3.traj);
  REQUIRE(c3.size() == 3);
  CHECK(c3[0].x == doctest::Approx(-2.861).epsilon(1e-3));
  CHECK(c3[1].x == doctest::Approx(-1.587).epsilon(1e-3));
  CHECK(c3[2].x == doctest::Approx(1.506).epsilon(1e-3));
  CHECK(c3[0].residue == 1);
  CHECK(c3[1].residue == -1);
  CHECK(c3[2].residue == 1);
}

TEST_CASE("quasi solutions at non-integer alpha") {
  auto q = build_quasi(1.3, Family::qAS, 0.2, {-40, 8});
  REQUIRE(q.poles.size() == 1);
  CHECK(q.poles[0].residue == 1);
  CHECK(*q.cross_err < 1e-4);

  auto h = build_quasi(1.0, Family::qHM, std::nullopt, {-12, 8});
  REQUIRE(h.poles.size() == 1);
  CHECK(h.census_complete);
  CHECK(h.traj.eval(8).u * 8 == doctest::Approx(1.0).epsilon(1e-2));
  double xl = h.traj.lo();
  CHECK(std::abs(h.traj.eval(xl).u - tail_minus_HM(xl, 1.0, -1)) < 0.05);
  REQUIRE(h.k_shot);
  CHECK(*h.k_shot == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(*h.cross_err < 1e-4);

  auto h2 = build_quasi(2.3, Family::qHM, std::nullopt, {-12, 8});
  CHECK(h2.poles.size() == 2);
  CHECK(*h2.k_shot == doctest::Approx(-std::cos(2.3 * std::numbers::pi)).epsilon(1e-4));
}

TEST_CASE("negative alpha") {
  auto a = build_quasi(1.3, Family::qAS, 0.2, {-20, 8});
  auto b = build_quasi(-1.3, Family::qAS, -0.2, {-20, 8});
  REQUIRE(b.poles.size() == 1);
  CHECK(b.poles[0].residue == -1);
  for (double x = -19.5; x < 7.5; x += 0.29)
    if (a.traj.pole_distance(x) > 0.1) CHECK(std::abs(a.traj.eval(x).u + b.traj.eval(x).u) < 1e-6);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(build_quasi(2.5, Family::qAS, 0.1, {-10, 8}), ParameterError);
  CHECK_THROWS_AS(build_quasi(1.3, Family::qHM, 0.1, {-10, 8}), ParameterError);
  // short windows are censused on an extended one
  auto s = build_quasi(1.0, Family::qAS, 0.0, {-5, 5});
  CHECK(s.census_complete);
  CHECK(s.traj.lo() == -5);
  CHECK(s.poles.size() == 1);
  SolveOptions o;
  o.census_lo = -2;
  CHECK_THROWS_AS(build_quasi(1.3, Family::qAS, 0.1, {-2, 8}, o), WindowError);
  o.strict_census = false;
  auto q = build_quasi(1.3, Family::qAS, 0.1, {-2, 8}, o);
  CHECK(!q.census_complete);
  CHECK(pole_census(Trajectory{}).empty());
}
