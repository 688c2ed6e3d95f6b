#include "pii/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <memory>

#include "pii/errors.hpp"

namespace pii {

namespace {

bool half_integer(double a) { return std::abs(a - std::round(a - 0.5) - 0.5) < 1e-12; }

int nearest_int(double a) { return static_cast<int>(std::lround(a)); }

double seed_point(Window w, double L) {
  if (!(w.lo < w.hi)) throw ParameterError("window must satisfy lo < hi");
  if (w.hi > 12.0) throw ParameterError("window upper end beyond 12 is not supported (seeding is at x <= 12)");
  return std::max(L, w.hi);
}

Trajectory run_from(const Seed& s, double alpha, double x_end, const IntegratorOptions& o,
                    const StopPredicate& stop = {}) {
  return integrate_line({s.x, s.u, s.du}, alpha, x_end, o, stop);
}

enum class Verdict { blowup, oscillation, undecided };

// Oscillation: u' changes sign twice while |u| < 10, with no large excursion in between.
StopPredicate oscillation_watch(bool* hit) {
  struct St {
    int last = 0;
    int flips = 0;
  };
  auto st = std::make_shared<St>();
  return [st, hit](const State& s) {
    if (std::abs(s.u) >= 10) {
      st->flips = 0;
      st->last = 0;
      return false;
    }
    int sg = s.du > 0 ? 1 : (s.du < 0 ? -1 : 0);
    if (sg != 0) {
      if (st->last != 0 && sg != st->last) ++st->flips;
      st->last = sg;
    }
    if (st->flips >= 2) {
      *hit = true;
      return true;
    }
    return false;
  };
}

struct Probe {
  Verdict v;
  Trajectory t;
};

Probe probe(const SeedBasis& b, double c, double x_lo, int poles, const IntegratorOptions& base) {
  IntegratorOptions o = base;
  o.max_poles = poles;
  bool osc = false;
  Trajectory t = run_from(seed_from(b, c), b.alpha, x_lo, o, oscillation_watch(&osc));
  if (t.terminal_pole) return {Verdict::blowup, std::move(t)};
  if (osc) return {Verdict::oscillation, std::move(t)};
  return {Verdict::undecided, std::move(t)};
}

Probe decided_probe(const SeedBasis& b, double c, double& x_lo, int poles, const IntegratorOptions& o) {
  for (;;) {
    Probe p = probe(b, c, x_lo, poles, o);
    if (p.v != Verdict::undecided || x_lo <= -60) return p;
    x_lo -= 4;
  }
}

// Largest x (scanning leftward) where the two runs stop agreeing.
double divergence_point(const Trajectory& a, const Trajectory& b, double tol, double step = 0.01) {
  double lo = std::max(a.lo(), b.lo());
  double hi = std::min(a.hi(), b.hi());
  for (double x = hi; x >= lo; x -= step) {
    if (a.pole_distance(x) < 0.1 || b.pole_distance(x) < 0.1) {
      const Pole* pa = a.nearest_pole(x);
      const Pole* pb = b.nearest_pole(x);
      bool same = pa && pb && pa->residue == pb->residue && std::abs(pa->x - pb->x) < tol * 10;
      if (!same) return x;
      continue;
    }
    double ua = a.eval(x).u, ub = b.eval(x).u;
    if (std::abs(ua - ub) > tol * std::max(1.0, std::abs(ua))) return x;
  }
  return lo;
}

Trajectory finish(Trajectory t, const PiiParams& p, Window w);

struct Separatrix {
  double k_star, c_osc, c_blow, depth;
  int iterations;
};

// Bisects the airy coefficient between a run that oscillates after `poles` poles and one that
// meets one more pole. depth: where the two final bracketing runs part.
Separatrix bisect(const SeedBasis& basis, int poles, double c_osc, double c_blow, double w_lo,
                  const SolveOptions& opt) {
  double x_lo = std::min(opt.probe_lo, w_lo);
  Probe po = decided_probe(basis, c_osc, x_lo, poles, opt.integ);
  Probe pb = decided_probe(basis, c_blow, x_lo, poles, opt.integ);
  if (po.v != Verdict::oscillation || pb.v != Verdict::blowup)
    throw BracketError("no blow-up/oscillation dichotomy in the initial bracket");
  int it = 0;
  while (std::abs(c_blow - c_osc) > opt.bracket_width && it < 200) {
    double mid = 0.5 * (c_osc + c_blow);
    if (mid == c_osc || mid == c_blow) break;
    Probe pm = decided_probe(basis, mid, x_lo, poles, opt.integ);
    ++it;
    if (pm.v == Verdict::undecided) break;  // indistinguishable from the separatrix at this depth
    if (pm.v == Verdict::blowup) {
      c_blow = mid;
      pb = std::move(pm);
    } else {
      c_osc = mid;
      po = std::move(pm);
    }
  }
  double depth = divergence_point(po.t, pb.t, opt.depth_tol);
  return {0.5 * (c_osc + c_blow), c_osc, c_blow, depth, it};
}

Trajectory separatrix_run(const SeedBasis& basis, const Separatrix& s, int poles, const PiiParams& p, Window w,
                          const IntegratorOptions& integ) {
  IntegratorOptions o = integ;
  o.max_poles = poles;
  double lo = std::max(s.depth, w.lo);
  Trajectory t = run_from(seed_from(basis, s.k_star), p.alpha, lo, o);
  if (w.hi > basis.L) {
    // Right of the seed the decaying part is negligible; a second seed at w.hi with the same
    // coefficient supplies [L, w.hi] without integrating against the growing Airy mode.
    Trajectory ext = run_from(seed_from(seed_basis(p.alpha, w.hi), s.k_star), p.alpha, basis.L, integ);
    auto& last = t.segments.back().nodes;
    const auto& en = ext.segments.back().nodes;
    for (std::size_t i = 1; i < en.size(); ++i) last.push_back(en[i]);
  }
  if (t.terminal_pole) {
    // the extra pole lies beyond the trusted depth; keep what precedes it
    double cut = t.terminal_pole->x + 0.2;
    lo = std::max(lo, cut);
    t = t.restricted(lo, t.hi());
  }
  Trajectory r = finish(std::move(t), p, {lo, w.hi});
  r.truncated = lo > w.lo;
  return r;
}

Trajectory finish(Trajectory t, const PiiParams& p, Window w) {
  double hi = std::min(w.hi, t.hi());
  double lo = std::max(w.lo, t.lo());
  bool trunc = t.truncated || lo > w.lo;
  t.params = p;
  Trajectory r = t.restricted(lo, hi);
  r.params = p;
  r.truncated = trunc;
  r.quality = measure_quality(r);
  return r;
}

bool qas_tail_ok(const Trajectory& t) {
  if (t.lo() > -8) return false;
  double lo = t.lo();
  for (const auto& p : t.poles)
    if (p.x < lo + 3) return false;
  if (t.terminal_pole) return false;
  for (double x = lo; x <= lo + 3; x += 0.05)
    if (std::abs(t.eval(x).u) > 1.5) return false;
  return true;
}

bool qhm_tail_ok(const Trajectory& t, int sigma) {
  double lo = t.lo();
  if (lo > -4) return false;
  for (const auto& p : t.poles)
    if (p.x < lo + 2) return false;
  double prev = -1;
  for (double x : {lo + 2, lo + 1, lo}) {
    double e = std::abs(t.eval(x).u - tail_minus_HM(std::min(x, -4.0), t.alpha(), sigma));
    if (prev >= 0 && e > prev) return false;
    prev = e;
  }
  return prev < 0.1;
}

}  // namespace

std::string to_string(Construction c) {
  switch (c) {
    case Construction::direct: return "direct";
    case Construction::chain: return "chain";
    case Construction::both: return "both";
  }
  return "?";
}

ChainPlan resolve_family(double alpha, Family family, std::optional<double> k) {
  if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
  if (half_integer(alpha)) throw ParameterError("half-integer alpha is not supported");
  if (family != Family::qAS && family != Family::qHM)
    throw ParameterError("resolve_family: chains are built for qAS and qHM only");
  PiiParams::make(alpha, family, k);  // validates
  ChainPlan plan{};
  plan.negate = alpha < 0;
  double a = std::abs(alpha);
  plan.steps = nearest_int(a);
  plan.base_alpha = a - plan.steps;
  double sign = (plan.steps % 2 == 0) ? 1.0 : -1.0;
  if (family == Family::qAS) {
    double kk = plan.negate ? -*k : *k;
    plan.base_family = Family::AS;
    plan.base_airy_coeff = sign * kk;
    plan.base_sigma = 0;
  } else {
    plan.base_sigma = -1;
    plan.base_family = plan.base_alpha > 0 ? Family::sHM : Family::pHM;
    plan.base_airy_coeff = -std::cos(std::numbers::pi * plan.base_alpha);
  }
  double c = plan.base_airy_coeff;
  for (int i = 0; i <= plan.steps; ++i) {
    plan.stage_coeffs.push_back(c);
    c = -c;
  }
  return plan;
}

Trajectory solve_AS(double alpha, double k, Window w, const SolveOptions& opt) {
  PiiParams p = PiiParams::make(alpha, Family::AS, k);
  double L = seed_point(w, opt.seed_L);
  Trajectory t = run_from(seed_plus(alpha, k, L), alpha, w.lo, opt.integ);
  if (!t.poles.empty() || t.terminal_pole) {
    std::ostringstream m;
    m << "solve_AS: pole near x = " << (t.poles.empty() ? t.terminal_pole->x : t.poles.front().x)
      << " on a solution that must be pole-free";
    throw InconsistencyError(m.str(), t.poles.size());
  }
  return finish(std::move(t), p, w);
}

HMResult solve_HM(double alpha, int sigma, Window w, const SolveOptions& opt) {
  if (std::abs(alpha) >= 0.5) throw ParameterError("solve_HM needs |alpha| < 1/2");
  if (sigma != 1 && sigma != -1) throw ParameterError("solve_HM needs sigma = +1 or -1");
  Family fam = (alpha == 0.0 || sigma == (alpha > 0 ? 1 : -1)) ? Family::pHM : Family::sHM;
  PiiParams p = PiiParams::make(alpha, fam, {}, sigma);
  if (w.hi > 12.0 || !(w.lo < w.hi)) throw ParameterError("solve_HM: bad window");
  double L = std::min(opt.hm_seed_L, w.hi);
  L = std::max(L, 6.0);
  SeedBasis basis = seed_basis(alpha, L);
  // c = 0 would be the zero solution at alpha = 0, so the oscillating end is nudged off it
  Separatrix sx;
  try {
    sx = bisect(basis, 0, 0.01 * sigma, 2.0 * sigma, w.lo, opt);
  } catch (const BracketError& e) {
    throw BracketError(std::string("solve_HM: ") + e.what());
  }
  Trajectory r = separatrix_run(basis, sx, 0, p, w, opt.integ);
  return {std::move(r), sx.k_star, std::min(sx.c_osc, sx.c_blow), std::max(sx.c_osc, sx.c_blow), sx.depth,
          sx.iterations};
}

std::vector<Pole> pole_census(const Trajectory& t) {
  std::vector<Pole> p = t.poles;
  std::sort(p.begin(), p.end(), [](const Pole& a, const Pole& b) { return a.x < b.x; });
  return p;
}

double max_difference(const Trajectory& a, const Trajectory& b, double exclude, double step) {
  double lo = std::max(a.lo(), b.lo());
  double hi = std::min(a.hi(), b.hi());
  double worst = 0;
  for (double x = lo; x <= hi; x += step) {
    if (a.pole_distance(x) <= exclude || b.pole_distance(x) <= exclude) continue;
    worst = std::max(worst, std::abs(a.eval(x).u - b.eval(x).u));
  }
  return worst;
}

namespace {

struct Built {
  Trajectory t;
  bool complete;
};

Built direct_qas(const PiiParams& p, Window w, const SolveOptions& opt) {
  double L = seed_point(w, opt.seed_L);
  Trajectory t = run_from(seed_plus(p.alpha, p.airy_coeff, L), p.alpha, w.lo, opt.integ);
  Trajectory r = finish(std::move(t), p, w);
  return {r, !r.truncated && qas_tail_ok(r)};
}

// Shooting at the target alpha: the separatrix between n poles followed by oscillation and an
// extra pole. The formula coefficient is kept for comparison, not used as the seed.
Built direct_qhm(const PiiParams& p, Window w, const SolveOptions& opt, double* k_found) {
  if (w.hi > 12.0 || !(w.lo < w.hi)) throw ParameterError("bad window");
  double L = std::max(6.0, std::min(opt.hm_seed_L, w.hi));
  SeedBasis basis = seed_basis(p.alpha, L);
  int n = nearest_int(std::abs(p.alpha));
  double s = p.airy_coeff > 0 ? 1.0 : -1.0;
  Separatrix sx = bisect(basis, n, 0.01 * s, 2.0 * s, w.lo, opt);
  *k_found = sx.k_star;
  Trajectory r = separatrix_run(basis, sx, n, p, w, opt.integ);
  int sigma = p.alpha > 0 ? -1 : 1;
  return {r, qhm_tail_ok(r, sigma)};
}

Built chain_build(const PiiParams& target, Window w, const SolveOptions& opt) {
  std::optional<double> k;
  if (target.family == Family::qAS) k = target.airy_coeff;
  ChainPlan plan = resolve_family(target.alpha, target.family, k);
  Trajectory t;
  double lo = w.lo;
  if (plan.base_family == Family::AS) {
    t = solve_AS(plan.base_alpha, plan.base_airy_coeff, w, opt);
  } else {
    HMResult hm = solve_HM(plan.base_alpha, plan.base_sigma, w, opt);
    t = std::move(hm.traj);
    lo = t.lo();
  }
  for (int i = 0; i < plan.steps; ++i) t = backlund_trajectory(t);
  if (plan.negate) t = negate_alpha(t);
  t.params = target;
  t.truncated = lo > w.lo;
  t.quality = measure_quality(t);
  bool ok = target.family == Family::qAS ? (!t.truncated && qas_tail_ok(t))
                                         : qhm_tail_ok(t, target.alpha > 0 ? -1 : 1);
  return {t, ok};
}

}  // namespace

QuasiSolution build_quasi(double alpha, Family family, std::optional<double> k, Window w,
                          const SolveOptions& opt) {
  if (family != Family::qAS && family != Family::qHM) throw ParameterError("build_quasi: family must be qas or qhm");
  if (half_integer(alpha)) throw ParameterError("half-integer alpha is not supported");
  PiiParams p = PiiParams::make(alpha, family, k);
  const Window requested = w;
  w.lo = std::min(w.lo, opt.census_lo);
  std::optional<Built> d, c;
  std::optional<double> k_shot;
  std::string note;
  if (opt.direct) {
    try {
      if (family == Family::qAS) {
        d = direct_qas(p, w, opt);
      } else {
        double kf = 0;
        d = direct_qhm(p, w, opt, &kf);
        k_shot = kf;
      }
    } catch (const NumericalError& e) {
      note += std::string("direct failed: ") + e.what() + "; ";
    }
  }
  if (opt.chain) {
    try {
      c = chain_build(p, w, opt);
    } catch (const NumericalError& e) {
      note += std::string("chain failed: ") + e.what() + "; ";
    } catch (const InconsistencyError& e) {
      note += std::string("chain failed: ") + e.what() + "; ";
    }
  }
  if (!d && !c) throw NumericalError("build_quasi: no construction completed (" + note + ")");
  QuasiSolution q;
  q.params = p;
  q.note = note;
  q.k_shot = k_shot;
  if (d && c) {
    q.construction = Construction::both;
    q.cross_err = max_difference(d->t, c->t);
    if (*q.cross_err > opt.cross_tol) {
      std::ostringstream m;
      m << "build_quasi: direct and chain constructions differ by " << *q.cross_err << " (direct window ["
        << d->t.lo() << ", " << d->t.hi() << "], " << d->t.poles.size() << " poles; chain window [" << c->t.lo()
        << ", " << c->t.hi() << "], " << c->t.poles.size() << " poles)";
      throw InconsistencyError(m.str(), *q.cross_err);
    }
    q.traj = d->t;
    q.census_complete = d->complete;
    q.other = c->t;
  } else if (d) {
    q.construction = Construction::direct;
    q.traj = d->t;
    q.census_complete = d->complete;
  } else {
    q.construction = Construction::chain;
    q.traj = c->t;
    q.census_complete = c->complete;
  }
  q.poles = pole_census(q.traj);
  if (requested.lo > q.traj.lo()) {
    q.traj = q.traj.restricted(requested.lo, q.traj.hi());
    q.traj.quality = measure_quality(q.traj);
    if (q.other && requested.lo > q.other->lo()) *q.other = q.other->restricted(requested.lo, q.other->hi());
  }
  q.achieved = {q.traj.lo(), q.traj.hi()};
  if (!q.census_complete && opt.strict_census) {
    std::ostringstream m;
    m << "build_quasi: census incomplete; trajectory reaches only x = " << q.traj.lo();
    throw WindowError(m.str(), q.traj.lo());
  }
  return q;
}

}  // namespace pii
