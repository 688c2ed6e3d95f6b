#include "pii/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "pii/errors.hpp"

namespace pii {

std::string to_string(Family f) {
  switch (f) {
    case Family::AS: return "AS";
    case Family::qAS: return "qAS";
    case Family::pHM: return "pHM";
    case Family::sHM: return "sHM";
    case Family::qHM: return "qHM";
    case Family::raw: return "raw";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "as") return Family::AS;
  if (l == "qas") return Family::qAS;
  if (l == "phm") return Family::pHM;
  if (l == "shm") return Family::sHM;
  if (l == "qhm") return Family::qHM;
  if (l == "raw") return Family::raw;
  throw ParameterError("unknown family '" + std::string(s) + "'");
}

namespace {

bool half_integer(double a) { return std::abs(a - std::round(a - 0.5) - 0.5) < 1e-12; }
int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

PiiParams PiiParams::make(double alpha, Family family, std::optional<double> k, int sigma) {
  if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
  PiiParams p;
  p.alpha = alpha;
  p.family = family;
  double c = std::cos(std::numbers::pi * alpha);
  bool hm = family == Family::pHM || family == Family::sHM || family == Family::qHM;
  if (hm && k) throw ParameterError(to_string(family) + " takes no k");
  if (!hm && !k) throw ParameterError(to_string(family) + " requires k");
  if (k && !std::isfinite(*k)) throw ParameterError("k must be finite");
  switch (family) {
    case Family::AS:
      if (std::abs(alpha) >= 0.5) throw ParameterError("AS needs |alpha| < 1/2");
      if (std::abs(*k) >= c) throw ParameterError("AS needs |k| < cos(pi alpha)");
      p.airy_coeff = *k;
      break;
    case Family::qAS:
      if (std::abs(alpha) < 0.5 || half_integer(alpha))
        throw ParameterError("qAS needs |alpha| > 1/2, alpha not a half-integer");
      if (std::abs(*k) >= std::abs(c)) throw ParameterError("qAS needs |k| < |cos(pi alpha)|");
      p.airy_coeff = *k;
      break;
    case Family::pHM:
    case Family::sHM: {
      if (std::abs(alpha) >= 0.5) throw ParameterError("HM needs |alpha| < 1/2");
      if (sigma != 1 && sigma != -1) throw ParameterError("HM needs sigma = +1 or -1");
      if (alpha != 0.0) {
        int want = family == Family::pHM ? sgn(alpha) : -sgn(alpha);
        if (sigma != want) throw ParameterError(to_string(family) + ": sigma inconsistent with sign of alpha");
      } else if (family == Family::sHM) {
        throw ParameterError("sHM needs alpha != 0");
      }
      p.sigma = sigma;
      p.airy_coeff = sigma * c;
      break;
    }
    case Family::qHM:
      if (std::abs(alpha) < 0.5 || half_integer(alpha))
        throw ParameterError("qHM needs |alpha| > 1/2, alpha not a half-integer");
      p.airy_coeff = -sgn(alpha) * c;
      break;
    case Family::raw:
      p.airy_coeff = *k;
      break;
  }
  return p;
}

double pii_rhs(double x, double u, double alpha) { return 2.0 * u * u * u + x * u - alpha; }

double f_value(const State& s) { return 2.0 * s.u * s.u - 2.0 * s.du + s.x; }

namespace {

// Value with derivatives along (p, c3).
struct Dual {
  double v = 0, dp = 0, dc = 0;
  Dual() = default;
  Dual(double a) : v(a) {}
  Dual(double a, double b, double c) : v(a), dp(b), dc(c) {}
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dp + b.dp, a.dc + b.dc}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dp - b.dp, a.dc - b.dc}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.dp * b.v + a.v * b.dp, a.dc * b.v + a.v * b.dc}; }
inline Dual operator*(double s, Dual a) { return {s * a.v, s * a.dp, s * a.dc}; }
inline Dual operator/(Dual a, double s) { return {a.v / s, a.dp / s, a.dc / s}; }

// c[j+1] holds c_j for j = -1..order. Matching t^{j-2}:
//   (j-3)(j+2) c_j = 2 [u^3]_{j-2} + p c_{j-2} + c_{j-3} - alpha [j == 2]
// where [u^3]_{j-2} is taken without its 3 c_{-1}^2 c_j term (c_j still zero).
template <class T>
std::vector<T> coeffs_t(T p, int eps, double alpha, T c3, int order) {
  std::vector<T> c(order + 2, T(0.0)), sq(order + 3, T(0.0));  // sq[m+2] = [u^2]_m
  c[0] = T(static_cast<double>(eps));
  auto C = [&](int j) -> T { return (j < -1 || j > order) ? T(0.0) : c[j + 1]; };
  auto square = [&](int m) {
    T s(0.0);
    for (int a = -1; a <= m + 1; ++a) s = s + C(a) * C(m - a);
    return s;
  };
  sq[0] = square(-2);
  for (int j = 0; j <= order; ++j) {
    sq[j] = square(j - 2);      // final: involves c up to c_{j-1}
    sq[j + 1] = square(j - 1);  // partial: c_j not yet known
    if (j == 3) {
      c[j + 1] = c3;
      continue;
    }
    T cube(0.0);
    for (int a = -1; a <= j - 1; ++a) cube = cube + C(a) * sq[j - a];
    T rhs = 2.0 * cube + p * C(j - 2) + C(j - 3);
    if (j == 2) rhs = rhs - T(alpha);
    c[j + 1] = rhs / static_cast<double>((j - 3) * (j + 2));
  }
  return c;
}

template <class T>
void sum_series(const std::vector<T>& c, double t, T& u, T& du) {
  // u = sum c_j t^j, j from -1
  u = T(0.0);
  du = T(0.0);
  int order = static_cast<int>(c.size()) - 2;
  for (int j = order; j >= 0; --j) {
    u = u * T(t) + c[j + 1];
  }
  for (int j = order; j >= 1; --j) {
    du = du * T(t) + static_cast<double>(j) * c[j + 1];
  }
  u = u + c[0] / t;
  du = du - c[0] / (t * t);
}

}  // namespace

std::vector<double> laurent_coeffs(const LaurentExpansion& le, int order) {
  return coeffs_t<double>(le.p, le.residue, le.alpha, le.c3, order);
}

LaurentValue laurent_eval(const LaurentExpansion& le, double x, int order) {
  double t = x - le.p;
  if (t == 0.0) throw DomainError("laurent_eval: x at the pole");
  if (std::abs(t) > 0.5) throw DomainError("laurent_eval: |x - p| beyond 0.5");
  if (order < 3) throw ParameterError("laurent_eval: order must be >= 3");
  auto c = laurent_coeffs(le, order);
  LaurentValue r{};
  sum_series(c, t, r.u, r.du);
  return r;
}

LaurentFit laurent_fit(const State& a, const State& b, double alpha) {
  if (std::abs(a.u) < 5.0 || std::abs(b.u) < 5.0) throw FitError("laurent_fit: states not near a pole");
  if ((a.du > 0) != (b.du > 0)) throw FitError("laurent_fit: u' changes sign between states");
  const State& near = std::abs(a.u) > std::abs(b.u) ? a : b;
  int eps = near.du > 0 ? -1 : 1;
  double p = near.x - eps / near.u;
  double c3 = 0.0;
  const State* st[2] = {&a, &b};
  double worst = INFINITY;
  for (int it = 0; it < 40; ++it) {
    auto c = coeffs_t<Dual>(Dual(p, 1, 0), eps, alpha, Dual(c3, 0, 1), kLaurentFullOrder);
    // Gauss-Newton on relative residuals
    double jtj[2][2] = {{0, 0}, {0, 0}}, jtr[2] = {0, 0};
    worst = 0;
    for (const State* s : st) {
      double t = s->x - p;
      if (std::abs(t) > 0.5 || t == 0.0) throw FitError("laurent_fit: iteration left the disc");
      Dual u, du;
      sum_series(c, t, u, du);
      // d/dp also moves t = x - p
      double uprime_t = du.v;
      double u2_t = 0;  // derivative of du w.r.t. t is u''
      u2_t = pii_rhs(s->x, u.v, alpha);
      Dual ru = u, rd = du;
      ru.dp -= uprime_t;
      rd.dp -= u2_t;
      double su = std::abs(s->u), sd = std::abs(s->du);
      double r[2] = {(ru.v - s->u) / su, (rd.v - s->du) / sd};
      double J[2][2] = {{ru.dp / su, ru.dc / su}, {rd.dp / sd, rd.dc / sd}};
      for (int i = 0; i < 2; ++i) {
        worst = std::max(worst, std::abs(r[i]));
        for (int k = 0; k < 2; ++k) {
          jtr[k] += J[i][k] * r[i];
          for (int l = 0; l < 2; ++l) jtj[k][l] += J[i][k] * J[i][l];
        }
      }
    }
    double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    if (!(std::abs(det) > 0)) throw FitError("laurent_fit: singular normal equations");
    double dp = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
    double dc = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
    p -= dp;
    c3 -= dc;
    if (!std::isfinite(p) || !std::isfinite(c3)) throw FitError("laurent_fit: diverged");
    if (std::abs(dp) < 1e-15 * (1 + std::abs(p)) && std::abs(dc) < 1e-12 * (1 + std::abs(c3))) break;
  }
  return {{p, eps, alpha, c3}, worst};
}

Jet hermite7(const Node& a, const Node& b, double alpha, double x) {
  double h = b.x - a.x;
  double s = (x - a.x) / h;
  auto derivs = [&](const Node& n, double out[4]) {
    double d2 = pii_rhs(n.x, n.u, alpha);
    double d3 = 6.0 * n.u * n.u * n.du + n.u + n.x * n.du;
    out[0] = n.u;
    out[1] = n.du * h;
    out[2] = d2 * h * h / 2.0;
    out[3] = d3 * h * h * h / 6.0;
  };
  double fa[4], fb[4];
  derivs(a, fa);
  derivs(b, fb);
  // Confluent divided differences on z = 0,0,0,0,1,1,1,1.
  const double z[8] = {0, 0, 0, 0, 1, 1, 1, 1};
  double dd[8][8];
  for (int i = 0; i < 8; ++i) dd[i][0] = i < 4 ? fa[0] : fb[0];
  for (int j = 1; j < 8; ++j)
    for (int i = 0; i + j < 8; ++i) {
      if (z[i] == z[i + j]) {
        const double* f = z[i] == 0 ? fa : fb;
        dd[i][j] = f[j];
      } else {
        dd[i][j] = (dd[i + 1][j - 1] - dd[i][j - 1]) / (z[i + j] - z[i]);
      }
    }
  // Newton form evaluation with first and second derivatives.
  double p = dd[0][7], dp = 0, d2p = 0;
  for (int j = 6; j >= 0; --j) {
    double w = s - z[j];
    d2p = d2p * w + 2.0 * dp;
    dp = dp * w + p;
    p = p * w + dd[0][j];
  }
  return {p, dp / h, d2p / (h * h)};
}

namespace {

const Segment* find_segment(const Trajectory& t, double x, std::size_t* idx) {
  const auto& s = t.segments;
  auto it = std::upper_bound(s.begin(), s.end(), x, [](double v, const Segment& g) { return v < g.lo(); });
  if (it == s.begin()) return nullptr;
  --it;
  if (x > it->hi()) {
    *idx = static_cast<std::size_t>(it - s.begin());
    return nullptr;  // in the gap after segment *idx
  }
  *idx = static_cast<std::size_t>(it - s.begin());
  return &*it;
}

Jet eval_jet(const Trajectory& t, double x) {
  if (t.empty() || !(x >= t.lo() && x <= t.hi())) throw DomainError("trajectory: x outside the covered window");
  std::size_t idx = 0;
  const Segment* seg = find_segment(t, x, &idx);
  double a = t.alpha();
  if (!seg) {
    if (idx >= t.poles.size()) throw DomainError("trajectory: x in an unexplained gap");
    const Pole& p = t.poles[idx];
    if (x == p.x) throw DomainError("trajectory: x at a pole");
    LaurentValue v = laurent_eval({p.x, p.residue, a, p.c3}, x, kLaurentFullOrder);
    return {v.u, v.du, pii_rhs(x, v.u, a)};
  }
  const auto& n = seg->nodes;
  if (n.size() == 1) return {n[0].u, n[0].du, pii_rhs(x, n[0].u, a)};
  auto it = std::upper_bound(n.begin(), n.end(), x, [](double v, const Node& m) { return v < m.x; });
  if (it == n.end()) --it;
  if (it == n.begin()) ++it;
  return hermite7(*(it - 1), *it, a, x);
}

}  // namespace

State Trajectory::eval(double x) const {
  Jet j = eval_jet(*this, x);
  return {x, j.u, j.du};
}

double Trajectory::eval_d2(double x) const { return eval_jet(*this, x).d2u; }

const Pole* Trajectory::nearest_pole(double x) const {
  const Pole* best = nullptr;
  for (const auto& p : poles)
    if (!best || std::abs(p.x - x) < std::abs(best->x - x)) best = &p;
  return best;
}

double Trajectory::pole_distance(double x) const {
  const Pole* p = nearest_pole(x);
  return p ? std::abs(p->x - x) : std::numeric_limits<double>::infinity();
}

Trajectory Trajectory::restricted(double a, double b) const {
  Trajectory r;
  r.params = params;
  r.truncated = truncated;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.hi() < a || s.lo() > b) continue;
    Segment ns;
    // Keep one node beyond each cut so the ends stay interpolated, then clip with eval.
    double lo = std::max(a, s.lo()), hi = std::min(b, s.hi());
    State sl = eval(lo), sh = eval(hi);
    ns.nodes.push_back({lo, sl.u, sl.du});
    for (const Node& n : s.nodes)
      if (n.x > lo && n.x < hi) ns.nodes.push_back(n);
    if (hi > lo) ns.nodes.push_back({hi, sh.u, sh.du});
    if (!r.segments.empty()) {
      // previous kept segment must be followed by poles[i-1]
      r.poles.push_back(poles[i - 1]);
    }
    r.segments.push_back(std::move(ns));
  }
  if (r.segments.empty()) throw DomainError("restricted: empty window");
  r.quality = measure_quality(r);
  return r;
}

namespace {

double scaled_residual(double x, const Jet& j, double alpha) {
  double rhs = pii_rhs(x, j.u, alpha);
  double scale = std::max(1.0, std::abs(2 * j.u * j.u * j.u) + std::abs(x * j.u) + std::abs(alpha));
  return std::abs(j.d2u - rhs) / scale;
}

}  // namespace

double ode_residual(const Trajectory& t, double exclude) {
  double worst = 0;
  for (const auto& s : t.segments)
    for (std::size_t i = 1; i < s.nodes.size(); ++i) {
      double x = 0.5 * (s.nodes[i - 1].x + s.nodes[i].x);
      if (t.pole_distance(x) < exclude) continue;
      Jet j = hermite7(s.nodes[i - 1], s.nodes[i], t.alpha(), x);
      worst = std::max(worst, scaled_residual(x, j, t.alpha()));
    }
  return worst;
}

double f_identity_residual(const Trajectory& t, double exclude) {
  double worst = 0;
  double a = t.alpha();
  for (const auto& s : t.segments)
    for (std::size_t i = 1; i < s.nodes.size(); ++i) {
      double x = 0.5 * (s.nodes[i - 1].x + s.nodes[i].x);
      if (t.pole_distance(x) < exclude) continue;
      Jet j = hermite7(s.nodes[i - 1], s.nodes[i], a, x);
      double f = 2 * j.u * j.u - 2 * j.du + x;
      double fp = 4 * j.u * j.du - 2 * j.d2u + 1;
      double res = fp - (-2 * j.u * f + 2 * a + 1);
      double scale = std::max(1.0, 2 * (std::abs(2 * j.u * j.u * j.u) + std::abs(x * j.u) + std::abs(a)));
      worst = std::max(worst, std::abs(res) / scale);
    }
  return worst;
}

Quality measure_quality(const Trajectory& t) { return {ode_residual(t), f_identity_residual(t)}; }

}  // namespace pii
