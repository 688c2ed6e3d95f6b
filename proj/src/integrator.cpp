#include "pii/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "pii/detail/dopri5.hpp"
#include "pii/errors.hpp"

namespace pii {

namespace {

constexpr double kFitTol = 1e-4;
constexpr int kMaxRetries = 3;

void check_options(const IntegratorOptions& o) {
  if (!(o.rel_tol > 0 && o.rel_tol < 1e-2)) throw ParameterError("rel_tol must be in (0, 1e-2)");
  if (!(o.abs_tol > 0)) throw ParameterError("abs_tol must be positive");
  if (!(o.handoff_radius > 0 && o.handoff_radius <= 0.1)) throw ParameterError("handoff_radius must be in (0, 0.1]");
  if (!(o.u_switch * o.handoff_radius > 1)) throw ParameterError("u_switch must exceed 1/handoff_radius");
  if (!(o.max_step > 0)) throw ParameterError("max_step must be positive");
}

}  // namespace

Trajectory integrate_line(const State& seed, double alpha, double x_end, const IntegratorOptions& opt,
                          const StopPredicate& stop) {
  check_options(opt);
  if (!std::isfinite(seed.x) || !std::isfinite(seed.u) || !std::isfinite(seed.du) || !std::isfinite(x_end) ||
      !std::isfinite(alpha))
    throw ParameterError("integrate_line: non-finite input");
  if (x_end == seed.x) throw ParameterError("integrate_line: empty interval");

  Trajectory tr;
  tr.params.alpha = alpha;
  const double dir = x_end > seed.x ? 1.0 : -1.0;
  const double u_fit = 1.0 / opt.handoff_radius;
  using V = detail::Vec2<double>;
  auto rhs = [alpha](double x, const V& y) { return V{y[1], pii_rhs(x, y[0], alpha)}; };

  std::vector<std::vector<Node>> segs(1);
  segs[0].push_back({seed.x, seed.u, seed.du});
  std::vector<Pole> poles;

  double x = seed.x;
  V y{seed.u, seed.du};
  V k1 = rhs(x, y);
  double h = dir * std::min(0.01, std::abs(x_end - x));
  detail::StepControl ctl;
  std::optional<std::size_t> pending;  // index in segs.back() of the first state past u_fit
  double cap = 0.2;
  int retries = 0;

  auto fail_or_retry = [&](const std::string& why) {
    if (++retries > kMaxRetries) {
      std::ostringstream m;
      m << "integrate_line: " << why << " near x = " << x;
      throw IntegrationError(m.str(), x, y[0], y[1]);
    }
    // back up to the last state below the handoff threshold and retry with a tighter cap
    auto& nodes = segs.back();
    std::size_t keep = nodes.size();
    while (keep > 1 && std::abs(nodes[keep - 1].u) >= u_fit) --keep;
    nodes.resize(keep);
    const Node& b = nodes.back();
    x = b.x;
    y = {b.u, b.du};
    k1 = rhs(x, y);
    cap *= 0.5;
    h = dir * std::min(std::abs(h), cap / std::max(1.0, std::abs(y[0])));
    pending.reset();
    ctl = {};
  };

  long steps = 0;
  while (x != x_end) {
    if (++steps > opt.max_steps) throw IntegrationError("integrate_line: step budget exhausted", x, y[0], y[1]);
    double hmax = std::min(opt.max_step, std::abs(x_end - x));
    if (std::abs(y[0]) > 1.0) hmax = std::min(hmax, cap / std::abs(y[0]));
    if (std::abs(h) > hmax) h = dir * hmax;
    if (std::abs(h) < 1e-14 * (1.0 + std::abs(x)))
      throw IntegrationError("integrate_line: step size underflow", x, y[0], y[1]);

    auto st = detail::dp5_step(rhs, x, y, k1, h);
    bool accept = false;
    double fac = ctl.factor(detail::dp5_norm(st, y, opt.rel_tol, opt.abs_tol, true), accept);
    if (!accept) {
      h *= fac;
      continue;
    }
    double xn = x + h;
    if (dir * (xn - x_end) >= 0 || std::abs(x_end - xn) < 1e-14 * (1.0 + std::abs(x_end))) xn = x_end;
    x = xn;
    y = st.y;
    k1 = st.k7;
    h *= fac;
    segs.back().push_back({x, y[0], y[1]});

    if (stop && stop({x, y[0], y[1]})) {
      tr.truncated = x != x_end;
      break;
    }
    if (!std::isfinite(y[0]) || std::abs(y[0]) > opt.u_switch) {
      fail_or_retry("|u| passed the ceiling without a Laurent handoff");
      continue;
    }
    bool approaching = (y[0] > 0 ? 1.0 : -1.0) * y[1] * dir > 0;
    if (std::abs(y[0]) < u_fit || !approaching) continue;
    if (!pending) {
      pending = segs.back().size() - 1;
      continue;
    }
    const Node& a = segs.back()[*pending];
    LaurentFit fit;
    try {
      fit = laurent_fit({a.x, a.u, a.du}, {x, y[0], y[1]}, alpha);
    } catch (const FitError& e) {
      fail_or_retry(e.what());
      continue;
    }
    double t_last = x - fit.le.p;
    if (fit.fit_err > kFitTol || dir * t_last >= 0 || std::abs(t_last) > 2.0 * opt.handoff_radius) {
      fail_or_retry("Laurent fit rejected");
      continue;
    }
    poles.push_back({fit.le.p, fit.le.residue, fit.le.c3, fit.fit_err});
    pending.reset();
    retries = 0;
    cap = 0.2;
    if (opt.max_poles >= 0 && static_cast<int>(poles.size()) > opt.max_poles) {
      tr.truncated = true;
      break;
    }
    double xm = fit.le.p - t_last;
    if (dir * (xm - x_end) >= 0) {
      // the end sits inside the gap: close with a single node from the expansion
      segs.emplace_back();
      if (x_end != fit.le.p) {
        LaurentValue v = laurent_eval(fit.le, x_end, kLaurentFullOrder);
        segs.back().push_back({x_end, v.u, v.du});
      } else {
        segs.pop_back();
        tr.truncated = true;
      }
      break;
    }
    LaurentValue v = laurent_eval(fit.le, xm, kLaurentFullOrder);
    x = xm;
    y = {v.u, v.du};
    k1 = rhs(x, y);
    segs.emplace_back();
    segs.back().push_back({x, y[0], y[1]});
    ctl = {};
  }

  if (dir < 0) {
    for (auto& s : segs) std::reverse(s.begin(), s.end());
    std::reverse(segs.begin(), segs.end());
    std::reverse(poles.begin(), poles.end());
  }
  for (auto& s : segs) tr.segments.push_back({std::move(s)});
  tr.poles = std::move(poles);
  // a pole reached at a stop has no segment on its far side
  if (!tr.poles.empty() && tr.poles.size() >= tr.segments.size()) {
    if (dir > 0) {
      tr.terminal_pole = tr.poles.back();
      tr.poles.pop_back();
    } else {
      tr.terminal_pole = tr.poles.front();
      tr.poles.erase(tr.poles.begin());
    }
  }
  tr.quality = measure_quality(tr);
  return tr;
}

namespace {

double f_at(const Node& a, const Node& b, double alpha, double x) {
  Jet j = hermite7(a, b, alpha, x);
  return 2 * j.u * j.u - 2 * j.du + x;
}

}  // namespace

std::vector<FZero> find_f_zeros(const Trajectory& t) {
  std::vector<FZero> out;
  double a = t.alpha();
  for (const auto& s : t.segments) {
    const auto& n = s.nodes;
    int found = 0;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
      double fa = f_value({n[i].x, n[i].u, n[i].du});
      double fb = f_value({n[i + 1].x, n[i + 1].u, n[i + 1].du});
      double x0 = n[i].x;
      if (fa != 0.0) {
        bool last = i + 2 == n.size();
        if (fb == 0.0 && !last) continue;  // picked up as an exact hit on the next interval
        if (fb != 0.0 && (fa > 0) == (fb > 0)) continue;
        double lo = n[i].x, hi = n[i + 1].x;
        while (hi - lo > 1e-14 * (1.0 + std::abs(lo))) {
          double m = 0.5 * (lo + hi);
          double fm = f_at(n[i], n[i + 1], a, m);
          if (fm == 0.0) {
            lo = hi = m;
            break;
          }
          if ((fm > 0) == (fa > 0))
            lo = m;
          else
            hi = m;
        }
        x0 = 0.5 * (lo + hi);
      }
      Jet j = hermite7(n[i], n[i + 1], a, x0);
      double f = 2 * j.u * j.u - 2 * j.du + x0;
      out.push_back({x0, -2 * j.u * f + 2 * a + 1});
      ++found;
    }
    if (found > 1) throw InconsistencyError("find_f_zeros: more than one zero of f on a smooth segment", found);
  }
  return out;
}

}  // namespace pii
