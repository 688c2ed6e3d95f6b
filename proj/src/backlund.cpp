#include "pii/backlund.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pii/errors.hpp"

namespace pii {

State backlund_state(const State& s, double alpha) {
  double f = f_value(s);
  if (std::abs(f) < 1e-12 * std::max(1.0, std::abs(s.x)))
    throw DomainError("backlund_state: f vanishes here; the image has a pole");
  double c = 2 * alpha + 1;
  return {s.x, -s.u + c / f, -s.du - c * (-2 * s.u * f + c) / (f * f)};
}

std::vector<PoleMapRecord> map_pole_records(const std::vector<Pole>& poles) {
  for (std::size_t i = 1; i < poles.size(); ++i)
    if (!(poles[i - 1].x < poles[i].x)) throw ParameterError("map_poles: poles must be sorted ascending");
  std::vector<PoleMapRecord> out;
  for (const auto& p : poles) {
    PoleMapRecord r{p, std::nullopt};
    if (p.residue == 1) r.image = Pole{p.x, -1, 0.0, 0.0};
    out.push_back(r);
  }
  return out;
}

std::vector<Pole> map_poles(const std::vector<Pole>& poles) {
  std::vector<Pole> out;
  for (const auto& r : map_pole_records(poles))
    if (r.image) out.push_back(*r.image);
  return out;
}

namespace {

Node image_node(const State& s, double alpha) {
  State b = backlund_state(s, alpha);
  return {b.x, b.u, b.du};
}

// Source state off the nodes. Hermite derivatives lose about a factor 1/h against the values and the map
// amplifies u' errors by (2 alpha + 1)/f^2, so the state is integrated from the nearest node instead.
State source_state(const Trajectory& t, double x, const IntegratorOptions& fill) {
  for (const auto& s : t.segments) {
    if (x < s.lo() || x > s.hi()) continue;
    auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), x, [](const Node& n, double v) { return n.x < v; });
    if (it != s.nodes.end() && it->x == x) return {it->x, it->u, it->du};
    const Node& n = (it == s.nodes.end() || (it != s.nodes.begin() && x - (it - 1)->x < it->x - x)) ? *(it - 1) : *it;
    IntegratorOptions o = fill;
    o.max_poles = 0;
    try {
      Trajectory r = integrate_line({n.x, n.u, n.du}, t.alpha(), x, o);
      if (r.poles.empty() && !r.terminal_pole && !r.truncated) return r.eval(x);
    } catch (const NumericalError&) {
    }
    break;
  }
  return t.eval(x);
}

PiiParams image_params(const PiiParams& p) {
  PiiParams q = p;
  q.alpha = p.alpha + 1;
  q.airy_coeff = -p.airy_coeff;
  q.sigma = 0;
  switch (p.family) {
    case Family::AS: q.family = Family::qAS; break;
    case Family::pHM:
    case Family::sHM: q.family = Family::qHM; break;
    default: break;
  }
  return q;
}

Pole fit_image_pole(const Node& a, const Node& b, double alpha, double expect_x, int expect_res) {
  LaurentFit f = laurent_fit({a.x, a.u, a.du}, {b.x, b.u, b.du}, alpha);
  if (f.le.residue != expect_res || std::abs(f.le.p - expect_x) > 1e-6) {
    std::ostringstream m;
    m << "backlund_trajectory: image pole fit disagrees near x = " << expect_x << " (fitted " << f.le.p << ", residue "
      << f.le.residue << ")";
    throw InconsistencyError(m.str(), std::abs(f.le.p - expect_x));
  }
  return {f.le.p, f.le.residue, f.le.c3, f.fit_err};
}

}  // namespace

Trajectory backlund_trajectory(const Trajectory& t, const BacklundOptions& opt) {
  if (t.empty()) throw ParameterError("backlund_trajectory: empty trajectory");
  const double a = t.alpha();
  const double a1 = a + 1;
  auto zeros = find_f_zeros(t);

  Trajectory out;
  out.params = image_params(t.params);
  out.truncated = t.truncated;
  // Image pieces are emitted left to right; each pole closes the current segment.
  std::vector<Node> cur;
  auto close_with_pole = [&](const Pole& p) {
    out.segments.push_back({std::move(cur)});
    out.poles.push_back(p);
    cur.clear();
  };

  for (std::size_t si = 0; si < t.segments.size(); ++si) {
    const auto& nodes = t.segments[si].nodes;
    // source pole to the left of this segment
    if (si > 0) {
      const Pole& sp = t.poles[si - 1];
      if (sp.residue == 1) {
        if (cur.size() < 2) throw NumericalError("backlund_trajectory: too few nodes before a pole");
        Pole ip = fit_image_pole(cur[cur.size() - 2], cur.back(), a1, sp.x, -1);
        ip.x = sp.x;
        close_with_pole(ip);
      } else {
        // regular point of the image: integrate across the gap at alpha + 1
        const Node& l = cur.back();
        State right = backlund_state({nodes.front().x, nodes.front().u, nodes.front().du}, a);
        Trajectory bridge = integrate_line({l.x, l.u, l.du}, a1, right.x, opt.fill);
        if (!bridge.poles.empty() || bridge.terminal_pole)
          throw InconsistencyError("backlund_trajectory: bridge across a regularized point met a pole", sp.x);
        const auto& bn = bridge.segments.front().nodes;
        double mis = std::abs(bn.back().u - right.u) / std::max(1.0, std::abs(right.u));
        if (mis > 1e-6) {
          std::ostringstream m;
          m << "backlund_trajectory: bridge mismatch " << mis << " at regularized point " << sp.x;
          throw InconsistencyError(m.str(), mis);
        }
        for (std::size_t k = 1; k + 1 < bn.size(); ++k) cur.push_back(bn[k]);
      }
    }
    // zero of f inside this segment, if any
    const FZero* z = nullptr;
    for (const auto& fz : zeros)
      if (fz.x0 >= nodes.front().x && fz.x0 <= nodes.back().x) z = &fz;
    if (!z) {
      for (const auto& n : nodes) cur.push_back(image_node({n.x, n.u, n.du}, a));
      continue;
    }
    double x0 = z->x0;
    double lo = nodes.front().x, hi = nodes.back().x;
    if (x0 - lo < opt.inner_radius * 1.5 || hi - x0 < opt.inner_radius * 1.5)
      throw NumericalError("backlund_trajectory: zero of f too close to the end of a smooth piece");
    // Geometric nodes out to zero_radius, merged with the source nodes outside the inner radius.
    auto side = [&](int dir) {
      double room = dir < 0 ? x0 - lo : hi - x0;
      std::vector<double> xs;
      for (double r = std::min(opt.zero_radius, room); r > opt.inner_radius; r *= opt.ratio) xs.push_back(x0 + dir * r);
      xs.push_back(x0 + dir * opt.inner_radius);
      for (const auto& n : nodes)
        if (dir * (n.x - x0) > opt.inner_radius) xs.push_back(n.x);
      std::sort(xs.begin(), xs.end());
      std::vector<Node> res;
      double last = -INFINITY;
      for (double x : xs) {
        if (x - last < 1e-4 * std::max(1.0, std::abs(x - x0))) continue;
        last = x;
        auto it = std::lower_bound(nodes.begin(), nodes.end(), x, [](const Node& n, double v) { return n.x < v; });
        if (it != nodes.end() && it->x == x)
          res.push_back(image_node({it->x, it->u, it->du}, a));
        else
          res.push_back(image_node(source_state(t, x, opt.fill), a));
      }
      return res;
    };
    for (const auto& n : side(-1)) cur.push_back(n);
    Pole np = fit_image_pole(cur[cur.size() - 2], cur.back(), a1, x0, 1);
    close_with_pole(np);
    cur = side(+1);
  }
  out.segments.push_back({std::move(cur)});

  // Image poles that the source does not have need denser nodes than the source supplied.
  auto image_pole_dist = [&](double x) {
    double d = INFINITY;
    for (const auto& p : out.poles) d = std::min(d, std::abs(p.x - x));
    return d;
  };
  for (auto& seg : out.segments) {
    std::vector<Node> fine;
    for (std::size_t i = 0; i < seg.nodes.size(); ++i) {
      if (i > 0) {
        double x0 = seg.nodes[i - 1].x, x1 = seg.nodes[i].x;
        double h = x1 - x0;
        double lim = opt.spacing * image_pole_dist(0.5 * (x0 + x1));
        if (h > lim && t.pole_distance(0.5 * (x0 + x1)) > 0.15) {
          int k = static_cast<int>(std::ceil(h / lim));
          for (int j = 1; j < k; ++j) fine.push_back(image_node(source_state(t, x0 + h * j / k, opt.fill), a));
        }
      }
      fine.push_back(seg.nodes[i]);
    }
    seg.nodes = std::move(fine);
  }
  out.quality = measure_quality(out);
  return out;
}

Trajectory negate_alpha(const Trajectory& t) {
  Trajectory r = t;
  r.params.alpha = -t.params.alpha;
  r.params.airy_coeff = -t.params.airy_coeff;
  r.params.sigma = -t.params.sigma;
  for (auto& s : r.segments)
    for (auto& n : s.nodes) {
      n.u = -n.u;
      n.du = -n.du;
    }
  for (auto& p : r.poles) {
    p.residue = -p.residue;
    p.c3 = -p.c3;
  }
  if (r.terminal_pole) {
    r.terminal_pole->residue = -r.terminal_pole->residue;
    r.terminal_pole->c3 = -r.terminal_pole->c3;
  }
  return r;
}

}  // namespace pii
