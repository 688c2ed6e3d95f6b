#include "pii/rational.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <mutex>

#include "pii/errors.hpp"

namespace pii {

namespace {

using Poly = std::vector<BigInt>;
using Real = boost::multiprecision::cpp_bin_float_50;

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

Poly deriv(const Poly& a) {
  if (a.size() <= 1) return {0};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<int>(i);
  return r;
}

Poly sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  trim(r);
  return r;
}

// Exact division; throws if the remainder is not zero.
Poly divide_exact(Poly a, const Poly& b) {
  int da = static_cast<int>(a.size()) - 1, db = static_cast<int>(b.size()) - 1;
  if (da < db) throw NumericalError("yv_polys: degree underflow in exact division");
  Poly q(da - db + 1, 0);
  for (int k = da - db; k >= 0; --k) {
    const BigInt& top = a[k + db];
    if (top % b.back() != 0) throw NumericalError("yv_polys: non-integral quotient");
    q[k] = top / b.back();
    for (int j = 0; j <= db; ++j) a[k + j] -= q[k] * b[j];
  }
  for (const auto& c : a)
    if (c != 0) throw NumericalError("yv_polys: recurrence left a nonzero remainder");
  return q;
}

}  // namespace

std::vector<YvPolynomial> yv_polys(int n_max) {
  if (n_max < 0 || n_max > 8) throw DomainError("yv_polys: n_max must be in [0, 8]");
  std::vector<Poly> q{{1}, {0, 1}};
  for (int n = 1; n < n_max; ++n) {
    const Poly& Q = q[n];
    Poly d1 = deriv(Q), d2 = deriv(d1);
    Poly xq2 = mul({0, 1}, mul(Q, Q));
    Poly inner = sub(mul(Q, d2), mul(d1, d1));
    for (auto& c : inner) c *= 4;
    q.push_back(divide_exact(sub(xq2, inner), q[n - 1]));
  }
  std::vector<YvPolynomial> out;
  for (int n = 0; n <= n_max; ++n) out.push_back({q[n]});
  return out;
}

namespace {

int sign(const BigInt& v) { return v.sign(); }

// sign of p(m / 2^e)
int sign_at(const Poly& p, const BigInt& m, unsigned e) {
  int d = static_cast<int>(p.size()) - 1;
  BigInt acc = 0, mp = 1;
  for (int i = 0; i <= d; ++i) {
    acc += p[i] * mp * (BigInt(1) << (e * static_cast<unsigned>(d - i)));
    mp *= m;
  }
  return sign(acc);
}

BigInt content(const Poly& p) {
  BigInt g = 0;
  for (const auto& c : p) g = boost::multiprecision::gcd(g, c);
  return g == 0 ? BigInt(1) : abs(g);
}

// Sturm chain with primitive pseudo-remainders, signs corrected to match true remainders.
std::vector<Poly> sturm_chain(const Poly& p) {
  std::vector<Poly> ch{p, deriv(p)};
  while (ch.back().size() > 1) {
    const Poly& a = ch[ch.size() - 2];
    const Poly& b = ch.back();
    int da = static_cast<int>(a.size()) - 1, db = static_cast<int>(b.size()) - 1;
    Poly r = a;
    const BigInt& lb = b.back();
    for (int k = da - db; k >= 0; --k) {
      BigInt top = r[k + db];
      for (auto& c : r) c *= lb;
      for (int j = 0; j <= db; ++j) r[k + j] -= top * b[j];
    }
    r.resize(db > 0 ? db : 1);
    trim(r);
    // r = lb^(da-db+1) a mod b; flip if that power is negative
    bool flip = lb < 0 && ((da - db + 1) % 2 == 1);
    BigInt g = content(r);
    for (auto& c : r) c = (flip ? c : -c) / g;
    if (r.size() == 1 && r[0] == 0) break;
    ch.push_back(std::move(r));
  }
  return ch;
}

int variations(const std::vector<Poly>& ch, const BigInt& m, unsigned e) {
  int v = 0, prev = 0;
  for (const auto& p : ch) {
    int s = sign_at(p, m, e);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

}  // namespace

std::vector<double> real_roots(const YvPolynomial& yp, double tol) {
  Poly p = yp.coeffs;
  trim(p);
  if (p.size() <= 1) return {};
  auto ch = sturm_chain(p);
  // Cauchy bound
  BigInt mx = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) mx = std::max(mx, BigInt(abs(p[i])));
  BigInt B = mx / abs(p.back()) + 2;
  struct Iv {
    BigInt a, b;
    unsigned e;
  };
  std::vector<Iv> work{{-B, B, 0}};
  std::vector<double> roots;
  auto to_double = [](const BigInt& m, unsigned e) { return std::ldexp(static_cast<double>(m), -static_cast<int>(e)); };
  while (!work.empty()) {
    Iv iv = work.back();
    work.pop_back();
    int cnt = variations(ch, iv.a, iv.e) - variations(ch, iv.b, iv.e);
    if (cnt == 0) continue;
    if (cnt > 1) {
      Iv l{iv.a * 2, iv.a + iv.b, iv.e + 1}, r{iv.a + iv.b, iv.b * 2, iv.e + 1};
      // keep split points off the roots so left endpoints stay non-roots
      if (sign_at(p, l.b, l.e) == 0) {
        l = {l.a * 2, l.b * 2 + 1, l.e + 1};
        r = {r.a * 2 + 1, r.b * 2, r.e + 1};
      }
      work.push_back(r);
      work.push_back(l);
      continue;
    }
    while (to_double(iv.b - iv.a, iv.e) > tol / 4) {
      BigInt mid = iv.a + iv.b;
      unsigned e = iv.e + 1;
      if (variations(ch, iv.a * 2, e) - variations(ch, mid, e) == 1)
        iv = {iv.a * 2, mid, e};
      else
        iv = {mid, iv.b * 2, e};
    }
    roots.push_back(0.5 * (to_double(iv.a, iv.e) + to_double(iv.b, iv.e)));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

struct Table {
  std::vector<YvPolynomial> q;
  std::vector<std::vector<double>> roots;
};

const Table& table() {
  static const Table t = [] {
    Table t;
    t.q = yv_polys(8);
    for (const auto& p : t.q) t.roots.push_back(real_roots(p));
    return t;
  }();
  return t;
}

// p, p', p'' at x in 50-digit arithmetic
void eval3(const Poly& p, const Real& x, Real& v, Real& d, Real& d2) {
  v = 0;
  d = 0;
  d2 = 0;
  for (std::size_t i = p.size(); i-- > 0;) {
    d2 = d2 * x + 2 * d;
    d = d * x + v;
    v = v * x + Real(p[i]);
  }
}

}  // namespace

State rational_u(int n, double x) {
  if (n < 1 || n > 8) throw DomainError("rational_u: n must be in [1, 8]");
  if (!std::isfinite(x)) throw DomainError("rational_u: x must be finite");
  const Table& t = table();
  for (int k : {n, n - 1})
    for (double r : t.roots[k])
      if (std::abs(x - r) < 1e-9) throw DomainError("rational_u: x within 1e-9 of a pole");
  Real X = x, a, da, d2a, b, db, d2b;
  eval3(t.q[n].coeffs, X, a, da, d2a);
  eval3(t.q[n - 1].coeffs, X, b, db, d2b);
  Real u = da / a - db / b;
  Real du = (d2a * a - da * da) / (a * a) - (d2b * b - db * db) / (b * b);
  return {x, static_cast<double>(u), static_cast<double>(du)};
}

std::vector<Pole> rational_poles(int n) {
  if (n < 1 || n > 8) throw DomainError("rational_poles: n must be in [1, 8]");
  const Table& t = table();
  std::vector<Pole> out;
  for (double r : t.roots[n]) out.push_back({r, 1, 0.0, 0.0});
  for (double r : t.roots[n - 1]) out.push_back({r, -1, 0.0, 0.0});
  std::sort(out.begin(), out.end(), [](const Pole& a, const Pole& b) { return a.x < b.x; });
  // c3 from the exact function through the full Laurent series
  for (auto& p : out) {
    LaurentFit f = laurent_fit(rational_u(n, p.x - 0.08), rational_u(n, p.x - 0.06), n);
    p.c3 = f.le.c3;
    p.fit_err = f.fit_err;
  }
  return out;
}

}  // namespace pii
