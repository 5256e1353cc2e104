#ifndef CMAP_ROOTS_HPP
#define CMAP_ROOTS_HPP

#include <algorithm>
#include <cassert>
#include <optional>
#include <vector>

#include "rational.hpp"

namespace cmap {

// Isolation result: lo == hi means the root is exact. sign_change reports the
// parity of the root's multiplicity in the ORIGINAL polynomial (odd -> true),
// which downstream consumers use to tell crossings from touch points.
struct RootInterval {
  Rational lo, hi;
  bool sign_change = true;
  bool exact() const { return lo == hi; }
};

namespace rp {  // dense rational polynomial helpers, coefficients ascending

inline void normalize(std::vector<Rational>& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int degree(const std::vector<Rational>& p) { return (int)p.size() - 1; }

inline Rational eval(const std::vector<Rational>& p, const Rational& x) {
  Rational acc;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline std::vector<Rational> derivative(const std::vector<Rational>& p) {
  std::vector<Rational> d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational((long long)i));
  normalize(d);
  return d;
}

// Quotient of p by q, remainder written back into p. q must be normalized.
inline std::vector<Rational> divmod(std::vector<Rational>& p, const std::vector<Rational>& q) {
  assert(!q.empty());
  std::vector<Rational> quot;
  if (p.size() < q.size()) {
    normalize(p);
    return quot;
  }
  quot.assign(p.size() - q.size() + 1, Rational());
  const Rational& lead = q.back();
  for (size_t j = quot.size(); j-- > 0;) {
    Rational f = p[j + q.size() - 1] / lead;
    quot[j] = f;
    if (!f.is_zero())
      for (size_t i = 0; i < q.size(); ++i) p[j + i] -= f * q[i];
  }
  normalize(p);
  return quot;
}

inline std::vector<Rational> gcd(std::vector<Rational> a, std::vector<Rational> b) {
  normalize(a);
  normalize(b);
  while (!b.empty()) {
    divmod(a, b);          // a becomes remainder
    std::swap(a, b);
    if (!b.empty()) {      // keep coefficients tame
      Rational lead = b.back();
      for (auto& c : b) c /= lead;
    }
  }
  if (!a.empty()) {
    Rational lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;  // monic (or empty when both inputs were zero)
}

inline std::vector<Rational> square_free_part(const std::vector<Rational>& p) {
  std::vector<Rational> d = derivative(p);
  if (d.empty()) return p;  // constant
  std::vector<Rational> g = gcd(p, d);
  if (degree(g) <= 0) return p;
  std::vector<Rational> num = p;
  std::vector<Rational> q = divmod(num, g);
  assert(num.empty() && "square-free division must be exact");
  return q;
}

inline std::vector<Rational> taylor_shift(std::vector<Rational> p, const Rational& c) {
  int n = (int)p.size();
  for (int k = 0; k + 1 < n; ++k)
    for (int i = n - 2; i >= k; --i) p[i] += c * p[i + 1];
  return p;
}

inline int sign_variations(const std::vector<Rational>& p) {
  int vars = 0, last = 0;
  for (const auto& c : p) {
    int s = c.sign();
    if (s == 0) continue;
    if (last != 0 && s != last) ++vars;
    last = s;
  }
  return vars;
}

// Descartes bound on the number of roots of p in the OPEN interval (a, b).
inline int variations_in(const std::vector<Rational>& p, const Rational& a, const Rational& b) {
  // q(t) = p(a + (b-a) t) maps (0,1); then reverse + shift by 1 maps (0,1) to (0,inf).
  std::vector<Rational> q = taylor_shift(p, a);
  Rational w = b - a, wp = 1;
  for (size_t i = 1; i < q.size(); ++i) {
    wp *= w;
    q[i] *= wp;
  }
  std::reverse(q.begin(), q.end());
  q = taylor_shift(std::move(q), Rational(1));
  return sign_variations(q);
}

inline Rational cauchy_bound(const std::vector<Rational>& p) {
  assert(p.size() >= 2);
  Rational m;
  for (size_t i = 0; i + 1 < p.size(); ++i) m = max(m, p[i].abs());
  return Rational(1) + m / p.back().abs();
}

}  // namespace rp

namespace detail {

inline void isolate_rec(const std::vector<Rational>& ps, const Rational& a, const Rational& b,
                        std::vector<RootInterval>& out, int depth) {
  assert(depth < 4000 && "root isolation failed to converge");
  int v = rp::variations_in(ps, a, b);
  if (v == 0) return;
  if (v == 1 && !rp::eval(ps, a).is_zero() && !rp::eval(ps, b).is_zero()) {
    out.push_back({a, b, true});
    return;
  }
  Rational m = (a + b) / Rational(2);
  if (rp::eval(ps, m).is_zero()) out.push_back({m, m, true});
  isolate_rec(ps, a, m, out, depth + 1);
  isolate_rec(ps, m, b, out, depth + 1);
}

// Multiplicity of exact root r in p, by repeated synthetic division.
inline int multiplicity_at(std::vector<Rational> p, const Rational& r) {
  int mult = 0;
  while (!p.empty() && rp::eval(p, r).is_zero()) {
    std::vector<Rational> lin{-r, Rational(1)};
    std::vector<Rational> q = rp::divmod(p, lin);
    assert(p.empty());
    p = std::move(q);
    ++mult;
  }
  return mult;
}

}  // namespace detail

// Isolating intervals for all real roots of p inside the closed window
// [wlo, whi] (either side may be absent = unbounded). Intervals are sorted,
// pairwise disjoint, and each contains exactly one distinct real root.
inline std::vector<RootInterval> isolate_real_roots(std::vector<Rational> p,
                                                    const std::optional<Rational>& wlo = std::nullopt,
                                                    const std::optional<Rational>& whi = std::nullopt) {
  rp::normalize(p);
  if (rp::degree(p) <= 0) return {};  // zero or constant: no isolated roots
  std::vector<Rational> ps = rp::square_free_part(p);

  if (rp::degree(ps) == 1) {  // single distinct root, solved exactly
    Rational r = -ps[0] / ps[1];
    if ((!wlo || *wlo <= r) && (!whi || r <= *whi))
      return {{r, r, detail::multiplicity_at(p, r) % 2 == 1}};
    return {};
  }

  Rational bound = rp::cauchy_bound(ps);
  Rational lo = wlo ? max(*wlo, -bound) : -bound;
  Rational hi = whi ? min(*whi, bound) : bound;

  std::vector<RootInterval> out;
  auto push_exact = [&](const Rational& r) {
    out.push_back({r, r, detail::multiplicity_at(p, r) % 2 == 1});
  };

  if (lo > hi) {
    // Window lies entirely outside the root bound; only window endpoints can
    // still be roots when the window is nonempty.
    if (wlo && whi && *wlo <= *whi) {
      if (rp::eval(ps, *wlo).is_zero()) push_exact(*wlo);
      if (*whi != *wlo && rp::eval(ps, *whi).is_zero()) push_exact(*whi);
    }
    return out;
  }
  if (rp::eval(ps, lo).is_zero()) push_exact(lo);
  if (hi != lo && rp::eval(ps, hi).is_zero()) push_exact(hi);
  if (lo < hi) {
    std::vector<RootInterval> open;
    detail::isolate_rec(ps, lo, hi, open, 0);
    for (auto& iv : open) {
      if (iv.exact()) {
        iv.sign_change = detail::multiplicity_at(p, iv.lo) % 2 == 1;
      } else {
        int sa = rp::eval(p, iv.lo).sign();
        int sb = rp::eval(p, iv.hi).sign();
        assert(sa != 0 && sb != 0);
        iv.sign_change = sa != sb;
      }
      out.push_back(iv);
    }
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& x, const RootInterval& y) { return x.lo < y.lo; });
  return out;
}

// Shrink an isolating interval to width <= tol and return a nearby dyadic
// point (exact roots come back exact; linear polynomials solve exactly).
inline Rational refine_root(const std::vector<Rational>& poly, const RootInterval& iv, const Rational& tol) {
  if (iv.exact()) return iv.lo;
  std::vector<Rational> p = poly;
  rp::normalize(p);
  if (rp::degree(p) == 1) return -p[0] / p[1];
  std::vector<Rational> ps = rp::square_free_part(p);

  Rational a = iv.lo, b = iv.hi;
  if (rp::eval(ps, a).is_zero()) return a;
  if (rp::eval(ps, b).is_zero()) return b;
  int sa = rp::eval(ps, a).sign();
  Rational half_tol = tol / Rational(2);
  while (b - a > half_tol) {
    Rational m = (a + b) / Rational(2);
    Rational vm = rp::eval(ps, m);
    if (vm.is_zero()) return m;
    if (vm.sign() == sa)
      a = m;
    else
      b = m;
  }
  // Snap the midpoint to a 2^-k grid with 2^-k <= tol/2; total error <= tol.
  // Clamp back into the bracket so the point never escapes the caller's window.
  unsigned k = 1;
  Rational grid(1, 2);
  while (grid > half_tol && k < 128) {
    grid /= Rational(2);
    ++k;
  }
  Rational r = ((a + b) / Rational(2)).round_dyadic(k);
  if (r < a) r = a;
  if (r > b) r = b;
  return r;
}

}  // namespace cmap

#endif  // CMAP_ROOTS_HPP
