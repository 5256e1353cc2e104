#ifndef CMAP_POLY_HPP
#define CMAP_POLY_HPP

#include <cassert>
#include <optional>
#include <utility>
#include <vector>

#include "roots.hpp"
#include "scalar.hpp"

namespace cmap {

inline const Rational kEpsRoot{1, 10000000000LL};  // materialization tolerance 1e-10

// Dense univariate polynomial, coefficients ascending, trailing zeros
// stripped. var < 0 marks a constant usable against any variable.
template <class S>
struct UniPoly {
  int var = -1;
  std::vector<S> c;

  UniPoly() = default;
  UniPoly(int v, std::vector<S> coeffs) : var(v), c(std::move(coeffs)) { normalize(); }
  static UniPoly constant(const S& k) {
    UniPoly p;
    p.c.push_back(k);
    p.normalize();
    return p;
  }

  void normalize() {
    while (!c.empty() && scalar_traits<S>::is_zero(c.back())) c.pop_back();
    if (degree() <= 0) var = -1;
  }
  int degree() const { return (int)c.size() - 1; }  // -1 for the zero polynomial
  bool is_zero() const { return c.empty(); }
  bool is_const() const { return c.size() <= 1; }
  S const_value() const { return c.empty() ? S{} : c[0]; }

  S eval(const S& x) const {
    S acc{};
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  }

  friend bool operator==(const UniPoly& a, const UniPoly& b) {
    if (a.c.size() != b.c.size()) return false;
    for (size_t i = 0; i < a.c.size(); ++i)
      if (!scalar_traits<S>::eq(a.c[i], b.c[i])) return false;
    return true;
  }
};

namespace pdetail {
inline int join_var(int a, int b) {
  if (a < 0) return b;
  if (b < 0) return a;
  assert(a == b && "polynomial ops require a shared variable");
  return a;
}
}  // namespace pdetail

template <class S>
UniPoly<S> poly_add(const UniPoly<S>& a, const UniPoly<S>& b) {
  UniPoly<S> r;
  r.var = pdetail::join_var(a.var, b.var);
  r.c.resize(std::max(a.c.size(), b.c.size()), S{});
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] + b.c[i];
  r.normalize();
  return r;
}

template <class S>
UniPoly<S> poly_neg(const UniPoly<S>& a) {
  UniPoly<S> r = a;
  for (auto& x : r.c) x = S{} - x;
  return r;
}

template <class S>
UniPoly<S> poly_sub(const UniPoly<S>& a, const UniPoly<S>& b) {
  return poly_add(a, poly_neg(b));
}

template <class S>
UniPoly<S> poly_mul(const UniPoly<S>& a, const UniPoly<S>& b) {
  UniPoly<S> r;
  r.var = pdetail::join_var(a.var, b.var);
  if (a.is_zero() || b.is_zero()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, S{});
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
  r.normalize();
  return r;
}

template <class S>
UniPoly<S> poly_scale(const UniPoly<S>& a, const S& k) {
  UniPoly<S> r = a;
  for (auto& x : r.c) x = x * k;
  r.normalize();
  return r;
}

template <class S>
UniPoly<S> poly_derivative(const UniPoly<S>& a) {
  UniPoly<S> r;
  r.var = a.var;
  for (size_t i = 1; i < a.c.size(); ++i) r.c.push_back(a.c[i] * S((long long)i));
  r.normalize();
  return r;
}

// antiderivative with zero constant term
template <class S>
UniPoly<S> poly_integrate(const UniPoly<S>& a) {
  UniPoly<S> r;
  r.var = a.var;
  r.c.push_back(S{});
  for (size_t i = 0; i < a.c.size(); ++i)
    r.c.push_back(a.c[i] / S((long long)(i + 1)));
  r.normalize();
  return r;
}

// Affine map y -> slope*y + off, used for symbolic bounds and argmax records.
template <class S>
struct AffineFunc {
  int var = -1;  // input variable
  S slope{}, off{};

  AffineFunc() = default;
  AffineFunc(int v, const S& a, const S& b) : var(v), slope(a), off(b) {}
  static AffineFunc constant(const S& b) { return AffineFunc(-1, S{}, b); }

  bool is_const() const { return scalar_traits<S>::is_zero(slope); }
  S eval(const S& y) const { return slope * y + off; }

  // Value at an extended point; infinite inputs require a non-constant map
  // to produce an infinite output.
  Ext<S> eval_ext(const Ext<S>& y) const {
    if (y.finite()) return Ext<S>(eval(y.v));
    if (is_const()) return Ext<S>(off);
    int s = scalar_traits<S>::cmp(slope, S{});
    bool pos = (y.kind == Ext<S>::PosInf) == (s > 0);
    return pos ? Ext<S>::pos_inf() : Ext<S>::neg_inf();
  }

  AffineFunc compose(const AffineFunc& inner) const {
    // this(inner(y)) = slope*inner.slope*y + slope*inner.off + off
    AffineFunc r;
    r.var = inner.var;
    r.slope = slope * inner.slope;
    r.off = slope * inner.off + off;
    return r;
  }

  UniPoly<S> as_poly() const {
    UniPoly<S> p;
    p.var = var;
    p.c = {off, slope};
    p.normalize();
    return p;
  }
};

// p(slope*y + off), expressed over the map's input variable.
template <class S>
UniPoly<S> poly_compose_affine(const UniPoly<S>& p, const AffineFunc<S>& f) {
  UniPoly<S> acc;
  acc.var = f.var;
  UniPoly<S> lin = f.as_poly();
  for (size_t i = p.c.size(); i-- > 0;) {
    acc = poly_mul(acc, lin);
    if (!scalar_traits<S>::is_zero(p.c[i])) acc = poly_add(acc, UniPoly<S>::constant(p.c[i]));
  }
  acc.var = f.var;
  return acc;
}

// Distinct real roots inside the closed extended window, sorted ascending.
// Irrational roots materialize as nearby dyadic rationals (within eps_root);
// exact hits stay exact.
template <class S>
std::vector<S> poly_roots_in(const UniPoly<S>& p, const Ext<S>& wlo, const Ext<S>& whi,
                             const Rational& tol = kEpsRoot) {
  std::vector<S> out;
  if (p.is_zero() || p.is_const()) return out;
  std::vector<Rational> rc;
  rc.reserve(p.c.size());
  for (const auto& x : p.c) rc.push_back(scalar_traits<S>::to_rat(x));
  std::optional<Rational> lo, hi;
  if (wlo.finite()) lo = scalar_traits<S>::to_rat(wlo.v);
  if (whi.finite()) hi = scalar_traits<S>::to_rat(whi.v);
  auto ivs = isolate_real_roots(rc, lo, hi);
  Rational prev;
  bool have_prev = false;
  for (const auto& iv : ivs) {
    Rational r = refine_root(rc, iv, tol);
    if (have_prev && r == prev) continue;  // clustered roots may collapse after snapping
    prev = r;
    have_prev = true;
    out.push_back(scalar_traits<S>::from_rat(r));
  }
  return out;
}

template <class S>
std::vector<S> poly_roots_in(const UniPoly<S>& p, const S& wlo, const S& whi,
                             const Rational& tol = kEpsRoot) {
  return poly_roots_in(p, Ext<S>(wlo), Ext<S>(whi), tol);
}

// Range of p over the closed interval [lo, hi]: endpoint values plus values at
// the stationary points. Exact up to root materialization.
template <class S>
std::pair<S, S> poly_range_on(const UniPoly<S>& p, const S& lo, const S& hi) {
  assert(scalar_traits<S>::cmp(lo, hi) <= 0 && "range interval is reversed");
  S mn = p.eval(lo), mx = mn;
  auto take = [&](const S& v) {
    if (scalar_traits<S>::cmp(v, mn) < 0) mn = v;
    if (scalar_traits<S>::cmp(mx, v) < 0) mx = v;
  };
  take(p.eval(hi));
  for (const S& r : poly_roots_in(poly_derivative(p), lo, hi)) take(p.eval(r));
  return {mn, mx};
}

}  // namespace cmap

#endif  // CMAP_POLY_HPP
