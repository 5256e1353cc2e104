#ifndef CMAP_BOUNDS_HPP
#define CMAP_BOUNDS_HPP

#include <map>
#include <utility>

#include "density.hpp"
#include "poly.hpp"

namespace cmap {

namespace bounddetail {

using Interval = std::pair<Rational, Rational>;

inline Interval iv_mul(const Interval& a, const Interval& b) {
  Rational p1 = a.first * b.first, p2 = a.first * b.second;
  Rational p3 = a.second * b.first, p4 = a.second * b.second;
  Rational lo = p1, hi = p1;
  for (const Rational& p : {p2, p3, p4}) {
    if (p < lo) lo = p;
    if (hi < p) hi = p;
  }
  return {lo, hi};
}

inline Interval iv_pow(const Interval& a, int n) {
  if (n == 0) return {Rational(1), Rational(1)};
  Rational lo_n(1), hi_n(1);
  for (int k = 0; k < n; ++k) {
    lo_n = lo_n * a.first;
    hi_n = hi_n * a.second;
  }
  if (n % 2 == 1) return {lo_n, hi_n};
  Rational big = lo_n < hi_n ? hi_n : lo_n;
  bool straddles = a.first <= Rational(0) && Rational(0) <= a.second;
  Rational small = straddles ? Rational(0) : (lo_n < hi_n ? lo_n : hi_n);
  return {small, big};
}

// interval range of a multivariate polynomial over an axis-aligned box
inline Interval multipoly_range(const MultiPoly<Rational>& p,
                                const std::map<int, std::pair<Rational, Rational>>& box) {
  Interval acc{Rational(0), Rational(0)};
  for (const auto& t : p.terms) {
    Interval term{t.coeff, t.coeff};
    for (const auto& [v, pw] : t.vp) {
      const auto& b = box.at(v);
      term = iv_mul(term, iv_pow({b.first, b.second}, pw));
    }
    acc = {acc.first + term.first, acc.second + term.second};
  }
  return acc;
}

}  // namespace bounddetail

// Exact upper bound on one factor piece over a box, in score space. Poly
// pieces bound |body| per variable through the stationary points, so the
// product dominates the factor's supremum; ExpPoly pieces bound the exponent
// directly. Non-separable bodies fall back to interval arithmetic.
inline Rational piece_upper_bound(const DensityPiece& p, FuncKind kind,
                                  const std::map<int, std::pair<Rational, Rational>>& box) {
  if (p.joint) {
    assert(kind == FuncKind::Poly);
    return bounddetail::multipoly_range(*p.joint, box).second;
  }
  Rational acc = kind == FuncKind::ExpPoly ? Rational(0) : Rational(1);
  for (const auto& [v, q] : p.bodies) {
    const auto& b = box.at(v);
    auto [mn, mx] = poly_range_on(q, b.first, b.second);
    if (kind == FuncKind::ExpPoly) {
      acc = acc + mx;
    } else {
      Rational m = mn.abs() < mx.abs() ? mx.abs() : mn.abs();
      acc = acc * m;
    }
  }
  return acc;
}

// Bound for a full piece selection: factor bounds multiply for Poly and add
// for ExpPoly, matching the score space used everywhere else.
inline Rational selection_upper_bound(const DensityModel& D, const PieceSelection& sel,
                                      const std::map<int, std::pair<Rational, Rational>>& box) {
  Rational acc = D.kind == FuncKind::ExpPoly ? Rational(0) : Rational(1);
  for (size_t f = 0; f < D.factors.size(); ++f) {
    if (sel.piece[f] < 0) continue;
    Rational b = piece_upper_bound(D.factors[f].pieces[sel.piece[f]], D.kind, box);
    acc = D.kind == FuncKind::ExpPoly ? acc + b : acc * b;
  }
  return acc;
}

}  // namespace cmap

#endif  // CMAP_BOUNDS_HPP
