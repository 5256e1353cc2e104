#ifndef CMAP_ATOMS_HPP
#define CMAP_ATOMS_HPP

#include <cassert>
#include <map>
#include <stdexcept>
#include <vector>

#include "poly.hpp"

namespace cmap {

// Linear constraint sum_i coeffs[i].second * x_{coeffs[i].first} (op) rhs.
// Atoms are kept in a canonical integer-scaled form so equal constraints
// compare equal.
struct LinearAtom {
  enum Op { Le, Lt, Eq };

  std::vector<std::pair<int, Rational>> coeffs;  // sorted by var, no zeros
  Rational rhs;
  Op op = Le;

  LinearAtom() = default;
  LinearAtom(std::vector<std::pair<int, Rational>> cs, const Rational& b, Op o)
      : coeffs(std::move(cs)), rhs(b), op(o) {
    normalize();
  }

  void normalize() {
    std::sort(coeffs.begin(), coeffs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, Rational>> merged;
    for (const auto& [v, c] : coeffs) {
      if (!merged.empty() && merged.back().first == v)
        merged.back().second = merged.back().second + c;
      else
        merged.push_back({v, c});
    }
    coeffs.clear();
    for (auto& [v, c] : merged)
      if (!(c == Rational(0))) coeffs.push_back({v, c});
    // scale to coprime integers, sign preserved
    mpz_class l(1);
    auto fold_den = [&](const Rational& r) {
      mpz_class d = r.den();
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    };
    for (const auto& [v, c] : coeffs) fold_den(c);
    fold_den(rhs);
    Rational scale{l};
    mpz_class g(0);
    auto fold_num = [&](const Rational& r) {
      mpz_class n = (r * scale).num();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    };
    for (const auto& [v, c] : coeffs) fold_num(c);
    fold_num(rhs);
    if (g != 0) scale = scale / Rational{g};
    for (auto& [v, c] : coeffs) c = c * scale;
    rhs = rhs * scale;
  }

  Rational coef(int var) const {
    for (const auto& [v, c] : coeffs)
      if (v == var) return c;
    return Rational(0);
  }

  std::vector<int> vars() const {
    std::vector<int> out;
    for (const auto& [v, c] : coeffs) out.push_back(v);
    return out;
  }

  Rational lhs_at(const std::map<int, Rational>& x) const {
    Rational s(0);
    for (const auto& [v, c] : coeffs) {
      auto it = x.find(v);
      assert(it != x.end() && "assignment misses an atom variable");
      s = s + c * it->second;
    }
    return s;
  }

  bool holds_at(const std::map<int, Rational>& x) const {
    Rational s = lhs_at(x);
    switch (op) {
      case Le: return s <= rhs;
      case Lt: return s < rhs;
      case Eq: return s == rhs;
    }
    return false;
  }

  // complement; equalities have no single-atom complement
  LinearAtom negated() const {
    if (op == Eq) throw std::logic_error("negated equality is not a linear atom");
    LinearAtom r;
    for (const auto& [v, c] : coeffs) r.coeffs.push_back({v, Rational(0) - c});
    r.rhs = Rational(0) - rhs;
    r.op = op == Le ? Lt : Le;
    r.normalize();
    return r;
  }

  bool operator==(const LinearAtom& o) const {
    return op == o.op && rhs == o.rhs && coeffs == o.coeffs;
  }
  bool operator<(const LinearAtom& o) const {
    if (coeffs.size() != o.coeffs.size()) return coeffs.size() < o.coeffs.size();
    for (size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i].first != o.coeffs[i].first) return coeffs[i].first < o.coeffs[i].first;
      if (!(coeffs[i].second == o.coeffs[i].second)) return coeffs[i].second < o.coeffs[i].second;
    }
    if (!(rhs == o.rhs)) return rhs < o.rhs;
    return op < o.op;
  }
};

inline LinearAtom atom_le(int var, const Rational& b) { return LinearAtom({{var, Rational(1)}}, b, LinearAtom::Le); }
inline LinearAtom atom_ge(int var, const Rational& b) { return LinearAtom({{var, Rational(-1)}}, Rational(0) - b, LinearAtom::Le); }

struct Literal {
  LinearAtom atom;
  bool neg = false;

  LinearAtom effective() const { return neg ? atom.negated() : atom; }
  bool holds_at(const std::map<int, Rational>& x) const {
    bool h = atom.holds_at(x);
    return neg ? !h : h;
  }
};

// disjunction of literals
struct Clause {
  std::vector<Literal> lits;

  std::vector<int> scope() const {
    std::vector<int> s;
    for (const auto& l : lits)
      for (int v : l.atom.vars()) s.push_back(v);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }

  bool holds_at(const std::map<int, Rational>& x) const {
    for (const auto& l : lits)
      if (l.holds_at(x)) return true;
    return lits.empty() ? true : false;
  }
};

// x_j values where the 1-D structure in x_i can change: pairwise boundary
// intersections projected onto x_j, boundaries parallel to the x_i axis, and
// the x_j box ends. Sorted, unique, clipped to [lo_j, hi_j].
inline std::vector<Rational> critical_points(const std::vector<LinearAtom>& atoms, int xi, int xj,
                                             const Rational& lo_j, const Rational& hi_j) {
  std::vector<Rational> out{lo_j, hi_j};
  auto keep = [&](const Rational& y) {
    if (lo_j <= y && y <= hi_j) out.push_back(y);
  };
  struct L {
    Rational a, b, c;
  };
  std::vector<L> ls;
  for (const auto& t : atoms) ls.push_back({t.coef(xi), t.coef(xj), t.rhs});
  for (size_t i = 0; i < ls.size(); ++i) {
    if (ls[i].a == Rational(0) && !(ls[i].b == Rational(0))) keep(ls[i].c / ls[i].b);
    for (size_t j = i + 1; j < ls.size(); ++j) {
      Rational det = ls[i].a * ls[j].b - ls[j].a * ls[i].b;
      if (det == Rational(0)) continue;
      keep((ls[i].a * ls[j].c - ls[j].a * ls[i].c) / det);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// One maximal satisfying x_i interval at a representative x_j, with bounds as
// affine functions of x_j valid across the whole surrounding open cell.
struct XiCell {
  AffineFunc<Rational> lo, hi;
  bool lo_strict = false, hi_strict = false;
  int guard_piece = -1;  // -1: no guard active (neutral factor)
};

// Decomposes the satisfying set {x_i : clauses hold at (x_i, y0)} into
// maximal intervals on which the active guard is constant. y0 must lie
// strictly inside a cell of critical_points over all involved atoms; the
// returned affine bounds are then exact on that whole open cell. Every
// satisfying run must be bounded (callers include box atoms as unit clauses).
inline std::vector<XiCell> find_xi_cells(const std::vector<Clause>& clauses,
                                         const std::vector<std::vector<Literal>>& guards, int xi,
                                         int xj, const Rational& y0) {
  // breakpoints: x_i boundary positions at y0, with their affine source
  std::vector<std::pair<Rational, AffineFunc<Rational>>> bps;
  auto add_atom = [&](const LinearAtom& t) {
    Rational a = t.coef(xi);
    if (a == Rational(0)) return;
    Rational b = t.coef(xj);
    AffineFunc<Rational> f(xj, (Rational(0) - b) / a, t.rhs / a);
    bps.push_back({f.eval(y0), f});
  };
  for (const auto& cl : clauses)
    for (const auto& l : cl.lits) add_atom(l.atom);
  for (const auto& g : guards)
    for (const auto& l : g) add_atom(l.atom);
  std::sort(bps.begin(), bps.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });
  bps.erase(std::unique(bps.begin(), bps.end(),
                        [](const auto& p, const auto& q) { return p.first == q.first; }),
            bps.end());

  auto classify = [&](const Rational& x) -> std::pair<bool, int> {
    std::map<int, Rational> pt{{xi, x}, {xj, y0}};
    for (const auto& cl : clauses)
      if (!cl.holds_at(pt)) return {false, -1};
    int g = -1;
    for (size_t k = 0; k < guards.size(); ++k) {
      bool all = true;
      for (const auto& l : guards[k])
        if (!l.holds_at(pt)) {
          all = false;
          break;
        }
      if (all) {
        assert(g == -1 && "guards overlap");
        g = (int)k;
#ifdef NDEBUG
        break;
#endif
      }
    }
    return {true, g};
  };

  // elements alternate interval, point, interval, ...; classify each
  size_t ne = 2 * bps.size() + 1;
  std::vector<std::pair<bool, int>> cls(ne);
  for (size_t e = 0; e < ne; ++e) {
    Rational x;
    if (e % 2 == 1)
      x = bps[e / 2].first;
    else if (bps.empty())
      x = Rational(0);
    else if (e == 0)
      x = bps.front().first - Rational(1);
    else if (e == ne - 1)
      x = bps.back().first + Rational(1);
    else
      x = (bps[e / 2 - 1].first + bps[e / 2].first) / Rational(2);
    cls[e] = classify(x);
  }

  std::vector<XiCell> out;
  size_t e = 0;
  while (e < ne) {
    if (!cls[e].first) {
      ++e;
      continue;
    }
    size_t s = e;
    while (e + 1 < ne && cls[e + 1].first && cls[e + 1].second == cls[s].second) ++e;
    if (s == 0 || e + 1 >= ne)
      throw std::logic_error("unbounded satisfying x_i interval; box atoms missing");
    XiCell c;
    c.guard_piece = cls[s].second;
    if (s % 2 == 1) {  // starts at a breakpoint itself
      c.lo = bps[s / 2].second;
      c.lo_strict = false;
    } else {
      c.lo = bps[s / 2 - 1].second;
      c.lo_strict = true;
    }
    if (e % 2 == 1) {
      c.hi = bps[e / 2].second;
      c.hi_strict = false;
    } else {
      c.hi = bps[e / 2].second;
      c.hi_strict = true;
    }
    out.push_back(std::move(c));
    ++e;
  }
  return out;
}

}  // namespace cmap

#endif  // CMAP_ATOMS_HPP
