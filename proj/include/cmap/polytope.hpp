#ifndef CMAP_POLYTOPE_HPP
#define CMAP_POLYTOPE_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "atoms.hpp"
#include "simplex.hpp"

namespace cmap {

struct ProjectionStalled : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A literal reduced to a canonical atom plus a polarity. An atom and its
// complement normalize to the same canonical atom with opposite polarity,
// so truth assignments over canonical atoms never carry hidden dependencies.
struct CanonLit {
  LinearAtom atom;
  bool pol = true;  // literal holds iff atom's truth value equals pol
};

inline CanonLit canon_literal(const Literal& l) {
  LinearAtom a = l.effective();
  if (a.op == LinearAtom::Eq)
    throw std::logic_error("equality atoms must be rewritten before enumeration");
  assert(!a.coeffs.empty());
  if (a.coeffs.front().second < Rational(0)) return {a.negated(), false};
  return {a, true};
}

// Conjunction of linear atoms carving one cell out of the variable box.
// `atoms` holds the box constraints plus the signed enumeration atoms.
struct Polytope {
  std::vector<LinearAtom> atoms;

  bool contains(const std::map<int, Rational>& x) const {
    for (const auto& a : atoms)
      if (!a.holds_at(x)) return false;
    return true;
  }

  // closure membership: strict atoms relaxed to their non-strict closure
  bool closure_contains(const std::map<int, Rational>& x) const {
    for (const auto& a : atoms) {
      Rational s = a.lhs_at(x);
      if (a.op == LinearAtom::Eq ? !(s == a.rhs) : !(s <= a.rhs)) return false;
    }
    return true;
  }
};

// Tight axis-aligned bounding box of the polytope. Every polytope the
// enumerator emits is cut out of a finite variable box, so both ends exist.
inline std::map<int, std::pair<Rational, Rational>> polytope_box(
    const Polytope& P, const std::vector<int>& vars) {
  std::map<int, std::pair<Rational, Rational>> box;
  for (int v : vars) {
    auto [lo, hi] = lra_var_range(P.atoms, v);
    if (!lo.finite() || !hi.finite())
      throw std::logic_error("polytope is unbounded; box atoms missing");
    box[v] = {lo.v, hi.v};
  }
  return box;
}

namespace polydetail {

struct DenseAtom {
  std::vector<double> t;  // coefficients in var-list order
  double c = 0;
  double nrm2 = 0;  // ||t||^2
};

inline std::vector<DenseAtom> densify(const std::vector<LinearAtom>& atoms,
                                      const std::vector<int>& vars) {
  std::map<int, size_t> idx;
  for (size_t k = 0; k < vars.size(); ++k) idx[vars[k]] = k;
  std::vector<DenseAtom> out;
  for (const auto& a : atoms) {
    DenseAtom d;
    d.t.assign(vars.size(), 0.0);
    for (const auto& [v, c] : a.coeffs) d.t[idx.at(v)] = c.to_double();
    d.c = a.rhs.to_double();
    for (double x : d.t) d.nrm2 += x * x;
    out.push_back(std::move(d));
  }
  return out;
}

// Exact least-norm correction: returns y minimizing ||y - x|| subject to
// rows(A) y = b, via the normal equations over the Gram matrix. Dependent
// rows are dropped at zero pivots. Empty active set returns x unchanged.
inline std::vector<Rational> affine_project_exact(
    const std::vector<Rational>& x, const std::vector<std::vector<Rational>>& A,
    const std::vector<Rational>& b) {
  size_t m = A.size(), n = x.size();
  if (m == 0) return x;
  // G = A A^T, r = b - A x
  std::vector<std::vector<Rational>> G(m, std::vector<Rational>(m, Rational(0)));
  std::vector<Rational> r(m, Rational(0));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      Rational s(0);
      for (size_t k = 0; k < n; ++k) s = s + A[i][k] * A[j][k];
      G[i][j] = s;
      G[j][i] = s;
    }
    Rational s(0);
    for (size_t k = 0; k < n; ++k) s = s + A[i][k] * x[k];
    r[i] = b[i] - s;
  }
  // Gaussian elimination with column pivoting; zero pivot = dependent row.
  std::vector<Rational> lam(m, Rational(0));
  std::vector<size_t> rows(m);
  for (size_t i = 0; i < m; ++i) rows[i] = i;
  size_t rank = 0;
  for (size_t col = 0; col < m && rank < m; ++col) {
    size_t piv = rank;
    while (piv < m && G[rows[piv]][col].is_zero()) ++piv;
    if (piv == m) continue;
    std::swap(rows[rank], rows[piv]);
    for (size_t i = rank + 1; i < m; ++i) {
      if (G[rows[i]][col].is_zero()) continue;
      Rational f = G[rows[i]][col] / G[rows[rank]][col];
      for (size_t j = col; j < m; ++j)
        G[rows[i]][j] = G[rows[i]][j] - f * G[rows[rank]][j];
      r[rows[i]] = r[rows[i]] - f * r[rows[rank]];
    }
    ++rank;
  }
  // back substitution over the pivoted rows
  std::vector<size_t> pivcol(rank);
  {
    size_t col = 0;
    for (size_t i = 0; i < rank; ++i) {
      while (G[rows[i]][col].is_zero()) ++col;
      pivcol[i] = col++;
    }
  }
  for (size_t ii = rank; ii-- > 0;) {
    Rational s = r[rows[ii]];
    for (size_t j = pivcol[ii] + 1; j < m; ++j) s = s - G[rows[ii]][j] * lam[j];
    lam[pivcol[ii]] = s / G[rows[ii]][pivcol[ii]];
  }
  std::vector<Rational> y = x;
  for (size_t i = 0; i < m; ++i) {
    if (lam[i].is_zero()) continue;
    for (size_t k = 0; k < n; ++k) y[k] = y[k] + A[i][k] * lam[i];
  }
  return y;
}

}  // namespace polydetail

// Dykstra-corrected cyclic projection onto the closure of the polytope,
// double precision, no exact snap. Strict atoms are treated as their
// closures. Throws ProjectionStalled when max_sweeps pass without every
// atom holding within tol.
inline std::map<int, double> project_onto_polytope_d(
    const std::map<int, double>& x0, const Polytope& P, int max_sweeps = 200,
    double tol = 1e-10) {
  std::vector<int> vars;
  for (const auto& [v, _] : x0) vars.push_back(v);
  auto dense = polydetail::densify(P.atoms, vars);
  std::vector<double> x(vars.size());
  for (size_t k = 0; k < vars.size(); ++k) x[k] = x0.at(vars[k]);
  std::vector<std::vector<double>> corr(dense.size(),
                                        std::vector<double>(vars.size(), 0.0));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (size_t a = 0; a < dense.size(); ++a) {
      const auto& d = dense[a];
      if (d.nrm2 == 0) continue;
      double dot = 0;
      std::vector<double> y(x.size());
      for (size_t k = 0; k < x.size(); ++k) {
        y[k] = x[k] + corr[a][k];
        dot += d.t[k] * y[k];
      }
      double over = dot - d.c;
      double step = over > 0 ? over / d.nrm2 : 0.0;
      for (size_t k = 0; k < x.size(); ++k) {
        double proj = y[k] - step * d.t[k];
        corr[a][k] = y[k] - proj;
        x[k] = proj;
      }
    }
    bool ok = true;
    for (const auto& d : dense) {
      double dot = 0;
      for (size_t k = 0; k < x.size(); ++k) dot += d.t[k] * x[k];
      if (dot - d.c > tol) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::map<int, double> out;
      for (size_t k = 0; k < vars.size(); ++k) out[vars[k]] = x[k];
      return out;
    }
  }
  throw ProjectionStalled("cyclic projection did not reach the polytope");
}

// Projection with a final exact snap: atoms within snap_tol of equality at
// the double iterate are treated as active and the point is moved exactly
// onto their intersection, so boundary optima come back as clean rationals.
// The snap is kept only when every atom's closure still holds exactly.
inline std::map<int, Rational> project_onto_polytope(
    const std::map<int, double>& x0, const Polytope& P, int max_sweeps = 200,
    double tol = 1e-10, double snap_tol = 1e-8) {
  {
    // points already in the closure come back untouched
    std::map<int, Rational> exact;
    for (const auto& [v, d] : x0) exact[v] = Rational::from_double(d);
    if (P.closure_contains(exact)) return exact;
  }
  std::map<int, double> xd = project_onto_polytope_d(x0, P, max_sweeps, tol);
  std::vector<int> vars;
  for (const auto& [v, _] : xd) vars.push_back(v);
  std::vector<Rational> x;
  for (int v : vars) x.push_back(Rational::from_double(xd.at(v)));
  std::map<int, Rational> pt;
  for (size_t k = 0; k < vars.size(); ++k) pt[vars[k]] = x[k];
  if (P.closure_contains(pt)) return pt;
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (const auto& a : P.atoms) {
    double slack = std::fabs(a.lhs_at(pt).to_double() - a.rhs.to_double());
    if (slack > snap_tol && a.op != LinearAtom::Eq) continue;
    std::vector<Rational> row(vars.size(), Rational(0));
    for (const auto& [v, c] : a.coeffs)
      for (size_t k = 0; k < vars.size(); ++k)
        if (vars[k] == v) row[k] = c;
    A.push_back(std::move(row));
    b.push_back(a.rhs);
  }
  auto y = polydetail::affine_project_exact(x, A, b);
  std::map<int, Rational> snapped;
  for (size_t k = 0; k < vars.size(); ++k) snapped[vars[k]] = y[k];
  for (const auto& a : P.atoms) {
    Rational s = a.lhs_at(snapped);
    bool ok = a.op == LinearAtom::Eq ? s == a.rhs : s <= a.rhs;
    if (!ok) return pt;  // snap overshot a nearby face; keep the iterate
  }
  return snapped;
}

}  // namespace cmap

#endif  // CMAP_POLYTOPE_HPP
