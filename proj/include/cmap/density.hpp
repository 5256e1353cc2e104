#ifndef CMAP_DENSITY_HPP
#define CMAP_DENSITY_HPP

#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "multipoly.hpp"
#include "problem.hpp"

namespace cmap {

// Flat view of a problem's density for region enumeration: every factor is a
// list of guarded pieces whose regions are cut out by literal conjunctions.
// Node factor interval endpoints become unit literals here, so a total truth
// assignment over the collected atoms pins down at most one piece per factor.
struct DensityPiece {
  std::vector<Literal> guard;  // conjunction; empty = everywhere
  // separable bodies, one per (variable, polynomial) pair; product semantics
  std::vector<std::pair<int, UniPoly<Rational>>> bodies;
  std::optional<MultiPoly<Rational>> joint;  // non-separable body, Poly kind only

  double eval_d(const std::map<int, double>& x, FuncKind kind) const {
    if (joint) {
      assert(kind == FuncKind::Poly);
      return joint->eval_d(x);
    }
    double acc = kind == FuncKind::ExpPoly ? 0.0 : 1.0;
    for (const auto& [v, q] : bodies) {
      double b = 0, xn = 1, xv = x.at(v);
      for (const auto& c : q.c) {
        b += scalar_traits<Rational>::to_double(c) * xn;
        xn *= xv;
      }
      if (kind == FuncKind::ExpPoly)
        acc += b;
      else
        acc *= b;
    }
    return acc;
  }

  Rational eval_exact(const std::map<int, Rational>& x, FuncKind kind) const {
    if (joint) {
      assert(kind == FuncKind::Poly);
      return joint->eval(x);
    }
    Rational acc = kind == FuncKind::ExpPoly ? Rational(0) : Rational(1);
    for (const auto& [v, q] : bodies) {
      Rational b = q.eval(x.at(v));
      acc = kind == FuncKind::ExpPoly ? acc + b : acc * b;
    }
    return acc;
  }

  bool covers(const std::map<int, Rational>& x) const {
    for (const auto& l : guard)
      if (!l.holds_at(x)) return false;
    return true;
  }
};

struct DensityFactor {
  std::vector<DensityPiece> pieces;

  // first piece whose guard holds; ties on shared closed boundaries go to
  // the lower piece by construction
  int piece_at(const std::map<int, Rational>& x) const {
    for (size_t k = 0; k < pieces.size(); ++k)
      if (pieces[k].covers(x)) return (int)k;
    return -1;
  }
};

// kind applies to every piece body: Poly scores multiply, ExpPoly exponents
// add (all comparisons then live in log space)
struct DensityModel {
  FuncKind kind = FuncKind::Poly;
  std::vector<DensityFactor> factors;
};

namespace densdetail {

inline std::vector<Literal> interval_literals(int var, const Piece<Rational>& p) {
  std::vector<Literal> out;
  if (p.lo.finite())
    out.push_back({LinearAtom({{var, Rational(-1)}}, Rational(0) - p.lo.v,
                              p.lo_closed ? LinearAtom::Le : LinearAtom::Lt),
                   false});
  if (p.hi.finite())
    out.push_back({LinearAtom({{var, Rational(1)}}, p.hi.v,
                              p.hi_closed ? LinearAtom::Le : LinearAtom::Lt),
                   false});
  return out;
}

}  // namespace densdetail

inline DensityModel build_density(const Problem<Rational>& P) {
  DensityModel D;
  D.kind = P.kind;
  for (const auto& [v, pw] : P.node_factors) {
    DensityFactor f;
    for (const auto& p : pw.pieces) {
      DensityPiece dp;
      dp.guard = densdetail::interval_literals(v, p);
      dp.bodies.push_back({v, p.body});
      f.pieces.push_back(std::move(dp));
    }
    D.factors.push_back(std::move(f));
  }
  for (const auto& ef : P.edge_factors) {
    DensityFactor f;
    for (const auto& p : ef.pieces) {
      DensityPiece dp;
      dp.guard = p.guard;
      if (p.joint) {
        dp.joint = *p.joint;
      } else {
        dp.bodies.push_back({ef.i, p.left});
        dp.bodies.push_back({ef.j, p.right});
      }
      f.pieces.push_back(std::move(dp));
    }
    D.factors.push_back(std::move(f));
  }
  return D;
}

// single unguarded non-separable density over the whole box
inline DensityModel joint_density(const MultiPoly<Rational>& p) {
  DensityModel D;
  D.kind = FuncKind::Poly;
  DensityFactor f;
  DensityPiece dp;
  dp.joint = p;
  f.pieces.push_back(std::move(dp));
  D.factors.push_back(std::move(f));
  return D;
}

// Score of the density at a point: product value for Poly, exponent sum for
// ExpPoly. nullopt when some factor leaves the point uncovered (no mass).
inline std::optional<Rational> density_model_score(const DensityModel& D,
                                                   const std::map<int, Rational>& x) {
  Rational acc = D.kind == FuncKind::ExpPoly ? Rational(0) : Rational(1);
  for (const auto& f : D.factors) {
    int k = f.piece_at(x);
    if (k < 0) return std::nullopt;
    Rational v = f.pieces[k].eval_exact(x, D.kind);
    acc = D.kind == FuncKind::ExpPoly ? acc + v : acc * v;
  }
  return acc;
}

// Restriction of the model to one chosen piece per factor; factors whose
// entry is negative are dropped (used for formula-only enumeration).
struct PieceSelection {
  std::vector<int> piece;  // parallel to DensityModel::factors
};

inline Rational selection_score_exact(const DensityModel& D, const PieceSelection& sel,
                                      const std::map<int, Rational>& x) {
  Rational acc = D.kind == FuncKind::ExpPoly ? Rational(0) : Rational(1);
  for (size_t f = 0; f < D.factors.size(); ++f) {
    if (sel.piece[f] < 0) continue;
    Rational v = D.factors[f].pieces[sel.piece[f]].eval_exact(x, D.kind);
    acc = D.kind == FuncKind::ExpPoly ? acc + v : acc * v;
  }
  return acc;
}

inline double selection_score_d(const DensityModel& D, const PieceSelection& sel,
                                const std::map<int, double>& x) {
  double acc = D.kind == FuncKind::ExpPoly ? 0.0 : 1.0;
  for (size_t f = 0; f < D.factors.size(); ++f) {
    if (sel.piece[f] < 0) continue;
    double v = D.factors[f].pieces[sel.piece[f]].eval_d(x, D.kind);
    acc = D.kind == FuncKind::ExpPoly ? acc + v : acc * v;
  }
  return acc;
}

// Gradient of the selection score by the product rule across factors.
inline std::map<int, double> selection_grad_d(const DensityModel& D,
                                              const PieceSelection& sel,
                                              const std::map<int, double>& x) {
  std::map<int, double> g;
  for (const auto& [v, _] : x) g[v] = 0.0;
  struct Part {
    double value;
    std::map<int, double> partial;
  };
  std::vector<Part> parts;
  for (size_t f = 0; f < D.factors.size(); ++f) {
    if (sel.piece[f] < 0) continue;
    const DensityPiece& dp = D.factors[f].pieces[sel.piece[f]];
    Part pt;
    pt.value = dp.eval_d(x, D.kind);
    if (dp.joint) {
      for (const auto& [v, _] : x) {
        MultiPoly<Rational> dv = dp.joint->derivative(v);
        if (!dv.terms.empty()) pt.partial[v] = dv.eval_d(x);
      }
    } else if (D.kind == FuncKind::ExpPoly) {
      // exponent sum: partials add directly, no product rule needed
      for (const auto& [v, q] : dp.bodies) {
        UniPoly<Rational> dq = poly_derivative(q);
        double s = 0, xn = 1;
        for (const auto& c : dq.c) {
          s += scalar_traits<Rational>::to_double(c) * xn;
          xn *= x.at(v);
        }
        g[v] += s;
      }
      continue;
    } else {
      // product of univariate bodies inside one factor
      std::map<int, double> vals, ders;
      double prod = 1;
      for (const auto& [v, q] : dp.bodies) {
        double b = 0, db = 0, xn = 1;
        UniPoly<Rational> dq = poly_derivative(q);
        for (size_t i = 0; i < q.c.size(); ++i) {
          b += scalar_traits<Rational>::to_double(q.c[i]) * xn;
          if (i < dq.c.size()) db += scalar_traits<Rational>::to_double(dq.c[i]) * xn;
          xn *= x.at(v);
        }
        // repeated variables inside one piece fold multiplicatively
        double prev = vals.count(v) ? vals[v] : 1.0;
        double prevd = ders.count(v) ? ders[v] : 0.0;
        vals[v] = prev * b;
        ders[v] = prevd * b + prev * db;
        prod *= b;
      }
      pt.value = prod;
      for (const auto& [v, b] : vals) {
        double others = 1;
        for (const auto& [u, bu] : vals)
          if (u != v) others *= bu;
        pt.partial[v] = ders[v] * others;
      }
    }
    parts.push_back(std::move(pt));
  }
  if (D.kind == FuncKind::ExpPoly) return g;  // handled inline above
  for (size_t i = 0; i < parts.size(); ++i) {
    double others = 1;
    for (size_t j = 0; j < parts.size(); ++j)
      if (j != i) others *= parts[j].value;
    for (const auto& [v, dv] : parts[i].partial) g[v] += dv * others;
  }
  return g;
}

// Point-resolved score and gradient for unconstrained climbing: each factor
// uses the piece containing the point (lowest index on boundary ties).
// Uncovered points score zero mass: -inf exponent for ExpPoly, 0 for Poly,
// with a zero gradient so particles stall instead of chasing garbage.
inline std::optional<PieceSelection> selection_at(const DensityModel& D,
                                                  const std::map<int, Rational>& x) {
  PieceSelection sel;
  for (const auto& f : D.factors) {
    int k = f.piece_at(x);
    if (k < 0) return std::nullopt;
    sel.piece.push_back(k);
  }
  return sel;
}

inline std::map<int, Rational> exact_of(const std::map<int, double>& x) {
  std::map<int, Rational> out;
  for (const auto& [v, d] : x) out[v] = Rational::from_double(d);
  return out;
}

inline double model_score_d(const DensityModel& D, const std::map<int, double>& x) {
  auto sel = selection_at(D, exact_of(x));
  if (!sel)
    return D.kind == FuncKind::ExpPoly ? -std::numeric_limits<double>::infinity() : 0.0;
  return selection_score_d(D, *sel, x);
}

inline std::map<int, double> model_grad_d(const DensityModel& D,
                                          const std::map<int, double>& x) {
  auto sel = selection_at(D, exact_of(x));
  if (!sel) {
    std::map<int, double> g;
    for (const auto& [v, _] : x) g[v] = 0.0;
    return g;
  }
  return selection_grad_d(D, *sel, x);
}

}  // namespace cmap

#endif  // CMAP_DENSITY_HPP
