#ifndef CMAP_PROBLEM_HPP
#define CMAP_PROBLEM_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "atoms.hpp"
#include "multipoly.hpp"
#include "piecewise.hpp"
#include "simplex.hpp"

namespace cmap {

// A variable with its mandatory bounding box. Every problem variable ranges
// over a closed finite interval; the box is part of the constraint formula.
struct VarInfo {
  std::string name;
  Rational lo, hi;
};

struct CnfFormula {
  std::vector<VarInfo> vars;
  std::vector<Clause> clauses;
};

inline std::vector<LinearAtom> box_atoms_for(const CnfFormula& f, int v) {
  return {atom_ge(v, f.vars[v].lo), atom_le(v, f.vars[v].hi)};
}

inline std::vector<LinearAtom> box_atoms(const CnfFormula& f) {
  std::vector<LinearAtom> out;
  for (int v = 0; v < (int)f.vars.size(); ++v)
    for (auto& a : box_atoms_for(f, v)) out.push_back(std::move(a));
  return out;
}

inline std::vector<Clause> box_clauses_for(const CnfFormula& f, int v) {
  std::vector<Clause> out;
  for (const auto& a : box_atoms_for(f, v)) out.push_back(Clause{{Literal{a, false}}});
  return out;
}

// Clauses whose scope is nonempty and contained in the given variable set.
inline std::vector<Clause> clauses_with_scope_in(const CnfFormula& f, const std::vector<int>& vars) {
  std::vector<Clause> out;
  for (const auto& c : f.clauses) {
    auto sc = c.scope();
    if (sc.empty()) continue;
    bool inside = true;
    for (int v : sc)
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) inside = false;
    if (inside) out.push_back(c);
  }
  return out;
}

inline bool formula_holds_at(const CnfFormula& f, const std::map<int, Rational>& x) {
  for (int v = 0; v < (int)f.vars.size(); ++v) {
    auto it = x.find(v);
    if (it == x.end() || it->second < f.vars[v].lo || f.vars[v].hi < it->second) return false;
  }
  for (const auto& c : f.clauses)
    if (!c.holds_at(x)) return false;
  return true;
}

// One density piece of a bivariate factor. The body is separable,
// left(x_i) * right(x_j) for Poly and exp(left(x_i) + right(x_j)) for
// ExpPoly, unless `joint` is set, which only the polytope solver accepts.
// An empty guard means the piece covers the whole box.
template <class S>
struct EdgePiece {
  std::vector<Literal> guard;
  UniPoly<S> left, right;
  std::optional<MultiPoly<S>> joint;
};

template <class S>
struct EdgeFactor {
  int i = -1, j = -1;
  std::vector<EdgePiece<S>> pieces;
};

// A constrained MAP instance. Regions no density piece covers carry no mass:
// they are excluded from maximization even where the formula is satisfied.
// Variables or edges without a factor implicitly carry the constant factor 1.
template <class S>
struct Problem {
  FuncKind kind = FuncKind::Poly;
  CnfFormula formula;
  std::map<int, PiecewiseFunc<S>> node_factors;
  std::vector<EdgeFactor<S>> edge_factors;
};

struct AdmissionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAForest : AdmissionError {
  using AdmissionError::AdmissionError;
};
struct NonSeparableFactor : AdmissionError {
  using AdmissionError::AdmissionError;
};
struct MixedKind : AdmissionError {
  using AdmissionError::AdmissionError;
};
struct OverlappingGuards : AdmissionError {
  using AdmissionError::AdmissionError;
};
struct NegativeDensity : AdmissionError {
  using AdmissionError::AdmissionError;
};
struct Unsatisfiable : std::runtime_error {
  Unsatisfiable() : std::runtime_error("no feasible point carries density mass") {}
};

// Rooted forest over the variables, produced by admission. `order` lists each
// tree's nodes children-before-parents with the root last; trees appear in
// ascending root order.
struct FactorGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  std::vector<int> parent;
  std::vector<int> component;
  std::vector<int> roots;
  std::vector<int> order;
};

namespace probdetail {

// Center of one tree component: peel leaves until one or two nodes remain,
// then take the lower index. Minimizes the rooted height.
inline int tree_center(const std::vector<std::vector<int>>& adj, const std::vector<int>& comp_nodes) {
  std::map<int, int> deg;
  for (int v : comp_nodes) deg[v] = (int)adj[v].size();
  std::vector<int> alive = comp_nodes, frontier;
  for (int v : alive)
    if (deg[v] <= 1) frontier.push_back(v);
  int remaining = (int)alive.size();
  std::set<int> removed;
  while (remaining > 2) {
    std::vector<int> next;
    for (int v : frontier) {
      removed.insert(v);
      --remaining;
      for (int w : adj[v]) {
        if (removed.count(w)) continue;
        if (--deg[w] == 1) next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  int best = -1;
  for (int v : comp_nodes)
    if (!removed.count(v) && (best < 0 || v < best)) best = v;
  return best;
}

template <class S>
void check_nonneg_on(const UniPoly<S>& body, const S& lo, const S& hi, const char* what) {
  if (scalar_traits<S>::cmp(hi, lo) < 0) return;  // empty region, nothing to check
  auto [mn, mx] = poly_range_on(body, lo, hi);
  (void)mx;
  if (scalar_traits<S>::cmp(mn, S{}) < 0)
    throw NegativeDensity(std::string(what) + " takes a negative value on its region");
}

}  // namespace probdetail

// Checks the instance against the tree solver's requirements and builds the
// rooted forest: primal graph from bivariate clause scopes and edge factors,
// acyclicity, per-tree center roots, and a leaves-first elimination order.
// Also enforces the shared density invariants: uniform kind, separable edge
// bodies, mutually exclusive guards, and nonnegative Poly bodies (checked on
// the exact bounding box of each guard region).
template <class S>
FactorGraph validate_and_admit(const Problem<S>& P) {
  const CnfFormula& F = P.formula;
  const int n = (int)F.vars.size();
  for (int v = 0; v < n; ++v)
    if (F.vars[v].hi < F.vars[v].lo)
      throw std::invalid_argument("variable box is empty: " + F.vars[v].name);

  for (const auto& [v, pw] : P.node_factors) {
    if (v < 0 || v >= n) throw std::invalid_argument("node factor on unknown variable");
    for (const auto& pc : pw.pieces) {
      if (pc.kind != P.kind) throw MixedKind("node factor piece kind differs from the problem kind");
      if (pc.body.var >= 0 && pc.body.var != v)
        throw std::invalid_argument("node factor body over a foreign variable");
    }
    if (pw.var != v) throw std::invalid_argument("node factor keyed under the wrong variable");
  }

  std::set<std::pair<int, int>> edges, factor_pairs;
  for (const auto& c : F.clauses) {
    auto sc = c.scope();
    if ((int)sc.size() > 2)
      throw NotAForest("clause over more than two variables breaks the bivariate factorization");
    for (int v : sc)
      if (v < 0 || v >= n) throw std::invalid_argument("clause over unknown variable");
    if (sc.size() == 2) edges.insert({sc[0], sc[1]});
  }
  for (const auto& ef : P.edge_factors) {
    if (ef.i < 0 || ef.i >= n || ef.j < 0 || ef.j >= n || ef.i == ef.j)
      throw std::invalid_argument("edge factor endpoints out of range");
    if (ef.pieces.empty()) throw std::invalid_argument("edge factor with no pieces");
    if (!factor_pairs.insert({std::min(ef.i, ef.j), std::max(ef.i, ef.j)}).second)
      throw std::invalid_argument("two edge factors on the same variable pair; multiply them instead");
    edges.insert({std::min(ef.i, ef.j), std::max(ef.i, ef.j)});

    std::vector<std::vector<LinearAtom>> guard_atoms;
    for (const auto& pc : ef.pieces) {
      if (pc.joint.has_value())
        throw NonSeparableFactor("edge factor body does not factor into univariate parts");
      if (pc.left.var >= 0 && pc.left.var != ef.i)
        throw std::invalid_argument("left body over the wrong variable");
      if (pc.right.var >= 0 && pc.right.var != ef.j)
        throw std::invalid_argument("right body over the wrong variable");
      std::vector<LinearAtom> atoms;
      for (const auto& lit : pc.guard) {
        for (int v : lit.atom.vars())
          if (v != ef.i && v != ef.j)
            throw std::invalid_argument("guard mentions a variable outside the edge");
        atoms.push_back(lit.effective());
      }
      guard_atoms.push_back(std::move(atoms));
    }

    std::vector<LinearAtom> box;
    for (auto& a : box_atoms_for(F, ef.i)) box.push_back(std::move(a));
    for (auto& a : box_atoms_for(F, ef.j)) box.push_back(std::move(a));
    for (size_t a = 0; a < guard_atoms.size(); ++a)
      for (size_t b = a + 1; b < guard_atoms.size(); ++b) {
        std::vector<LinearAtom> conj = box;
        conj.insert(conj.end(), guard_atoms[a].begin(), guard_atoms[a].end());
        conj.insert(conj.end(), guard_atoms[b].begin(), guard_atoms[b].end());
        if (lra_feasible(conj))
          throw OverlappingGuards("two guards of one edge factor share a feasible point");
      }

    if (P.kind == FuncKind::Poly) {
      for (size_t k = 0; k < ef.pieces.size(); ++k) {
        std::vector<LinearAtom> region = box;
        region.insert(region.end(), guard_atoms[k].begin(), guard_atoms[k].end());
        if (!lra_feasible(region)) continue;
        auto ri = lra_var_range(region, ef.i), rj = lra_var_range(region, ef.j);
        assert(ri.first.finite() && ri.second.finite() && rj.first.finite() && rj.second.finite());
        auto [li, ui] = poly_range_on(ef.pieces[k].left, scalar_traits<S>::from_rat(ri.first.v),
                                      scalar_traits<S>::from_rat(ri.second.v));
        auto [lj, uj] = poly_range_on(ef.pieces[k].right, scalar_traits<S>::from_rat(rj.first.v),
                                      scalar_traits<S>::from_rat(rj.second.v));
        // The factors range over independent intervals, so the body's exact
        // minimum is the least of the four corner products.
        S mn = li * lj;
        for (const S& c : {li * uj, ui * lj, ui * uj})
          if (scalar_traits<S>::cmp(c, mn) < 0) mn = c;
        if (scalar_traits<S>::cmp(mn, S{}) < 0)
          throw NegativeDensity("edge factor body takes a negative value on its guard box");
      }
    }
  }

  if (P.kind == FuncKind::Poly) {
    for (const auto& [v, pw] : P.node_factors)
      for (const auto& pc : pw.pieces) {
        S lo = pc.lo.finite() ? pc.lo.v : scalar_traits<S>::from_rat(F.vars[v].lo);
        S hi = pc.hi.finite() ? pc.hi.v : scalar_traits<S>::from_rat(F.vars[v].hi);
        S blo = scalar_traits<S>::from_rat(F.vars[v].lo), bhi = scalar_traits<S>::from_rat(F.vars[v].hi);
        if (scalar_traits<S>::cmp(lo, blo) < 0) lo = blo;
        if (scalar_traits<S>::cmp(bhi, hi) < 0) hi = bhi;
        probdetail::check_nonneg_on(pc.body, lo, hi, "node factor body");
      }
  }

  FactorGraph G;
  G.n = n;
  G.adj.assign(n, {});
  for (const auto& [a, b] : edges) {
    G.adj[a].push_back(b);
    G.adj[b].push_back(a);
  }
  for (auto& nb : G.adj) std::sort(nb.begin(), nb.end());

  // Union-find over the deduplicated edges: a join inside one set is a cycle.
  std::vector<int> uf(n);
  for (int v = 0; v < n; ++v) uf[v] = v;
  auto find = [&](int v) {
    while (uf[v] != v) v = uf[v] = uf[uf[v]];
    return v;
  };
  for (const auto& [a, b] : edges) {
    int ra = find(a), rb = find(b);
    if (ra == rb) throw NotAForest("primal graph contains a cycle");
    uf[ra] = rb;
  }

  G.parent.assign(n, -1);
  G.component.assign(n, -1);
  std::map<int, std::vector<int>> comps;
  for (int v = 0; v < n; ++v) comps[find(v)].push_back(v);
  for (const auto& [rep, nodes] : comps) {
    (void)rep;
    int root = probdetail::tree_center(G.adj, nodes);
    G.roots.push_back(root);
  }
  std::sort(G.roots.begin(), G.roots.end());
  for (size_t t = 0; t < G.roots.size(); ++t) {
    // BFS visits parents first; the reversed order eliminates children first.
    std::vector<int> bfs{G.roots[t]};
    G.component[G.roots[t]] = (int)t;
    for (size_t head = 0; head < bfs.size(); ++head) {
      int v = bfs[head];
      for (int w : G.adj[v]) {
        if (G.component[w] >= 0) continue;
        G.component[w] = (int)t;
        G.parent[w] = v;
        bfs.push_back(w);
      }
    }
    G.order.insert(G.order.end(), bfs.rbegin(), bfs.rend());
  }
  return G;
}

// Rebuilds the instance over another scalar backend. Rational -> double is
// the benchmarking direction; guards stay exact either way.
template <class To, class From>
PiecewiseFunc<To> convert_pw(const PiecewiseFunc<From>& a) {
  auto x = [](const From& v) { return scalar_traits<To>::from_rat(scalar_traits<From>::to_rat(v)); };
  PiecewiseFunc<To> out;
  out.var = a.var;
  for (const auto& p : a.pieces) {
    Piece<To> d;
    d.lo = p.lo.finite() ? Ext<To>(x(p.lo.v)) : (p.lo.kind == Ext<From>::NegInf ? Ext<To>::neg_inf() : Ext<To>::pos_inf());
    d.hi = p.hi.finite() ? Ext<To>(x(p.hi.v)) : (p.hi.kind == Ext<From>::NegInf ? Ext<To>::neg_inf() : Ext<To>::pos_inf());
    d.lo_closed = p.lo_closed;
    d.hi_closed = p.hi_closed;
    d.kind = p.kind;
    d.body.var = p.body.var;
    for (const auto& c : p.body.c) d.body.c.push_back(x(c));
    out.pieces.push_back(std::move(d));
  }
  return out;
}

template <class To, class From>
UniPoly<To> convert_poly(const UniPoly<From>& p) {
  UniPoly<To> out;
  out.var = p.var;
  for (const auto& c : p.c)
    out.c.push_back(scalar_traits<To>::from_rat(scalar_traits<From>::to_rat(c)));
  out.normalize();
  return out;
}

template <class To, class From>
Problem<To> convert_problem(const Problem<From>& P) {
  Problem<To> out;
  out.kind = P.kind;
  out.formula = P.formula;
  for (const auto& [v, pw] : P.node_factors) out.node_factors.emplace(v, convert_pw<To>(pw));
  for (const auto& ef : P.edge_factors) {
    EdgeFactor<To> e;
    e.i = ef.i;
    e.j = ef.j;
    for (const auto& pc : ef.pieces) {
      EdgePiece<To> d;
      d.guard = pc.guard;
      d.left = convert_poly<To>(pc.left);
      d.right = convert_poly<To>(pc.right);
      if (pc.joint) {
        MultiPoly<To> m;
        for (const auto& t : pc.joint->terms)
          m.terms.push_back(
              {t.vp, scalar_traits<To>::from_rat(scalar_traits<From>::to_rat(t.coeff))});
        m.normalize();
        d.joint = std::move(m);
      }
      e.pieces.push_back(std::move(d));
    }
    out.edge_factors.push_back(std::move(e));
  }
  return out;
}

// Density score at a point: the factor product for Poly, the exponent sum for
// ExpPoly. nullopt wherever some factor has no covering piece; such regions
// carry no mass regardless of the formula.
template <class S>
std::optional<S> density_score_at(const Problem<S>& P, const std::map<int, S>& x) {
  const bool log_space = P.kind == FuncKind::ExpPoly;
  S acc = log_space ? S{} : S(1);
  auto fold = [&](const S& v) {
    acc = log_space ? acc + v : acc * v;
  };
  for (const auto& [v, pw] : P.node_factors) {
    auto it = x.find(v);
    assert(it != x.end() && "assignment misses a factor variable");
    auto val = pw.eval(it->second);
    if (!val) return std::nullopt;
    fold(*val);
  }
  for (const auto& ef : P.edge_factors) {
    auto xi = x.find(ef.i), xj = x.find(ef.j);
    assert(xi != x.end() && xj != x.end() && "assignment misses a factor variable");
    std::map<int, Rational> pt{{ef.i, scalar_traits<S>::to_rat(xi->second)},
                               {ef.j, scalar_traits<S>::to_rat(xj->second)}};
    const EdgePiece<S>* active = nullptr;
    for (const auto& pc : ef.pieces) {
      bool holds = true;
      for (const auto& lit : pc.guard)
        if (!lit.holds_at(pt)) {
          holds = false;
          break;
        }
      if (holds) {
        active = &pc;
        break;
      }
    }
    if (!active) return std::nullopt;
    if (active->joint) {
      assert(!log_space && "non-separable bodies are Poly-only");
      std::map<int, S> sub{{ef.i, xi->second}, {ef.j, xj->second}};
      fold(active->joint->eval(sub));
    } else {
      S l = active->left.eval(xi->second), r = active->right.eval(xj->second);
      fold(log_space ? l + r : l * r);
    }
  }
  return acc;
}

}  // namespace cmap

#endif  // CMAP_PROBLEM_HPP
