#ifndef CMAP_MPMAP_HPP
#define CMAP_MPMAP_HPP

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "maxout.hpp"
#include "problem.hpp"

namespace cmap {

template <class S>
struct SolveStats {
  // one entry per message: "c->p pieces=K bound=B"
  std::vector<std::string> messages;
  size_t max_message_pieces = 0;
  size_t total_message_pieces = 0;
  bool verified = false;
  double wall_seconds = 0;
};

// Solver output. `value` is the density for Poly problems and the log-density
// for ExpPoly ones (the comparison order is the same either way). When
// `attained` is false the assignment is a limit witness: the supremum is
// approached at the boundary it names but no feasible point realizes it.
template <class S>
struct MapResult {
  S value{};
  std::map<int, S> assignment;
  bool attained = true;
  SolveStats<S> stats;
};

template <class S>
struct SolveOptions {
  // called after each message with (child, parent, message)
  std::function<void(int, int, const PiecewiseFunc<S>&)> on_message;
};

namespace mpdetail {

// Satisfying intervals of the unary clauses over `var` within its box,
// obtained from the one-variable cell decomposition against a dummy partner.
template <class S>
PiecewiseFunc<S> restrict_to_unary(const PiecewiseFunc<S>& base, const CnfFormula& F, int var) {
  std::vector<Clause> cls = clauses_with_scope_in(F, {var});
  for (auto& c : box_clauses_for(F, var)) cls.push_back(std::move(c));
  auto cells = find_xi_cells(cls, {}, var, -2, Rational(0));
  PiecewiseFunc<S> out;
  out.var = base.var;
  for (const auto& c : cells) {
    assert(c.lo.is_const() && c.hi.is_const() && "unary cells must have constant bounds");
    auto part = pw_restrict(base, Ext<S>(scalar_traits<S>::from_rat(c.lo.off)),
                            Ext<S>(scalar_traits<S>::from_rat(c.hi.off)), !c.lo_strict, !c.hi_strict);
    for (auto& p : part.pieces) out.pieces.push_back(std::move(p));
  }
  return out;
}

// The edge context a child-to-parent elimination runs against.
template <class S>
struct EdgeView {
  std::vector<Clause> clauses;                  // scope within {child, parent}, plus box units
  std::vector<std::vector<Literal>> guards;     // per factor piece; empty when no factor
  std::vector<const UniPoly<S>*> elim_bodies;   // bodies over the child, one per piece
  std::vector<const UniPoly<S>*> keep_bodies;   // bodies over the parent, one per piece
  bool has_factor = false;
};

template <class S>
EdgeView<S> edge_view(const Problem<S>& P, int child, int parent) {
  EdgeView<S> ev;
  ev.clauses = clauses_with_scope_in(P.formula, {child, parent});
  for (auto& c : box_clauses_for(P.formula, child)) ev.clauses.push_back(std::move(c));
  for (auto& c : box_clauses_for(P.formula, parent)) ev.clauses.push_back(std::move(c));
  for (const auto& ef : P.edge_factors) {
    if (!((ef.i == child && ef.j == parent) || (ef.j == child && ef.i == parent))) continue;
    ev.has_factor = true;
    const bool swapped = ef.j == child;
    for (const auto& pc : ef.pieces) {
      ev.guards.push_back(pc.guard);
      ev.elim_bodies.push_back(swapped ? &pc.right : &pc.left);
      ev.keep_bodies.push_back(swapped ? &pc.left : &pc.right);
    }
  }
  return ev;
}

template <class S>
S neutral_value(FuncKind kind) {
  return kind == FuncKind::ExpPoly ? S{} : S(1);
}

}  // namespace mpdetail

// Product of the node factor (clipped to the box and the unary clauses) and
// all child messages, carrying the children's argmax records along.
template <class S>
PiecewiseFunc<S> gather_msgs(const Problem<S>& P, int var,
                             const std::vector<PiecewiseFunc<S>>& child_msgs) {
  const S lo = scalar_traits<S>::from_rat(P.formula.vars[var].lo);
  const S hi = scalar_traits<S>::from_rat(P.formula.vars[var].hi);
  PiecewiseFunc<S> base;
  auto it = P.node_factors.find(var);
  if (it != P.node_factors.end())
    base = pw_restrict(it->second, Ext<S>(lo), Ext<S>(hi), true, true);
  else
    base = pw_const(var, mpdetail::neutral_value<S>(P.kind), Ext<S>(lo), Ext<S>(hi), true, true, P.kind);
  base = mpdetail::restrict_to_unary(base, P.formula, var);
  for (const auto& m : child_msgs) base = pw_product(base, m);
  return pw_simplify(base);
}

// Eliminates `child` into a message over `parent`: per critical interval of
// the parent, decompose the child's satisfiable span into cells of constant
// guard, run the symbolic window supremum per cell, weight by the kept body,
// and join everything by pointwise max. Critical values themselves get exact
// one-dimensional point slices. Cells no density piece covers carry no mass
// and are skipped whenever the edge has a factor.
template <class S>
PiecewiseFunc<S> compute_msgs(const Problem<S>& P, const PiecewiseFunc<S>& gathered, int child,
                              int parent, SolveStats<S>* stats = nullptr) {
  using T = scalar_traits<S>;
  const auto ev = mpdetail::edge_view(P, child, parent);

  // critical parent values: all atom pairings plus the gathered piece bounds
  std::vector<LinearAtom> atoms;
  for (const auto& c : ev.clauses)
    for (const auto& l : c.lits) atoms.push_back(l.atom);
  for (const auto& g : ev.guards)
    for (const auto& l : g) atoms.push_back(l.atom);
  for (const auto& pc : gathered.pieces) {
    if (pc.lo.finite()) atoms.push_back(atom_le(child, T::to_rat(pc.lo.v)));
    if (pc.hi.finite()) atoms.push_back(atom_le(child, T::to_rat(pc.hi.v)));
  }
  std::vector<Rational> crit =
      critical_points(atoms, child, parent, P.formula.vars[parent].lo, P.formula.vars[parent].hi);

  // per guard piece, the gathered message already weighted by the elim-side body
  std::vector<PiecewiseFunc<S>> weighted;
  if (ev.has_factor) {
    for (const auto* body : ev.elim_bodies) weighted.push_back(pw_mul_factor(gathered, *body));
  } else {
    weighted.push_back(gathered);
  }
  auto weighted_for = [&](int guard_piece) -> const PiecewiseFunc<S>* {
    if (!ev.has_factor) return &weighted[0];
    if (guard_piece < 0) return nullptr;  // uncovered: no mass
    return &weighted[guard_piece];
  };
  auto keep_body_for = [&](int guard_piece) -> const UniPoly<S>* {
    if (!ev.has_factor || guard_piece < 0) return nullptr;
    return ev.keep_bodies[guard_piece];
  };

  PiecewiseFunc<S> out;
  out.var = parent;

  auto emit_point_slice = [&](const Rational& y) {
    auto cells = find_xi_cells(ev.clauses, ev.guards, child, parent, y);
    const S ys = T::from_rat(y);
    bool have = false;
    S best{};
    bool best_attained = false;
    std::vector<ArgRecord<S>> best_args;
    for (const auto& c : cells) {
      const auto* q = weighted_for(c.guard_piece);
      if (!q) continue;
      S xl = T::from_rat(c.lo.eval(y)), xu = T::from_rat(c.hi.eval(y));
      auto restricted = pw_restrict(*q, Ext<S>(xl), Ext<S>(xu), !c.lo_strict, !c.hi_strict);
      auto fm = pw_final_max(restricted);
      if (!fm.defined) continue;
      assert(!fm.unbounded && "boxed cells cannot be unbounded");
      S v = fm.value_body;
      if (const auto* kb = keep_body_for(c.guard_piece))
        v = restricted.kind() == FuncKind::ExpPoly ? v + kb->eval(ys) : v * kb->eval(ys);
      int cmp = have ? T::cmp(v, best) : 1;
      if (cmp > 0 || (cmp == 0 && fm.attained && !best_attained)) {
        have = true;
        best = v;
        best_attained = fm.attained;
        best_args.clear();
        for (const auto& a : restricted.pieces[fm.piece_idx].args)
          best_args.push_back(ArgRecord<S>::constant(a.var, a.eval(fm.arg), a.attained));
        best_args.push_back(ArgRecord<S>::constant(child, fm.arg, fm.attained));
      }
    }
    if (!have) return;
    Piece<S> r;
    r.lo = Ext<S>(ys);
    r.hi = Ext<S>(ys);
    r.lo_closed = r.hi_closed = true;
    r.kind = P.kind;
    r.body = UniPoly<S>::constant(best);
    r.body.var = parent;
    r.args = std::move(best_args);
    out.pieces.push_back(std::move(r));
  };

  auto emit_interval = [&](const Rational& ylo, const Rational& yhi) {
    if (!(ylo < yhi)) return;
    const Rational ymid = (ylo + yhi) / Rational(2);
    auto cells = find_xi_cells(ev.clauses, ev.guards, child, parent, ymid);
    PiecewiseFunc<S> acc;
    acc.var = parent;
    for (const auto& c : cells) {
      const auto* q = weighted_for(c.guard_piece);
      if (!q) continue;
      AffineFunc<S> lf(parent, T::from_rat(c.lo.slope), T::from_rat(c.lo.off));
      AffineFunc<S> uf(parent, T::from_rat(c.hi.slope), T::from_rat(c.hi.off));
      auto part = max_out(*q, lf, uf, c.lo_strict, c.hi_strict);
      if (const auto* kb = keep_body_for(c.guard_piece)) part = pw_mul_factor(part, *kb);
      part = pw_restrict(part, Ext<S>(T::from_rat(ylo)), Ext<S>(T::from_rat(yhi)), false, false);
      acc = acc.empty() ? std::move(part) : pw_max(acc, part);
    }
    for (auto& p : acc.pieces) out.pieces.push_back(std::move(p));
  };

  for (size_t k = 0; k < crit.size(); ++k) {
    emit_point_slice(crit[k]);
    if (k + 1 < crit.size()) emit_interval(crit[k], crit[k + 1]);
  }
  assert(out.invariants_ok());
  out = pw_simplify(out);

  if (stats) {
    // window-supremum piece growth bound, scaled by the cell decomposition
    const size_t C = crit.size();
    const size_t m = std::max<size_t>(1, gathered.pieces.size());
    const size_t qn = std::max<size_t>(1, ev.guards.size());
    const size_t kernel = 8 * m * qn + 4 * m + 4;
    const size_t bound = (2 * C + C * C) * (C * kernel * C * C * qn);
    assert(out.pieces.size() <= bound && "message piece count exceeded its bound");
    stats->messages.push_back("x" + std::to_string(child) + "->x" + std::to_string(parent) +
                              " pieces=" + std::to_string(out.pieces.size()) +
                              " bound=" + std::to_string(bound));
    stats->max_message_pieces = std::max(stats->max_message_pieces, out.pieces.size());
    stats->total_message_pieces += out.pieces.size();
  }
  return out;
}

// Exact MAP by leaves-first elimination over the admitted forest. Throws
// Unsatisfiable when some tree's final message is empty, i.e. no point both
// satisfies the formula and carries density mass.
template <class S>
MapResult<S> solve(const Problem<S>& P, const FactorGraph& G, const SolveOptions<S>& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  MapResult<S> R;
  R.value = mpdetail::neutral_value<S>(P.kind);

  std::vector<std::vector<PiecewiseFunc<S>>> inbox(G.n);
  for (int v : G.order) {
    PiecewiseFunc<S> gathered = gather_msgs(P, v, inbox[v]);
    inbox[v].clear();
    if (G.parent[v] >= 0) {
      PiecewiseFunc<S> m = compute_msgs(P, gathered, v, G.parent[v], &R.stats);
      if (opts.on_message) opts.on_message(v, G.parent[v], m);
      inbox[G.parent[v]].push_back(std::move(m));
      continue;
    }
    // v is a root: close out its tree
    auto fm = pw_final_max(gathered);
    if (!fm.defined) throw Unsatisfiable();
    assert(!fm.unbounded && "boxed final message cannot be unbounded");
    R.value = P.kind == FuncKind::ExpPoly ? R.value + fm.value_body : R.value * fm.value_body;
    R.attained = R.attained && fm.attained;
    R.assignment[v] = fm.arg;
    for (const auto& a : gathered.pieces[fm.piece_idx].args) {
      R.assignment[a.var] = a.eval(fm.arg);
      R.attained = R.attained && a.attained;
    }
  }

  // cross-check the backtracked point against the problem itself
  if (R.attained) {
    std::map<int, Rational> pt;
    for (const auto& [v, x] : R.assignment) pt[v] = scalar_traits<S>::to_rat(x);
    auto ds = density_score_at(P, R.assignment);
    bool ok = formula_holds_at(P.formula, pt) && ds.has_value();
    if (ok) {
      if constexpr (scalar_traits<S>::exact)
        ok = *ds == R.value;
      else
        ok = std::fabs(*ds - R.value) <= 1e-9 * std::max(1.0, std::fabs(R.value));
    }
    if constexpr (scalar_traits<S>::exact) {
      if (!ok) throw std::logic_error("solver produced an inconsistent witness");
    }
    R.stats.verified = ok;
  }

  R.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return R;
}

template <class S>
MapResult<S> solve(const Problem<S>& P, const SolveOptions<S>& opts = {}) {
  return solve(P, validate_and_admit(P), opts);
}

// Re-roots the tree containing `new_root`, leaving other trees untouched.
inline FactorGraph reroot(const FactorGraph& G, int new_root) {
  FactorGraph H = G;
  const int comp = G.component[new_root];
  for (auto& r : H.roots)
    if (G.component[r] == comp) r = new_root;
  std::sort(H.roots.begin(), H.roots.end());
  H.order.clear();
  for (int r : H.roots) {
    std::vector<int> bfs{r};
    H.parent[r] = -1;
    std::vector<bool> seen(G.n, false);
    seen[r] = true;
    for (size_t head = 0; head < bfs.size(); ++head) {
      int v = bfs[head];
      for (int w : G.adj[v]) {
        if (seen[w] || G.component[w] != G.component[r]) continue;
        seen[w] = true;
        H.parent[w] = v;
        bfs.push_back(w);
      }
    }
    H.order.insert(H.order.end(), bfs.rbegin(), bfs.rend());
  }
  return H;
}

}  // namespace cmap

#endif  // CMAP_MPMAP_HPP
