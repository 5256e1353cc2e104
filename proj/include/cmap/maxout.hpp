#ifndef CMAP_MAXOUT_HPP
#define CMAP_MAXOUT_HPP

#include <cassert>
#include <optional>
#include <vector>

#include "piecewise.hpp"

namespace cmap {

// m(y) = sup{ q(x) : l(y) <= x <= u(y) } for piecewise q and affine bounds.
// The supremum semantics include one-sided limits at open piece endpoints;
// pieces where the sup is only approached carry attained=false witnesses.
// Strict flags open the window on that side: the bound value is excluded
// and any sup realized there is a limit, never an attained witness.

namespace mo {

// One-sided behavior of q at a point: defined value plus left/right limits,
// each with the realizing piece index.
template <class S>
struct SideInfo {
  std::optional<S> value, left, right;
  int value_piece = -1, left_piece = -1, right_piece = -1;
};

template <class S>
SideInfo<S> sides_at(const PiecewiseFunc<S>& q, const S& x) {
  using T = scalar_traits<S>;
  SideInfo<S> s;
  for (size_t i = 0; i < q.pieces.size(); ++i) {
    const Piece<S>& p = q.pieces[i];
    int cl = p.lo.finite() ? T::cmp(p.lo.v, x) : -1;  // lo vs x
    int ch = p.hi.finite() ? T::cmp(x, p.hi.v) : -1;  // x vs hi
    if (cl > 0 || ch > 0) continue;
    if (p.contains(x)) {
      s.value = p.body.eval(x);
      s.value_piece = (int)i;
    }
    if (cl < 0) {  // covers an interval just below x
      s.left = p.body.eval(x);
      s.left_piece = (int)i;
    }
    if (ch < 0) {  // covers an interval just above x
      s.right = p.body.eval(x);
      s.right_piece = (int)i;
    }
  }
  return s;
}

template <class S>
struct VEntry {
  S b;
  SideInfo<S> info;
};

// Candidate interior points: piece endpoints plus interior extremes of each
// body, with the one-sided limit data the interior term needs.
template <class S>
std::vector<VEntry<S>> build_ventries(const PiecewiseFunc<S>& q) {
  using T = scalar_traits<S>;
  std::vector<S> pts;
  for (const auto& p : q.pieces) {
    if (p.lo.finite()) pts.push_back(p.lo.v);
    if (p.hi.finite()) pts.push_back(p.hi.v);
    for (const auto& r : poly_roots_in(poly_derivative(p.body), p.lo, p.hi)) pts.push_back(r);
  }
  std::sort(pts.begin(), pts.end(), [](const S& a, const S& b) { return T::cmp(a, b) < 0; });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const S& a, const S& b) { return T::eq(a, b); }),
            pts.end());
  std::vector<VEntry<S>> out;
  out.reserve(pts.size());
  for (const auto& b : pts) out.push_back({b, sides_at(q, b)});
  return out;
}

// Feasibility geometry of l(y) <= u(y).
template <class S>
struct BoundGeometry {
  bool infeasible = false;      // parallel with u strictly below l
  std::optional<S> ys;          // single intersection (finite C_bounds element)
  bool ys_starts = false;       // feasible side is [ys, inf) rather than (-inf, ys]
  Ext<S> rail_lo = Ext<S>::neg_inf(), rail_hi = Ext<S>::pos_inf();
};

template <class S>
BoundGeometry<S> analyze_bounds(const AffineFunc<S>& l, const AffineFunc<S>& u, bool strict) {
  using T = scalar_traits<S>;
  BoundGeometry<S> g;
  S ds = u.slope - l.slope;
  S doff = u.off - l.off;
  if (T::is_zero(ds)) {
    int c = T::cmp(doff, S{});
    if (c < 0 || (c == 0 && strict)) g.infeasible = true;
    return g;
  }
  S ys = (S{} - doff) / ds;
  g.ys = ys;
  if (T::cmp(ds, S{}) > 0) {  // u - l increasing: feasible from ys on
    g.ys_starts = true;
    g.rail_lo = Ext<S>(ys);
  } else {
    g.ys_starts = false;
    g.rail_hi = Ext<S>(ys);
  }
  return g;
}

template <class S>
struct InnerMax {
  S value{};
  S witness{};
  int piece = -1;   // piece in q realizing the value (for deep args)
  bool attained = true;
};

// Best interior candidate usable across the whole open cell (A, B).
template <class S>
std::optional<InnerMax<S>> inner_max(const std::vector<VEntry<S>>& ventries, const AffineFunc<S>& l,
                                     const AffineFunc<S>& u, const Ext<S>& A, const Ext<S>& B,
                                     bool l_strict, bool u_strict) {
  using T = scalar_traits<S>;
  Ext<S> lp = ext_max(l.eval_ext(A), l.eval_ext(B));
  Ext<S> up = ext_min(u.eval_ext(A), u.eval_ext(B));
  std::optional<InnerMax<S>> best;
  for (const auto& e : ventries) {
    Ext<S> eb(e.b);
    if (ext_cmp(lp, eb) > 0 || ext_cmp(eb, up) > 0) continue;
    bool left_edge = lp.finite() && T::eq(e.b, lp.v) && l.is_const();
    bool right_edge = up.finite() && T::eq(e.b, up.v) && u.is_const();
    // At a constant-bound edge only the inward limit (and, for a non-strict
    // bound, the point value) lies inside; elsewhere both limits apply.
    std::optional<S> cand;
    int piece = -1;
    bool att = false;
    auto take = [&](const std::optional<S>& v, int pc, bool attained) {
      if (!v) return;
      if (!cand || T::cmp(*v, *cand) > 0 || (T::cmp(*v, *cand) == 0 && attained && !att)) {
        cand = v;
        piece = pc;
        att = attained;
      }
    };
    if (!(left_edge && l_strict) && !(right_edge && u_strict))
      take(e.info.value, e.info.value_piece, true);
    if (!(left_edge && right_edge)) {
      if (!left_edge) take(e.info.left, e.info.left_piece, false);
      if (!right_edge) take(e.info.right, e.info.right_piece, false);
    }
    if (!cand) continue;
    if (!best || T::cmp(*cand, best->value) > 0)
      best = InnerMax<S>{*cand, e.b, piece, att};
  }
  return best;
}

template <class S>
struct ComposedSide {
  UniPoly<S> poly;  // q-piece body composed with the bound
  int piece = -1;
};

// Composition of q with an affine bound over one open cell; nullopt when the
// bound's image lies in a gap of q for the whole cell. For a strict bound the
// window excludes the bound itself, so the piece realizing the inward limit
// is composed instead of the piece containing the bound (these differ only
// when the bound sits exactly on a q breakpoint, i.e. for constant bounds).
template <class S>
std::optional<ComposedSide<S>> compose_on_cell(const PiecewiseFunc<S>& q, const AffineFunc<S>& f,
                                               const Ext<S>& A, const Ext<S>& B, int inward) {
  S ymid = pwdetail::interior_point(A, B);
  S x = f.eval(ymid);
  int idx = -1;
  if (inward == 0) {
    const Piece<S>* p = q.piece_at(x);
    if (p) idx = (int)(p - q.pieces.data());
  } else {
    SideInfo<S> s = sides_at(q, x);
    idx = inward > 0 ? s.right_piece : s.left_piece;
  }
  if (idx < 0) return std::nullopt;
  ComposedSide<S> c;
  c.poly = poly_compose_affine(q.pieces[idx].body, f);
  c.piece = idx;
  return c;
}

}  // namespace mo

// Piece-count cap: with m input pieces of degree at most qd, the output of
// max_out never exceeds 8*m*qd + 4*m + 4 pieces.
inline size_t max_out_piece_bound(size_t m, int qdeg) {
  size_t qd = qdeg < 0 ? 0 : (size_t)qdeg;
  return 8 * m * qd + 4 * m + 4;
}

template <class S>
PiecewiseFunc<S> max_out_pp(const PiecewiseFunc<S>& q, const AffineFunc<S>& l,
                            const AffineFunc<S>& u, bool l_strict = false,
                            bool u_strict = false) {
  using T = scalar_traits<S>;
  assert(l.var == u.var || l.is_const() || u.is_const());
  int out_var = l.var >= 0 ? l.var : u.var;
  int elim_var = q.var;
  const int l_inward = l_strict ? 1 : 0, u_inward = u_strict ? -1 : 0;
  PiecewiseFunc<S> out;
  out.var = out_var;
  if (q.empty()) return out;
  assert(q.kind() == FuncKind::Poly && "max_out_pp runs on PP; PEP goes through max_out");

  mo::BoundGeometry<S> geom = mo::analyze_bounds(l, u, l_strict || u_strict);
  if (geom.infeasible) return out;
  auto ventries = mo::build_ventries(q);

  // break collection: preimages of candidate points under non-constant bounds
  std::vector<S> cuts;
  auto in_rails = [&](const S& y) {  // strict: rail points get their own pieces
    Ext<S> ey(y);
    return ext_cmp(geom.rail_lo, ey) < 0 && ext_cmp(ey, geom.rail_hi) < 0;
  };
  for (const AffineFunc<S>* f : {&l, &u}) {
    if (f->is_const()) continue;
    for (const auto& e : ventries) {
      S y = (e.b - f->off) / f->slope;
      if (in_rails(y)) cuts.push_back(y);
    }
  }
  auto sort_unique = [](std::vector<S>& v) {
    std::sort(v.begin(), v.end(), [](const S& a, const S& b) { return T::cmp(a, b) < 0; });
    v.erase(std::unique(v.begin(), v.end(), [](const S& a, const S& b) { return T::eq(a, b); }),
            v.end());
  };
  sort_unique(cuts);

  // switch points: roots of (q o u) - (q o l) inside each pre-cell
  {
    std::vector<Ext<S>> pre{geom.rail_lo};
    for (const auto& c : cuts) pre.push_back(Ext<S>(c));
    pre.push_back(geom.rail_hi);
    std::vector<S> sw;
    for (size_t k = 0; k + 1 < pre.size(); ++k) {
      if (ext_cmp(pre[k], pre[k + 1]) >= 0) continue;
      auto cl = mo::compose_on_cell(q, l, pre[k], pre[k + 1], l_inward);
      auto cu = mo::compose_on_cell(q, u, pre[k], pre[k + 1], u_inward);
      if (!cl || !cu) continue;
      UniPoly<S> diff = poly_sub(cu->poly, cl->poly);
      for (const auto& r : poly_roots_in(diff, pre[k], pre[k + 1])) {
        if (pre[k].finite() && T::eq(r, pre[k].v)) continue;
        if (pre[k + 1].finite() && T::eq(r, pre[k + 1].v)) continue;
        sw.push_back(r);
      }
    }
    for (auto& s : sw) cuts.push_back(s);
    sort_unique(cuts);
  }

  // exact pointwise supremum at one y; also yields the argmax witness
  auto point_sup = [&](const S& y) -> std::optional<mo::InnerMax<S>> {
    S xl = l.eval(y), xu = u.eval(y);
    if (T::cmp(xl, xu) > 0) return std::nullopt;
    if (T::eq(xl, xu) && (l_strict || u_strict)) return std::nullopt;
    std::optional<mo::InnerMax<S>> best;
    auto take = [&](const std::optional<S>& v, int piece, const S& wit, bool att) {
      if (!v) return;
      if (!best || T::cmp(*v, best->value) > 0 ||
          (T::cmp(*v, best->value) == 0 && att && !best->attained))
        best = mo::InnerMax<S>{*v, wit, piece, att};
    };
    mo::SideInfo<S> sl = mo::sides_at(q, xl);
    if (T::eq(xl, xu)) {
      take(sl.value, sl.value_piece, xl, true);
      return best;
    }
    mo::SideInfo<S> su = mo::sides_at(q, xu);
    if (!l_strict) take(sl.value, sl.value_piece, xl, true);
    take(sl.right, sl.right_piece, xl, false);
    if (!u_strict) take(su.value, su.value_piece, xu, true);
    take(su.left, su.left_piece, xu, false);
    for (const auto& e : ventries) {
      if (T::cmp(xl, e.b) < 0 && T::cmp(e.b, xu) < 0) {
        take(e.info.value, e.info.value_piece, e.b, true);
        take(e.info.left, e.info.left_piece, e.b, false);
        take(e.info.right, e.info.right_piece, e.b, false);
      }
    }
    return best;
  };

  // deep args of a q-piece after substituting x = g(y) or x = witness
  auto compose_deep_const = [&](int piece, const S& x) {
    std::vector<ArgRecord<S>> deep;
    if (piece < 0) return deep;
    for (const auto& a : q.pieces[piece].args)
      deep.push_back(ArgRecord<S>::constant(a.var, a.eval(x), a.attained));
    return deep;
  };
  auto compose_deep_affine = [&](int piece, const AffineFunc<S>& g) {
    std::vector<ArgRecord<S>> deep;
    if (piece < 0) return deep;
    for (const auto& a : q.pieces[piece].args) {
      if (a.is_const)
        deep.push_back(a);
      else
        deep.push_back(ArgRecord<S>::affine(a.var, a.f.compose(g), a.attained));
    }
    return deep;
  };

  auto emit_point = [&](const S& y) {
    auto ps = point_sup(y);
    if (!ps) return;
    Piece<S> r;
    r.lo = Ext<S>(y);
    r.hi = Ext<S>(y);
    r.lo_closed = r.hi_closed = true;
    r.kind = FuncKind::Poly;
    r.body = UniPoly<S>::constant(ps->value);
    r.body.var = out_var;
    r.args = compose_deep_const(ps->piece, ps->witness);
    r.args.push_back(ArgRecord<S>::constant(elim_var, ps->witness, ps->attained));
    out.pieces.push_back(std::move(r));
  };

  auto emit_cell = [&](const Ext<S>& A, const Ext<S>& B) {
    if (ext_cmp(A, B) >= 0) return;
    auto cl = mo::compose_on_cell(q, l, A, B, l_inward);
    auto cu = mo::compose_on_cell(q, u, A, B, u_inward);
    auto inner = mo::inner_max(ventries, l, u, A, B, l_strict, u_strict);

    // dominance between the two boundary compositions on this cell
    std::optional<UniPoly<S>> qhat;
    bool side_is_u = false;
    int qhat_piece = -1;
    if (cl && cu) {
      UniPoly<S> diff = poly_sub(cu->poly, cl->poly);
      int sign = 0;
      Ext<S> left = A;
      S probe = pwdetail::interior_point(A, B);
      for (int tries = 0; tries < 48 && sign == 0; ++tries) {
        sign = T::cmp(diff.eval(probe), S{});
        probe = pwdetail::interior_point(left, Ext<S>(probe));
      }
      if (sign > 0 || (sign == 0 && l_strict && !u_strict)) {
        qhat = cu->poly;
        side_is_u = true;
        qhat_piece = cu->piece;
      } else {  // ties prefer the lower bound, or whichever side is attained
        qhat = cl->poly;
        qhat_piece = cl->piece;
      }
    } else if (cl) {
      qhat = cl->poly;
      qhat_piece = cl->piece;
    } else if (cu) {
      qhat = cu->poly;
      side_is_u = true;
      qhat_piece = cu->piece;
    }

    if (!qhat && !inner) return;  // q undefined over the whole window here

    bool body_attained = !(side_is_u ? u_strict : l_strict);
    auto push_body = [&](const Ext<S>& a, const Ext<S>& b) {
      Piece<S> r;
      r.lo = a;
      r.hi = b;
      r.lo_closed = r.hi_closed = false;
      r.kind = FuncKind::Poly;
      r.body = *qhat;
      r.body.var = out_var;
      const AffineFunc<S>& g = side_is_u ? u : l;
      r.args = compose_deep_affine(qhat_piece, g);
      r.args.push_back(ArgRecord<S>::affine(elim_var, g, body_attained));
      out.pieces.push_back(std::move(r));
    };
    auto push_flat = [&](const Ext<S>& a, const Ext<S>& b) {
      Piece<S> r;
      r.lo = a;
      r.hi = b;
      r.lo_closed = r.hi_closed = false;
      r.kind = FuncKind::Poly;
      r.body = UniPoly<S>::constant(inner->value);
      r.body.var = out_var;
      r.args = compose_deep_const(inner->piece, inner->witness);
      r.args.push_back(ArgRecord<S>::constant(elim_var, inner->witness, inner->attained));
      out.pieces.push_back(std::move(r));
    };

    if (!qhat) {
      push_flat(A, B);
      return;
    }
    if (!inner) {
      push_body(A, B);
      return;
    }
    // split where the boundary composition crosses the interior constant
    UniPoly<S> diff = poly_sub(*qhat, UniPoly<S>::constant(inner->value));
    std::vector<S> xs;
    for (const auto& r : poly_roots_in(diff, A, B)) {
      if (A.finite() && T::eq(r, A.v)) continue;
      if (B.finite() && T::eq(r, B.v)) continue;
      xs.push_back(r);
    }
    std::vector<Ext<S>> rail{A};
    for (const auto& x : xs) rail.push_back(Ext<S>(x));
    rail.push_back(B);
    for (size_t k = 0; k + 1 < rail.size(); ++k) {
      S mid = pwdetail::interior_point(rail[k], rail[k + 1]);
      int c = T::cmp(qhat->eval(mid), inner->value);
      if (c > 0 || (c == 0 && (body_attained || !inner->attained)))
        push_body(rail[k], rail[k + 1]);
      else
        push_flat(rail[k], rail[k + 1]);
      if (k + 2 < rail.size()) emit_point(rail[k + 1].v);
    }
  };

  std::vector<Ext<S>> rail{geom.rail_lo};
  for (const auto& c : cuts) rail.push_back(Ext<S>(c));
  rail.push_back(geom.rail_hi);
  for (size_t k = 0; k + 1 < rail.size(); ++k) {
    if (rail[k].finite()) emit_point(rail[k].v);
    emit_cell(rail[k], rail[k + 1]);
  }
  if (rail.back().finite()) emit_point(rail.back().v);

  out = pw_simplify(out);
#ifndef NDEBUG
  {
    int qd = 0;
    for (const auto& p : q.pieces) qd = std::max(qd, p.body.degree());
    assert(out.pieces.size() <= max_out_piece_bound(q.pieces.size(), qd));
  }
#endif
  return out;
}

// Kind-dispatching wrapper: PEP inputs run in log space on the exponents.
template <class S>
PiecewiseFunc<S> max_out(const PiecewiseFunc<S>& q, const AffineFunc<S>& l,
                         const AffineFunc<S>& u, bool l_strict = false, bool u_strict = false) {
  if (q.empty() || q.kind() == FuncKind::Poly)
    return max_out_pp(q, l, u, l_strict, u_strict);
  return pw_exp(max_out_pp(pw_log(q), l, u, l_strict, u_strict));
}

}  // namespace cmap

#endif  // CMAP_MAXOUT_HPP
