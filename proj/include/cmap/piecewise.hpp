#ifndef CMAP_PIECEWISE_HPP
#define CMAP_PIECEWISE_HPP

#include <cassert>
#include <optional>
#include <vector>

#include "poly.hpp"

namespace cmap {

enum class FuncKind { Poly, ExpPoly };

// Argmax bookkeeping for one eliminated variable: a witness that is either a
// fixed point or affine in the variable of the message carrying the record.
// attained=false marks a supremum only approached near the witness.
template <class S>
struct ArgRecord {
  int var = -1;
  bool is_const = true;
  S c{};
  AffineFunc<S> f;
  bool attained = true;

  static ArgRecord constant(int v, const S& x, bool att) {
    ArgRecord r;
    r.var = v;
    r.is_const = true;
    r.c = x;
    r.attained = att;
    return r;
  }
  static ArgRecord affine(int v, const AffineFunc<S>& f_, bool att) {
    ArgRecord r;
    r.var = v;
    r.is_const = false;
    r.f = f_;
    r.attained = att;
    return r;
  }
  S eval(const S& y) const { return is_const ? c : f.eval(y); }
  friend bool operator==(const ArgRecord& a, const ArgRecord& b) {
    if (a.var != b.var || a.is_const != b.is_const || a.attained != b.attained) return false;
    if (a.is_const) return scalar_traits<S>::eq(a.c, b.c);
    return scalar_traits<S>::eq(a.f.slope, b.f.slope) && scalar_traits<S>::eq(a.f.off, b.f.off);
  }
};

// One piece: body over a (possibly unbounded) interval with explicit endpoint
// closures. lo == hi (both closed) is a point piece. Gaps between pieces mean
// the function is undefined there.
template <class S>
struct Piece {
  Ext<S> lo = Ext<S>::neg_inf(), hi = Ext<S>::pos_inf();
  bool lo_closed = false, hi_closed = false;
  FuncKind kind = FuncKind::Poly;
  UniPoly<S> body;
  std::vector<ArgRecord<S>> args;

  bool is_point() const { return lo.finite() && hi.finite() && scalar_traits<S>::eq(lo.v, hi.v); }
  bool valid() const {
    if (!lo.finite() && lo_closed) return false;
    if (!hi.finite() && hi_closed) return false;
    int c = ext_cmp(lo, hi);
    if (c > 0) return false;
    if (c == 0) return lo_closed && hi_closed;
    return true;
  }
  bool contains(const S& x) const {
    int cl = lo.finite() ? scalar_traits<S>::cmp(lo.v, x) : -1;
    int ch = hi.finite() ? scalar_traits<S>::cmp(x, hi.v) : -1;
    if (cl > 0 || ch > 0) return false;
    if (cl == 0 && !lo_closed) return false;
    if (ch == 0 && !hi_closed) return false;
    return true;
  }
};

// Sorted, pairwise-disjoint pieces of one kind over one variable.
template <class S>
struct PiecewiseFunc {
  int var = -1;
  std::vector<Piece<S>> pieces;

  bool empty() const { return pieces.empty(); }
  FuncKind kind() const { return pieces.empty() ? FuncKind::Poly : pieces[0].kind; }

  const Piece<S>* piece_at(const S& x) const {
    for (const auto& p : pieces)
      if (p.contains(x)) return &p;
    return nullptr;
  }
  std::optional<S> eval(const S& x) const {
    const Piece<S>* p = piece_at(x);
    if (!p) return std::nullopt;
    return p->body.eval(x);
  }

  bool invariants_ok() const {
    for (size_t i = 0; i < pieces.size(); ++i) {
      if (!pieces[i].valid()) return false;
      if (pieces[i].kind != pieces[0].kind) return false;
      if (i > 0) {
        int c = ext_cmp(pieces[i - 1].hi, pieces[i].lo);
        if (c > 0) return false;
        if (c == 0 && pieces[i - 1].hi_closed && pieces[i].lo_closed) return false;
      }
    }
    return true;
  }
};

template <class S>
PiecewiseFunc<S> pw_const(int var, const S& value, Ext<S> lo, Ext<S> hi, bool lo_closed,
                          bool hi_closed, FuncKind kind = FuncKind::Poly) {
  PiecewiseFunc<S> f;
  f.var = var;
  Piece<S> p;
  p.lo = lo;
  p.hi = hi;
  p.lo_closed = lo_closed && lo.finite();
  p.hi_closed = hi_closed && hi.finite();
  p.kind = kind;
  p.body = UniPoly<S>::constant(value);
  if (p.valid()) f.pieces.push_back(std::move(p));
  return f;
}

template <class S>
PiecewiseFunc<S> pw_single(int var, const UniPoly<S>& body, Ext<S> lo, Ext<S> hi, bool lo_closed,
                           bool hi_closed, FuncKind kind = FuncKind::Poly) {
  PiecewiseFunc<S> f;
  f.var = var;
  Piece<S> p;
  p.lo = lo;
  p.hi = hi;
  p.lo_closed = lo_closed && lo.finite();
  p.hi_closed = hi_closed && hi.finite();
  p.kind = kind;
  p.body = body;
  if (p.valid()) f.pieces.push_back(std::move(p));
  return f;
}

namespace pwdetail {

// Intersection of two closed/open intervals; nullopt when empty.
template <class S>
std::optional<Piece<S>> intersect_interval(const Piece<S>& a, const Piece<S>& b) {
  Piece<S> r;
  int cl = ext_cmp(a.lo, b.lo);
  r.lo = cl >= 0 ? a.lo : b.lo;
  r.lo_closed = (cl > 0) ? a.lo_closed : (cl < 0 ? b.lo_closed : (a.lo_closed && b.lo_closed));
  int ch = ext_cmp(a.hi, b.hi);
  r.hi = ch <= 0 ? a.hi : b.hi;
  r.hi_closed = (ch < 0) ? a.hi_closed : (ch > 0 ? b.hi_closed : (a.hi_closed && b.hi_closed));
  if (!r.lo.finite()) r.lo_closed = false;
  if (!r.hi.finite()) r.hi_closed = false;
  if (!r.valid()) return std::nullopt;
  return r;
}

// A representative interior point of a nonempty open/closed interval.
template <class S>
S interior_point(const Ext<S>& lo, const Ext<S>& hi) {
  if (lo.finite() && hi.finite()) return (lo.v + hi.v) / S(2);
  if (lo.finite()) return lo.v + S(1);
  if (hi.finite()) return hi.v - S(1);
  return S{};
}

template <class S>
std::vector<ArgRecord<S>> concat_args(const std::vector<ArgRecord<S>>& a,
                                      const std::vector<ArgRecord<S>>& b) {
  std::vector<ArgRecord<S>> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

}  // namespace pwdetail

// Pointwise product; value semantics follow the kind (ExpPoly bodies add).
// Domain is the intersection of domains; args concatenate.
template <class S>
PiecewiseFunc<S> pw_product(const PiecewiseFunc<S>& a, const PiecewiseFunc<S>& b) {
  PiecewiseFunc<S> out;
  out.var = a.var >= 0 ? a.var : b.var;
  if (a.empty() || b.empty()) return out;
  assert(a.kind() == b.kind() && "mixed PP/PEP products are rejected");
  size_t i = 0, j = 0;
  while (i < a.pieces.size() && j < b.pieces.size()) {
    const Piece<S>& pa = a.pieces[i];
    const Piece<S>& pb = b.pieces[j];
    auto iv = pwdetail::intersect_interval(pa, pb);
    if (iv) {
      Piece<S> r = *iv;
      r.kind = pa.kind;
      r.body = pa.kind == FuncKind::Poly ? poly_mul(pa.body, pb.body) : poly_add(pa.body, pb.body);
      r.body.var = out.var;
      r.args = pwdetail::concat_args(pa.args, pb.args);
      out.pieces.push_back(std::move(r));
    }
    int c = ext_cmp(pa.hi, pb.hi);
    if (c < 0 || (c == 0 && (!pa.hi_closed || pb.hi_closed)))
      ++i;
    else
      ++j;
  }
  assert(out.invariants_ok());
  return out;
}

// Multiply every piece value by a single polynomial factor (exponents add for
// ExpPoly pieces, where the factor body is itself an exponent).
template <class S>
PiecewiseFunc<S> pw_mul_factor(const PiecewiseFunc<S>& a, const UniPoly<S>& factor) {
  PiecewiseFunc<S> out = a;
  for (auto& p : out.pieces) {
    p.body = p.kind == FuncKind::Poly ? poly_mul(p.body, factor) : poly_add(p.body, factor);
    p.body.var = out.var;
  }
  return out;
}

template <class S>
PiecewiseFunc<S> pw_restrict(const PiecewiseFunc<S>& a, Ext<S> lo, Ext<S> hi, bool lo_closed,
                             bool hi_closed) {
  PiecewiseFunc<S> out;
  out.var = a.var;
  Piece<S> window;
  window.lo = lo;
  window.hi = hi;
  window.lo_closed = lo_closed && lo.finite();
  window.hi_closed = hi_closed && hi.finite();
  if (!window.valid()) return out;
  for (const auto& p : a.pieces) {
    auto iv = pwdetail::intersect_interval(p, window);
    if (!iv) continue;
    Piece<S> r = *iv;
    r.kind = p.kind;
    r.body = p.body;
    r.args = p.args;
    out.pieces.push_back(std::move(r));
  }
  return out;
}

// Merge adjacent pieces with identical bodies and compatible closures, and
// absorb point pieces whose value and argmax records agree with a neighbor.
template <class S>
PiecewiseFunc<S> pw_simplify(const PiecewiseFunc<S>& a) {
  using T = scalar_traits<S>;
  PiecewiseFunc<S> out;
  out.var = a.var;
  auto args_equal = [](const std::vector<ArgRecord<S>>& x, const std::vector<ArgRecord<S>>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!(x[i] == y[i])) return false;
    return true;
  };
  // Can a point piece at x be represented by interval piece q?
  auto point_absorbable = [&](const Piece<S>& pt, const Piece<S>& q) {
    const S& x = pt.lo.v;
    if (!T::eq(pt.body.eval(x), q.body.eval(x))) return false;
    if (pt.args.size() != q.args.size()) return false;
    for (size_t i = 0; i < pt.args.size(); ++i) {
      if (pt.args[i].var != q.args[i].var) return false;
      if (!T::eq(pt.args[i].eval(x), q.args[i].eval(x))) return false;
      // a mismatch either loses an exact witness or claims one that is only
      // approached, so the point must keep its own piece
      if (pt.args[i].attained != q.args[i].attained) return false;
    }
    return true;
  };
  for (const auto& p : a.pieces) {
    if (out.pieces.empty()) {
      out.pieces.push_back(p);
      continue;
    }
    Piece<S>& last = out.pieces.back();
    bool touching = last.hi.finite() && p.lo.finite() && T::eq(last.hi.v, p.lo.v);
    if (touching && !(last.hi_closed && p.lo_closed)) {
      bool joined = last.hi_closed || p.lo_closed;
      if (p.is_point() && !last.is_point() && p.lo_closed && !last.hi_closed &&
          point_absorbable(p, last)) {
        last.hi_closed = true;  // absorb point into left neighbor
        continue;
      }
      if (last.is_point() && !p.is_point() && last.hi_closed && !p.lo_closed &&
          point_absorbable(last, p)) {
        Piece<S> grown = p;  // absorb point into right neighbor
        grown.lo_closed = true;
        out.pieces.back() = std::move(grown);
        continue;
      }
      if (joined && !last.is_point() && !p.is_point() && last.kind == p.kind &&
          last.body == p.body && args_equal(last.args, p.args)) {
        last.hi = p.hi;
        last.hi_closed = p.hi_closed;
        continue;
      }
    }
    out.pieces.push_back(p);
  }
  // A second pass catches interval merges enabled by point absorption.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < out.pieces.size(); ++i) {
      Piece<S>& l = out.pieces[i];
      Piece<S>& r = out.pieces[i + 1];
      bool touching = l.hi.finite() && r.lo.finite() && T::eq(l.hi.v, r.lo.v);
      if (!touching || l.is_point() || r.is_point()) continue;
      if ((l.hi_closed ? 1 : 0) + (r.lo_closed ? 1 : 0) != 1) continue;
      if (l.kind != r.kind || !(l.body == r.body) || !args_equal(l.args, r.args)) continue;
      l.hi = r.hi;
      l.hi_closed = r.hi_closed;
      out.pieces.erase(out.pieces.begin() + i + 1);
      changed = true;
      break;
    }
  }
  assert(out.invariants_ok());
  return out;
}

// Pointwise maximum over any number of functions of the same kind. Breaks are
// placed at all piece endpoints and at roots of pairwise body differences;
// winners decided by exact evaluation, ties to the lowest input index.
template <class S>
PiecewiseFunc<S> pw_max(const std::vector<const PiecewiseFunc<S>*>& fs) {
  using T = scalar_traits<S>;
  PiecewiseFunc<S> out;
  FuncKind kind = FuncKind::Poly;
  bool kind_set = false;
  for (auto* f : fs) {
    if (!f->empty()) {
      if (out.var < 0) out.var = f->var;
      if (!kind_set) {
        kind = f->kind();
        kind_set = true;
      }
      assert(f->kind() == kind && "mixed PP/PEP max is rejected");
    }
  }

  // collect finite cut values
  std::vector<S> cuts;
  for (auto* f : fs)
    for (const auto& p : f->pieces) {
      if (p.lo.finite()) cuts.push_back(p.lo.v);
      if (p.hi.finite()) cuts.push_back(p.hi.v);
    }
  std::sort(cuts.begin(), cuts.end(), [](const S& x, const S& y) { return T::cmp(x, y) < 0; });
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](const S& x, const S& y) { return T::eq(x, y); }),
             cuts.end());

  struct Active {
    size_t input;
    const Piece<S>* piece;
  };

  auto emit_point = [&](const S& x) {
    const Piece<S>* best = nullptr;
    for (auto* f : fs) {
      const Piece<S>* p = f->piece_at(x);
      if (!p) continue;
      if (!best || T::cmp(p->body.eval(x), best->body.eval(x)) > 0) best = p;
    }
    if (!best) return;
    Piece<S> r;
    r.lo = Ext<S>(x);
    r.hi = Ext<S>(x);
    r.lo_closed = r.hi_closed = true;
    r.kind = kind;
    r.body = best->body;
    r.args = best->args;
    out.pieces.push_back(std::move(r));
  };

  auto emit_open_span = [&](const Ext<S>& L, const Ext<S>& R) {
    if (ext_cmp(L, R) >= 0) return;
    std::vector<Active> act;
    S probe = pwdetail::interior_point(L, R);
    for (size_t i = 0; i < fs.size(); ++i) {
      const Piece<S>* p = fs[i]->piece_at(probe);
      if (p) act.push_back({i, p});
    }
    if (act.empty()) return;
    // refine by pairwise body-difference roots strictly inside (L, R)
    std::vector<S> sub;
    for (size_t i = 0; i < act.size(); ++i)
      for (size_t j = i + 1; j < act.size(); ++j) {
        if (act[i].piece->body == act[j].piece->body) continue;
        UniPoly<S> diff = poly_sub(act[i].piece->body, act[j].piece->body);
        for (const auto& r : poly_roots_in(diff, L, R)) {
          if (L.finite() && T::eq(r, L.v)) continue;
          if (R.finite() && T::eq(r, R.v)) continue;
          sub.push_back(r);
        }
      }
    std::sort(sub.begin(), sub.end(), [](const S& x, const S& y) { return T::cmp(x, y) < 0; });
    sub.erase(std::unique(sub.begin(), sub.end(), [](const S& x, const S& y) { return T::eq(x, y); }),
              sub.end());

    std::vector<Ext<S>> rail{L};
    for (const auto& s : sub) rail.push_back(Ext<S>(s));
    rail.push_back(R);
    for (size_t k = 0; k + 1 < rail.size(); ++k) {
      S mid = pwdetail::interior_point(rail[k], rail[k + 1]);
      const Active* best = nullptr;
      for (const auto& acand : act) {
        if (!best || T::cmp(acand.piece->body.eval(mid), best->piece->body.eval(mid)) > 0)
          best = &acand;
      }
      Piece<S> r;
      r.lo = rail[k];
      r.hi = rail[k + 1];
      r.lo_closed = r.hi_closed = false;
      r.kind = kind;
      r.body = best->piece->body;
      r.args = best->piece->args;
      out.pieces.push_back(std::move(r));
      if (k + 2 < rail.size()) emit_point(rail[k + 1].v);  // interior subcut point
    }
  };

  Ext<S> prev = Ext<S>::neg_inf();
  for (const auto& c : cuts) {
    emit_open_span(prev, Ext<S>(c));
    emit_point(c);
    prev = Ext<S>(c);
  }
  emit_open_span(prev, Ext<S>::pos_inf());
  return pw_simplify(out);
}

template <class S>
PiecewiseFunc<S> pw_max(const PiecewiseFunc<S>& a, const PiecewiseFunc<S>& b) {
  return pw_max(std::vector<const PiecewiseFunc<S>*>{&a, &b});
}

// Global supremum of the represented values. For ExpPoly the comparison runs
// on exponents (exp is monotone): value_body is then the log of the supremum.
template <class S>
struct FinalMax {
  bool defined = false;
  bool unbounded = false;
  S value_body{};
  S arg{};
  bool attained = true;
  size_t piece_idx = 0;
};

template <class S>
FinalMax<S> pw_final_max(const PiecewiseFunc<S>& f) {
  using T = scalar_traits<S>;
  FinalMax<S> best;
  auto consider = [&](const S& v, const S& x, bool att, size_t idx) {
    if (!best.defined) {
      best = {true, false, v, x, att, idx};
      return;
    }
    int c = T::cmp(v, best.value_body);
    if (c > 0 || (c == 0 && att && !best.attained)) best = {true, false, v, x, att, idx};
  };
  for (size_t i = 0; i < f.pieces.size(); ++i) {
    const Piece<S>& p = f.pieces[i];
    const UniPoly<S>& b = p.body;
    if (b.is_const()) {
      S x;
      if (p.lo.finite() && p.lo_closed)
        x = p.lo.v;
      else if (p.hi.finite() && p.hi_closed)
        x = p.hi.v;
      else
        x = pwdetail::interior_point(p.lo, p.hi);
      consider(b.const_value(), x, true, i);
      continue;
    }
    // unbounded ends
    int lead = T::cmp(b.c.back(), S{});
    if (!p.hi.finite() && lead > 0) {
      best.defined = true;
      best.unbounded = true;
      return best;
    }
    if (!p.lo.finite() && (b.degree() % 2 == 0 ? lead > 0 : lead < 0)) {
      best.defined = true;
      best.unbounded = true;
      return best;
    }
    if (p.lo.finite()) consider(b.eval(p.lo.v), p.lo.v, p.lo_closed, i);
    if (p.hi.finite() && !(p.is_point())) consider(b.eval(p.hi.v), p.hi.v, p.hi_closed, i);
    for (const auto& r : poly_roots_in(poly_derivative(b), p.lo, p.hi))
      if (p.contains(r)) consider(b.eval(r), r, true, i);
  }
  return best;
}

template <class S>
PiecewiseFunc<S> pw_log(const PiecewiseFunc<S>& f) {
  PiecewiseFunc<S> out = f;
  for (auto& p : out.pieces) {
    assert(p.kind == FuncKind::ExpPoly && "pw_log is defined on PEP only");
    p.kind = FuncKind::Poly;
  }
  return out;
}

template <class S>
PiecewiseFunc<S> pw_exp(const PiecewiseFunc<S>& f) {
  PiecewiseFunc<S> out = f;
  for (auto& p : out.pieces) {
    assert(p.kind == FuncKind::Poly && "pw_exp is defined on PP only");
    p.kind = FuncKind::ExpPoly;
  }
  return out;
}

}  // namespace cmap

#endif  // CMAP_PIECEWISE_HPP
