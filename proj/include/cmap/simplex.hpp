#ifndef CMAP_SIMPLEX_HPP
#define CMAP_SIMPLEX_HPP

#include <map>
#include <set>
#include <vector>

#include "atoms.hpp"
#include "scalar.hpp"

namespace cmap {
namespace lp {

// Dense exact-rational two-phase simplex with Bland's rule. Small systems
// only; everything the toolkit proves (guard exclusivity, cell feasibility,
// polytope boxes) runs through here, so exactness beats speed.

struct Row {
  std::map<int, Rational> a;
  Rational b;
  bool eq = false;  // a*x == b instead of <=
};

enum class Status { Infeasible, Unbounded, Optimal };

struct Result {
  Status status = Status::Infeasible;
  Rational value;
  std::map<int, Rational> point;  // structural assignment at the optimum
};

class Tableau {
 public:
  Tableau(const std::vector<Row>& rows, const std::vector<int>& vars,
          const std::set<int>& nonneg) {
    for (int v : vars) {
      col_of_pos_[v] = ncols_;
      ++ncols_;
      if (!nonneg.count(v)) {
        col_of_neg_[v] = ncols_;
        ++ncols_;
      }
    }
    size_t nslack = 0;
    for (const auto& r : rows)
      if (!r.eq) ++nslack;
    slack0_ = ncols_;
    ncols_ += nslack;
    art0_ = ncols_;

    size_t si = slack0_;
    for (const auto& r : rows) {
      std::vector<Rational> t(ncols_ + 1, Rational(0));
      for (const auto& [v, c] : r.a) {
        t[col_of_pos_[v]] = t[col_of_pos_[v]] + c;
        auto it = col_of_neg_.find(v);
        if (it != col_of_neg_.end()) t[it->second] = t[it->second] - c;
      }
      long slack_col = -1;
      if (!r.eq) {
        slack_col = (long)si++;
        t[slack_col] = Rational(1);
      }
      t.back() = r.b;
      if (t.back() < Rational(0))
        for (auto& x : t) x = Rational(0) - x;
      if (slack_col >= 0 && t[slack_col] == Rational(1)) {
        basis_.push_back(slack_col);
      } else {
        t.insert(t.end() - 1, Rational(1));  // fresh artificial before rhs
        for (auto& row : tab_) row.insert(row.end() - 1, Rational(0));
        basis_.push_back((long)ncols_);
        ++ncols_;
      }
      tab_.push_back(std::move(t));
    }
  }

  bool run_phase1() {
    if (art0_ == ncols_) return true;
    std::vector<Rational> c(ncols_, Rational(0));
    for (size_t j = art0_; j < ncols_; ++j) c[j] = Rational(-1);
    load_objective(c);
    Status st = pivot_loop(art0_);
    assert(st == Status::Optimal);
    (void)st;
    if (!(obj_.back() == Rational(0))) return false;
    // drive remaining artificials out of the basis
    for (size_t i = 0; i < tab_.size(); ++i) {
      if ((size_t)basis_[i] < art0_) continue;
      for (size_t j = 0; j < art0_; ++j) {
        if (!(tab_[i][j] == Rational(0))) {
          pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  Status run_phase2(const std::map<int, Rational>& obj) {
    std::vector<Rational> c(ncols_, Rational(0));
    for (const auto& [v, k] : obj) {
      c[col_of_pos_.at(v)] = k;
      auto it = col_of_neg_.find(v);
      if (it != col_of_neg_.end()) c[it->second] = Rational(0) - k;
    }
    load_objective(c);
    return pivot_loop(art0_);
  }

  // the objective row carries reduced costs; its rhs is the negated value
  Rational objective_value() const { return Rational(0) - obj_.back(); }

  std::map<int, Rational> point() const {
    std::vector<Rational> col_val(ncols_, Rational(0));
    for (size_t i = 0; i < tab_.size(); ++i) col_val[basis_[i]] = tab_[i].back();
    std::map<int, Rational> x;
    for (const auto& [v, j] : col_of_pos_) {
      Rational val = col_val[j];
      auto it = col_of_neg_.find(v);
      if (it != col_of_neg_.end()) val = val - col_val[it->second];
      x[v] = val;
    }
    return x;
  }

 private:
  void load_objective(const std::vector<Rational>& c) {
    obj_.assign(ncols_ + 1, Rational(0));
    for (size_t j = 0; j < ncols_; ++j) obj_[j] = c[j];
    // basic columns are unit vectors, so one sweep restores reduced costs
    for (size_t i = 0; i < tab_.size(); ++i) {
      Rational cb = c[basis_[i]];
      if (cb == Rational(0)) continue;
      for (size_t j = 0; j <= ncols_; ++j) obj_[j] = obj_[j] - cb * tab_[i][j];
    }
  }

  // Bland's rule both ways; artificial columns never enter past art_limit.
  Status pivot_loop(size_t art_limit) {
    for (;;) {
      size_t enter = ncols_;
      for (size_t j = 0; j < art_limit; ++j) {
        if (obj_[j] > Rational(0)) {
          enter = j;
          break;
        }
      }
      if (enter == ncols_) return Status::Optimal;
      size_t leave = tab_.size();
      Rational best;
      for (size_t i = 0; i < tab_.size(); ++i) {
        if (!(tab_[i][enter] > Rational(0))) continue;
        Rational ratio = tab_[i].back() / tab_[i][enter];
        if (leave == tab_.size() || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == tab_.size()) return Status::Unbounded;
      pivot(leave, enter);
    }
  }

  void pivot(size_t row, size_t col) {
    Rational p = tab_[row][col];
    for (auto& x : tab_[row]) x = x / p;
    for (size_t i = 0; i < tab_.size(); ++i) {
      if (i == row) continue;
      Rational f = tab_[i][col];
      if (f == Rational(0)) continue;
      for (size_t j = 0; j <= ncols_; ++j) tab_[i][j] = tab_[i][j] - f * tab_[row][j];
    }
    if (!obj_.empty()) {
      Rational f = obj_[col];
      if (!(f == Rational(0)))
        for (size_t j = 0; j <= ncols_; ++j) obj_[j] = obj_[j] - f * tab_[row][j];
    }
    basis_[row] = (long)col;
  }

  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> obj_;
  std::vector<long> basis_;
  std::map<int, size_t> col_of_pos_, col_of_neg_;
  size_t ncols_ = 0, slack0_ = 0, art0_ = 0;
};

inline std::vector<int> collect_vars(const std::vector<Row>& rows,
                                     const std::map<int, Rational>& obj) {
  std::set<int> s;
  for (const auto& r : rows)
    for (const auto& [v, c] : r.a) s.insert(v);
  for (const auto& [v, c] : obj) s.insert(v);
  return {s.begin(), s.end()};
}

inline Result maximize(const std::vector<Row>& rows, const std::map<int, Rational>& obj,
                       const std::set<int>& nonneg = {}) {
  Tableau t(rows, collect_vars(rows, obj), nonneg);
  Result res;
  if (!t.run_phase1()) return res;  // Infeasible
  res.status = t.run_phase2(obj);
  if (res.status == Status::Optimal) {
    res.value = t.objective_value();
    res.point = t.point();
  }
  return res;
}

}  // namespace lp

inline lp::Row atom_row(const LinearAtom& a) {
  lp::Row r;
  for (const auto& [v, c] : a.coeffs) r.a[v] = c;
  r.b = a.rhs;
  r.eq = a.op == LinearAtom::Eq;
  return r;
}

// Exact satisfiability of a conjunction of linear atoms, honoring strict
// inequalities: each strict row is slackened by a shared margin d <= 1 and
// the margin is maximized; the open region is nonempty iff max d > 0.
inline bool lra_feasible(const std::vector<LinearAtom>& atoms) {
  std::vector<lp::Row> rows;
  bool any_strict = false;
  int delta = -1;
  for (const auto& a : atoms) {
    for (const auto& [v, c] : a.coeffs) delta = std::max(delta, v);
  }
  ++delta;
  for (const auto& a : atoms) {
    lp::Row r = atom_row(a);
    if (a.op == LinearAtom::Lt) {
      r.a[delta] = Rational(1);
      any_strict = true;
    }
    rows.push_back(std::move(r));
  }
  if (!any_strict) {
    lp::Result res = lp::maximize(rows, {});
    return res.status != lp::Status::Infeasible;
  }
  lp::Row cap;
  cap.a[delta] = Rational(1);
  cap.b = Rational(1);
  rows.push_back(cap);
  lp::Result res = lp::maximize(rows, {{delta, Rational(1)}}, {delta});
  return res.status == lp::Status::Optimal && res.value > Rational(0);
}

// Range of one variable over the closure of the atom set. Requires a
// feasible closure; strict ops relax to their closures.
inline std::pair<Ext<Rational>, Ext<Rational>> lra_var_range(const std::vector<LinearAtom>& atoms,
                                                             int var) {
  std::vector<lp::Row> rows;
  for (const auto& a : atoms) rows.push_back(atom_row(a));
  auto one = [&](const Rational& sign) -> Ext<Rational> {
    lp::Result res = lp::maximize(rows, {{var, sign}});
    assert(res.status != lp::Status::Infeasible);
    if (res.status == lp::Status::Unbounded)
      return sign > Rational(0) ? Ext<Rational>::pos_inf() : Ext<Rational>::neg_inf();
    return Ext<Rational>(sign * res.value);
  };
  return {one(Rational(-1)), one(Rational(1))};
}

// A rational point well inside the region when one exists: pushes every
// inequality off its boundary by a common L1-scaled margin, then verifies
// the strict atoms. Equalities stay tight.
inline std::optional<std::map<int, Rational>> lra_interior_point(
    const std::vector<LinearAtom>& atoms) {
  int margin = -1;
  for (const auto& a : atoms)
    for (const auto& [v, c] : a.coeffs) margin = std::max(margin, v);
  ++margin;
  std::vector<lp::Row> rows;
  for (const auto& a : atoms) {
    lp::Row r = atom_row(a);
    if (a.op != LinearAtom::Eq) {
      Rational l1(0);
      for (const auto& [v, c] : a.coeffs) l1 = l1 + c.abs();
      r.a[margin] = l1;
    }
    rows.push_back(std::move(r));
  }
  lp::Row cap;
  cap.a[margin] = Rational(1);
  cap.b = Rational(1);
  rows.push_back(cap);
  lp::Result res = lp::maximize(rows, {{margin, Rational(1)}}, {margin});
  if (res.status != lp::Status::Optimal) return std::nullopt;
  std::map<int, Rational> pt = res.point;
  pt.erase(margin);
  for (const auto& a : atoms)
    if (!a.holds_at(pt)) return std::nullopt;
  return pt;
}

}  // namespace cmap

#endif  // CMAP_SIMPLEX_HPP
