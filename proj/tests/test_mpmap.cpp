#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "cmap/mpmap.hpp"
#include "fixtures.hpp"

using cmap::Clause;
using cmap::FuncKind;
using cmap::LinearAtom;
using cmap::Literal;
using cmap::Problem;
using cmap::Rational;
using fixtures::atom;
using fixtures::clause;
using fixtures::upoly;

namespace {

using R = Rational;

// two variables on [-1,1] with one binary clause and one edge density
Problem<R> pair_problem(LinearAtom binary, cmap::UniPoly<R> left, cmap::UniPoly<R> right) {
  Problem<R> P;
  P.formula.vars = {{"x1", R(-1), R(1)}, {"x2", R(-1), R(1)}};
  P.formula.clauses.push_back(clause({Literal{std::move(binary), false}}));
  cmap::EdgeFactor<R> ef;
  ef.i = 0;
  ef.j = 1;
  ef.pieces.push_back({{}, std::move(left), std::move(right), std::nullopt});
  P.edge_factors.push_back(std::move(ef));
  return P;
}

// Coordinate-grid search with recursive shrinking around the incumbent, the
// oracle the solver is checked against. Exact arithmetic throughout.
std::pair<R, std::map<int, R>> grid_oracle(const Problem<R>& P, int per_dim = 10, int rounds = 30,
                                           R shrink = R(1, 5)) {
  const int n = (int)P.formula.vars.size();
  std::vector<std::pair<R, R>> outer, box;
  for (const auto& v : P.formula.vars) outer.push_back({v.lo, v.hi});
  box = outer;
  bool have = false;
  R best{};
  std::map<int, R> at;
  const bool log_space = P.kind == FuncKind::ExpPoly;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> idx(n, 0);
    while (true) {
      std::map<int, R> pt;
      for (int d = 0; d < n; ++d) {
        R t = per_dim == 1 ? R(1, 2) : R(idx[d], per_dim - 1);
        pt[d] = box[d].first + t * (box[d].second - box[d].first);
      }
      if (formula_holds_at(P.formula, pt)) {
        auto v = cmap::density_score_at(P, pt);
        if (v && (!have || best < *v)) {
          have = true;
          best = *v;
          at = pt;
        }
      }
      int d = 0;
      while (d < n && ++idx[d] == per_dim) idx[d++] = 0;
      if (d == n) break;
    }
    if (!have) continue;
    for (int d = 0; d < n; ++d) {
      R w = (box[d].second - box[d].first) * shrink / R(2);
      box[d].first = std::max(outer[d].first, at[d] - w);
      box[d].second = std::min(outer[d].second, at[d] + w);
    }
  }
  (void)log_space;
  REQUIRE(have);
  return {best, at};
}

}  // namespace

TEST_CASE("corner optimum lands exactly on the feasible corner") {
  // (1-x1)(x2+1) under x1 <= x2
  auto P = pair_problem(atom({{0, R(1)}, {1, R(-1)}}, R(0)), upoly(0, {R(1), R(-1)}),
                        upoly(1, {R(1), R(1)}));
  auto res = cmap::solve(P);
  REQUIRE(res.value == R(4));
  REQUIRE(res.attained);
  REQUIRE(res.assignment.at(0) == R(-1));
  REQUIRE(res.assignment.at(1) == R(1));
  REQUIRE(res.stats.verified);
}

TEST_CASE("active-boundary optimum is found in the interior of an edge") {
  // (x1+1)(x2+1) under x1 + x2 <= 0: max on the boundary at (0,0)
  auto P = pair_problem(atom({{0, R(1)}, {1, R(1)}}, R(0)), upoly(0, {R(1), R(1)}),
                        upoly(1, {R(1), R(1)}));
  auto res = cmap::solve(P);
  REQUIRE(res.value == R(1));
  REQUIRE(res.attained);
  REQUIRE(res.assignment.at(0) == R(0));
  REQUIRE(res.assignment.at(1) == R(0));
}

TEST_CASE("gathering a leaf yields its clipped node factor") {
  auto P = fixtures::star_instance();
  auto g = cmap::gather_msgs(P, 1, {});
  REQUIRE(g.pieces.size() == 1);
  REQUIRE(g.pieces[0].lo.v == R(-1));
  REQUIRE(g.pieces[0].hi.v == R(1));
  REQUIRE(*g.eval(R(1, 2)) == R(3, 2));

  Problem<R> Q;
  Q.formula.vars = {{"a", R(-2), R(3)}};
  auto h = cmap::gather_msgs(Q, 0, {});
  REQUIRE(*h.eval(R(0)) == R(1));
  REQUIRE(*h.eval(R(-2)) == R(1));
  REQUIRE_FALSE(h.eval(R(4)).has_value());
}

TEST_CASE("unconstrained elimination produces the child's maximum everywhere") {
  Problem<R> P;
  P.formula.vars = {{"c", R(-1), R(1)}, {"p", R(-2), R(2)}};
  // child factor 1 - c^2, peak 1 at c = 0
  P.node_factors.emplace(
      0, cmap::pw_single(0, upoly(0, {R(1), R(0), R(-1)}), cmap::Ext<R>(R(-1)), cmap::Ext<R>(R(1)),
                         true, true));
  auto g = cmap::gather_msgs(P, 0, {});
  auto m = cmap::compute_msgs(P, g, 0, 1);
  for (const R& y : {R(-2), R(-1), R(0), R(3, 2), R(2)}) {
    auto v = m.eval(y);
    REQUIRE(v.has_value());
    REQUIRE(*v == R(1));
  }
  REQUIRE_FALSE(m.eval(R(5, 2)).has_value());
}

TEST_CASE("message values match a dense sweep over the eliminated variable") {
  auto P = fixtures::star_instance();
  auto g = cmap::gather_msgs(P, 1, {});
  auto m = cmap::compute_msgs(P, g, 1, 0);

  // local value of everything the message eliminates: phi_2 * phi_12
  auto local = [&](const R& x1, const R& x2) -> std::optional<R> {
    std::map<int, R> pt{{0, x1}, {1, x2}};
    if (x2 < R(-1) || R(1) < x2) return std::nullopt;
    for (const auto& c : cmap::clauses_with_scope_in(P.formula, {0, 1}))
      if (!c.holds_at(pt)) return std::nullopt;
    const auto& ef = P.edge_factors[1];
    REQUIRE(ef.i == 0);
    for (const auto& pc : ef.pieces) {
      bool hold = true;
      for (const auto& l : pc.guard)
        if (!l.holds_at(pt)) hold = false;
      if (hold) return pc.left.eval(x1) * pc.right.eval(x2) * (x2 + R(1));
    }
    return std::nullopt;
  };

  for (const R& x1 : {R(0), R(-1), R(1, 2), R(-9, 10), R(99, 100)}) {
    std::optional<R> sweep;
    const int N = 20000;
    for (int k = 0; k <= N; ++k) {
      R x2 = R(-1) + R(2 * k, N);
      auto v = local(x1, x2);
      if (v && (!sweep || *sweep < *v)) sweep = v;
    }
    auto got = m.eval(x1);
    REQUIRE(got.has_value() == sweep.has_value());
    if (!got) continue;
    REQUIRE(*got >= *sweep);                   // sweep undershoots the true sup
    REQUIRE((*got - *sweep) < R(1, 1000));     // but not by much
  }

  // exact spot check at x1 = 0: feasible x2 are exactly {-1, 1}
  REQUIRE(*m.eval(R(0)) == R(2) * R(81, 500) * R(361, 100));
}

TEST_CASE("star instance solve matches the recursive grid oracle") {
  auto P = fixtures::star_instance();
  auto res = cmap::solve(P);
  REQUIRE(res.attained);
  REQUIRE(res.stats.verified);
  REQUIRE(cmap::formula_holds_at(P.formula, res.assignment));
  REQUIRE(*cmap::density_score_at(P, res.assignment) == res.value);

  auto [oracle, at] = grid_oracle(P);
  REQUIRE(res.value >= oracle);
  REQUIRE(res.value - oracle <= res.value * R(1, 10000));
  REQUIRE(res.stats.max_message_pieces > 0);
}

TEST_CASE("solves are invariant under rerooting") {
  auto P = fixtures::star_instance();
  auto G = cmap::validate_and_admit(P);
  auto base = cmap::solve(P, G);
  for (int r = 0; r < 3; ++r) {
    auto alt = cmap::solve(P, cmap::reroot(G, r));
    REQUIRE(alt.value == base.value);
    REQUIRE(alt.attained == base.attained);
  }
}

TEST_CASE("unsatisfiable and uncovered instances raise the same error") {
  auto P = fixtures::star_instance();
  // the two units contradict: x1 <= -1 and x1 >= 1
  P.formula.clauses.push_back(clause({Literal{atom({{0, R(1)}}, R(-1)), false}}));
  P.formula.clauses.push_back(clause({Literal{atom({{0, R(-1)}}, R(-1)), false}}));
  REQUIRE_THROWS_AS(cmap::solve(P), cmap::Unsatisfiable);

  // feasible region exists but no density piece covers it
  Problem<R> Q;
  Q.formula.vars = {{"u", R(0), R(1)}, {"v", R(0), R(1)}};
  Q.formula.clauses.push_back(clause({Literal{atom({{0, R(-1)}}, R(-1, 2)), false}}));  // u >= 1/2
  cmap::EdgeFactor<R> ef;
  ef.i = 0;
  ef.j = 1;
  ef.pieces.push_back({{Literal{atom({{0, R(1)}}, R(1, 4), LinearAtom::Lt), false}},
                       cmap::UniPoly<R>::constant(R(1)),
                       cmap::UniPoly<R>::constant(R(1)),
                       std::nullopt});
  Q.edge_factors.push_back(std::move(ef));
  REQUIRE_THROWS_AS(cmap::solve(Q), cmap::Unsatisfiable);
}

TEST_CASE("log-density problems run through the exponent algebra") {
  Problem<R> P;
  P.kind = FuncKind::ExpPoly;
  P.formula.vars = {{"x1", R(-1), R(1)}, {"x2", R(-1), R(1)}};
  // exp(-x1^2 - x2^2) under x1 + x2 >= 1: optimum at (1/2, 1/2)
  P.formula.clauses.push_back(clause({Literal{atom({{0, R(-1)}, {1, R(-1)}}, R(-1)), false}}));
  cmap::EdgeFactor<R> ef;
  ef.i = 0;
  ef.j = 1;
  ef.pieces.push_back(
      {{}, upoly(0, {R(0), R(0), R(-1)}), upoly(1, {R(0), R(0), R(-1)}), std::nullopt});
  P.edge_factors.push_back(std::move(ef));

  auto res = cmap::solve(P);
  REQUIRE(res.value == R(-1, 2));
  REQUIRE(res.attained);
  REQUIRE(res.assignment.at(0) == R(1, 2));
  REQUIRE(res.assignment.at(1) == R(1, 2));

  // one-variable variant with a strict unary clause: supremum, not maximum
  Problem<R> Q;
  Q.formula.vars = {{"x", R(-1), R(1)}};
  Q.formula.clauses.push_back(clause({Literal{atom({{0, R(1)}}, R(0), LinearAtom::Lt), false}}));
  Q.node_factors.emplace(0, cmap::pw_single(0, upoly(0, {R(0), R(1)}), cmap::Ext<R>(R(-1)),
                                            cmap::Ext<R>(R(1)), true, true));
  Q.node_factors.at(0).pieces[0].kind = FuncKind::ExpPoly;
  Q.kind = FuncKind::ExpPoly;
  auto sup = cmap::solve(Q);
  REQUIRE(sup.value == R(0));
  REQUIRE_FALSE(sup.attained);
}

TEST_CASE("forests solve tree by tree and multiply") {
  Problem<R> P;
  P.formula.vars = {{"a", R(0), R(1)}, {"b", R(0), R(2)}};
  P.node_factors.emplace(0, cmap::pw_single(0, upoly(0, {R(1), R(1)}), cmap::Ext<R>(R(0)),
                                            cmap::Ext<R>(R(1)), true, true));
  P.node_factors.emplace(1, cmap::pw_single(1, upoly(1, {R(0), R(1)}), cmap::Ext<R>(R(0)),
                                            cmap::Ext<R>(R(2)), true, true));
  auto G = cmap::validate_and_admit(P);
  REQUIRE(G.roots == std::vector<int>{0, 1});
  auto res = cmap::solve(P, G);
  REQUIRE(res.value == R(4));
  REQUIRE(res.assignment.at(0) == R(1));
  REQUIRE(res.assignment.at(1) == R(2));
}

TEST_CASE("message callback fires once per eliminated variable") {
  auto P = fixtures::star_instance();
  int count = 0;
  cmap::SolveOptions<R> opts;
  opts.on_message = [&](int c, int p, const cmap::PiecewiseFunc<R>& m) {
    ++count;
    REQUIRE(p == 0);
    REQUIRE((c == 1 || c == 2));
    REQUIRE_FALSE(m.empty());
  };
  cmap::solve(P, opts);
  REQUIRE(count == 2);
}

TEST_CASE("float backend agrees with the exact backend on the star instance") {
  auto P = fixtures::star_instance();
  auto exact = cmap::solve(P);
  auto Pf = cmap::convert_problem<double>(P);
  auto approx = cmap::solve(Pf);
  REQUIRE(approx.value == Catch::Approx(exact.value.to_double()).epsilon(1e-9));
}
