#ifndef CMAP_TEST_FIXTURES_HPP
#define CMAP_TEST_FIXTURES_HPP

#include <utility>
#include <vector>

#include "cmap/problem.hpp"

namespace fixtures {

using cmap::Clause;
using cmap::LinearAtom;
using cmap::Literal;
using cmap::Rational;

inline LinearAtom atom(std::vector<std::pair<int, Rational>> cs, Rational b,
                       LinearAtom::Op op = LinearAtom::Le) {
  return LinearAtom(std::move(cs), std::move(b), op);
}

inline Clause clause(std::vector<Literal> lits) { return Clause{std::move(lits)}; }

inline cmap::UniPoly<Rational> upoly(int var, std::vector<Rational> coeffs) {
  return cmap::UniPoly<Rational>(var, std::move(coeffs));
}

// The reference star instance: variables x1,x2,x3 on [-1,1], distance clauses
// 1 <= |x1 - xi| <= 2 for i in {2,3}, node densities (1/20, x2+1, 1-x3), an
// unguarded edge density (1-x1)(3-x3) and a two-piece guarded edge density
// between x1 and x2 whose guards split along x1 = x2. The region
// x1 >= x2, x1 > 1/2 is deliberately left uncovered.
inline cmap::Problem<Rational> star_instance() {
  using R = Rational;
  cmap::Problem<R> P;
  P.kind = cmap::FuncKind::Poly;
  P.formula.vars = {{"x1", R(-1), R(1)}, {"x2", R(-1), R(1)}, {"x3", R(-1), R(1)}};
  for (int i : {1, 2}) {
    // |x0 - xi| >= 1 is one two-literal clause; |x0 - xi| <= 2 is two units.
    P.formula.clauses.push_back(clause({Literal{atom({{0, R(1)}, {i, R(-1)}}, R(-1)), false},
                                        Literal{atom({{i, R(1)}, {0, R(-1)}}, R(-1)), false}}));
    P.formula.clauses.push_back(clause({Literal{atom({{0, R(1)}, {i, R(-1)}}, R(2)), false}}));
    P.formula.clauses.push_back(clause({Literal{atom({{i, R(1)}, {0, R(-1)}}, R(2)), false}}));
  }

  auto single = [](int var, cmap::UniPoly<R> body) {
    return cmap::pw_single(var, std::move(body), cmap::Ext<R>(R(-1)), cmap::Ext<R>(R(1)), true, true);
  };
  P.node_factors.emplace(0, single(0, upoly(0, {R(1, 20)})));
  P.node_factors.emplace(1, single(1, upoly(1, {R(1), R(1)})));
  P.node_factors.emplace(2, single(2, upoly(2, {R(1), R(-1)})));

  cmap::EdgeFactor<R> e02;
  e02.i = 0;
  e02.j = 2;
  e02.pieces.push_back({{}, upoly(0, {R(1), R(-1)}), upoly(2, {R(3), R(-1)}), std::nullopt});
  P.edge_factors.push_back(std::move(e02));

  cmap::EdgeFactor<R> e01;
  e01.i = 0;
  e01.j = 1;
  LinearAtom below = atom({{0, R(1)}, {1, R(-1)}}, R(0), LinearAtom::Lt);
  // (1/5)(x0 - 9/10)^2 * (x1 + 9/10)^2 where x0 < x1
  e01.pieces.push_back({{Literal{below, false}},
                        upoly(0, {R(81, 500), R(-9, 25), R(1, 5)}),
                        upoly(1, {R(81, 100), R(9, 5), R(1)}),
                        std::nullopt});
  // (x0 + 1) where x0 >= x1 and x0 <= 1/2
  e01.pieces.push_back({{Literal{below, true}, Literal{atom({{0, R(1)}}, R(1, 2)), false}},
                        upoly(0, {R(1), R(1)}),
                        cmap::UniPoly<R>::constant(R(1)),
                        std::nullopt});
  P.edge_factors.push_back(std::move(e01));
  return P;
}

}  // namespace fixtures

#endif  // CMAP_TEST_FIXTURES_HPP
