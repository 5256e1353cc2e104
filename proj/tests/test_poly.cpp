#include <catch2/catch_amalgamated.hpp>

#include "cmap/poly.hpp"

using namespace cmap;
using RP = UniPoly<Rational>;

namespace {
RP mk(std::initializer_list<long long> cs, int var = 0) {
  std::vector<Rational> v;
  for (auto c : cs) v.emplace_back(c);
  return RP(var, std::move(v));
}
}  // namespace

TEST_CASE("poly arithmetic") {
  RP p = mk({1, 2, 3});  // 3x^2+2x+1
  RP q = mk({0, -2});    // -2x
  CHECK(poly_add(p, q) == mk({1, 0, 3}));
  CHECK(poly_sub(p, p).is_zero());
  CHECK(poly_mul(q, q) == mk({0, 0, 4}));
  CHECK(poly_derivative(p) == mk({2, 6}));
  CHECK(p.eval(Rational(2)) == Rational(17));
  CHECK(mk({5}).degree() == 0);
  CHECK(RP().degree() == -1);
  // trailing zeros are stripped on construction
  CHECK(RP(0, {Rational(1), Rational(0)}).degree() == 0);
}

TEST_CASE("compose with affine map matches pointwise evaluation") {
  RP p = mk({1, -3, 0, 2});  // 2x^3 - 3x + 1
  AffineFunc<Rational> f(7, Rational(2), Rational(-1, 2));  // x = 2y - 1/2
  RP comp = poly_compose_affine(p, f);
  CHECK(comp.var == 7);
  for (long long k = -5; k <= 5; ++k) {
    Rational y(k, 3);
    CHECK(comp.eval(y) == p.eval(f.eval(y)));
  }
  // composing with a constant map collapses to a constant
  AffineFunc<Rational> c = AffineFunc<Rational>::constant(Rational(3));
  CHECK(poly_compose_affine(p, c).const_value() == p.eval(Rational(3)));
}

TEST_CASE("affine compose and extended eval") {
  AffineFunc<Rational> f(1, Rational(2), Rational(1));
  AffineFunc<Rational> g(2, Rational(-3), Rational(4));
  auto h = f.compose(g);  // f(g(y)) = 2(-3y+4)+1 = -6y + 9
  CHECK(h.slope == Rational(-6));
  CHECK(h.off == Rational(9));
  CHECK(h.var == 2);
  CHECK(f.eval_ext(Ext<Rational>::pos_inf()).kind == Ext<Rational>::PosInf);
  CHECK(g.eval_ext(Ext<Rational>::pos_inf()).kind == Ext<Rational>::NegInf);
  CHECK(AffineFunc<Rational>::constant(Rational(5)).eval_ext(Ext<Rational>::neg_inf()).v == Rational(5));
}

TEST_CASE("roots_in dyadic and windowed") {
  // (x-1/4)(x-1/2)(x-3/4)
  RP p(0, {Rational(-3, 32), Rational(11, 16), Rational(-3, 2), Rational(1)});
  auto roots = poly_roots_in(p, Rational(0), Rational(1));
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == Rational(1, 4));
  CHECK(roots[1] == Rational(1, 2));
  CHECK(roots[2] == Rational(3, 4));

  auto clipped = poly_roots_in(p, Rational(3, 10), Rational(6, 10));
  REQUIRE(clipped.size() == 1);
  CHECK(clipped[0] == Rational(1, 2));

  CHECK(poly_roots_in(RP(), Ext<Rational>::neg_inf(), Ext<Rational>::pos_inf()).empty());
  CHECK(poly_roots_in(mk({3}), Ext<Rational>::neg_inf(), Ext<Rational>::pos_inf()).empty());

  // irrational root materializes within eps_root
  RP s2 = mk({-2, 0, 1});
  auto r = poly_roots_in(s2, Rational(0), Rational(2));
  REQUIRE(r.size() == 1);
  CHECK((r[0] * r[0] - Rational(2)).abs() < Rational(1, 1000000000));
}

TEST_CASE("roots_in on double backend") {
  UniPoly<double> p(0, {-2.0, 0.0, 1.0});
  auto r = poly_roots_in(p, Ext<double>(0.0), Ext<double>(2.0));
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0] - std::sqrt(2.0)) < 1e-9);
}
