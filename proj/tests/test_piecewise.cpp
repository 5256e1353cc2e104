#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cmap/piecewise.hpp"

using namespace cmap;
using R = Rational;
using PW = PiecewiseFunc<R>;
using EP = Ext<R>;

namespace {

UniPoly<R> mk(std::initializer_list<long long> cs, int var = 0) {
  std::vector<R> v;
  for (auto c : cs) v.emplace_back(c);
  return UniPoly<R>(var, std::move(v));
}

// Random piecewise function over [-3, 3]: contiguous pieces, alternating
// closures, random small-degree bodies. Deterministic per seed.
PW random_pw(std::mt19937_64& rng, int var = 0) {
  PW f;
  f.var = var;
  std::uniform_int_distribution<int> npieces(1, 4), coeff(-4, 4), deg(0, 3);
  int n = npieces(rng);
  // dyadic breakpoints in [-3,3]
  std::vector<R> bps{R(-3)};
  std::uniform_int_distribution<int> num(-11, 11);
  for (int i = 0; i + 1 < n; ++i) bps.push_back(R(num(rng), 4));
  bps.push_back(R(3));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  for (size_t i = 0; i + 1 < bps.size(); ++i) {
    Piece<R> p;
    p.lo = EP(bps[i]);
    p.hi = EP(bps[i + 1]);
    p.lo_closed = i == 0 ? true : (rng() & 1);
    p.hi_closed = !(rng() & 1);
    if (i + 2 < bps.size() && p.hi_closed) {
      // keep disjoint: next lo_closed decided later; force open start there
    }
    std::vector<R> cs;
    int d = deg(rng);
    for (int k = 0; k <= d; ++k) cs.emplace_back(coeff(rng));
    p.body = UniPoly<R>(var, cs);
    if (p.body.is_zero()) p.body = UniPoly<R>::constant(R(1));
    f.pieces.push_back(p);
  }
  // fix adjacent closures for disjointness
  for (size_t i = 0; i + 1 < f.pieces.size(); ++i) {
    if (f.pieces[i].hi_closed) f.pieces[i + 1].lo_closed = false;
    else f.pieces[i + 1].lo_closed = true;
  }
  REQUIRE(f.invariants_ok());
  return f;
}

std::vector<R> sample_points() {
  std::vector<R> xs;
  for (int i = -48; i <= 48; ++i) xs.push_back(R(i, 16));  // includes quarters
  return xs;
}

}  // namespace

TEST_CASE("pw_product is the pointwise product on the domain intersection") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 60; ++iter) {
    PW a = random_pw(rng), b = random_pw(rng);
    PW prod = pw_product(a, b);
    REQUIRE(prod.invariants_ok());
    for (const R& x : sample_points()) {
      auto va = a.eval(x), vb = b.eval(x), vp = prod.eval(x);
      if (va && vb) {
        REQUIRE(vp.has_value());
        REQUIRE(*vp == *va * *vb);
      } else {
        REQUIRE(!vp.has_value());
      }
    }
  }
}

TEST_CASE("pw_max is the pointwise max away from materialized cuts") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    PW a = random_pw(rng), b = random_pw(rng), c = random_pw(rng);
    PW m = pw_max(std::vector<const PW*>{&a, &b, &c});
    REQUIRE(m.invariants_ok());
    // skip sample points within 2*eps_root of an output boundary
    auto near_cut = [&](const R& x) {
      for (const auto& p : m.pieces) {
        if (p.lo.finite() && (x - p.lo.v).abs() <= R(2) * kEpsRoot) return true;
        if (p.hi.finite() && (x - p.hi.v).abs() <= R(2) * kEpsRoot) return true;
      }
      return false;
    };
    for (const R& x : sample_points()) {
      if (near_cut(x)) continue;
      std::optional<R> want;
      for (const PW* f : {&a, &b, &c}) {
        auto v = f->eval(x);
        if (v && (!want || *v > *want)) want = v;
      }
      auto got = m.eval(x);
      REQUIRE(got.has_value() == want.has_value());
      if (want) REQUIRE(*got == *want);
    }
  }
}

TEST_CASE("pw_max ties break to the lowest input index") {
  PW a = pw_single(0, mk({1}), EP(R(0)), EP(R(1)), true, true);
  PW b = pw_single(0, mk({1, 0, 0, 0}), EP(R(0)), EP(R(1)), true, true);  // same constant 1
  PW m = pw_max(a, b);
  REQUIRE(m.pieces.size() == 1);
  // both bodies equal as functions; winner must be input 0's piece (args empty either way,
  // but body shape tells which was chosen)
  CHECK(m.pieces[0].body.degree() == 0);
}

TEST_CASE("pw_simplify merges compatible neighbors") {
  PW f;
  f.var = 0;
  f.pieces.push_back({EP(R(0)), EP(R(1)), true, true, FuncKind::Poly, mk({0, 1}), {}});
  f.pieces.push_back({EP(R(1)), EP(R(2)), false, true, FuncKind::Poly, mk({0, 1}), {}});
  PW s = pw_simplify(f);
  REQUIRE(s.pieces.size() == 1);
  CHECK(s.pieces[0].lo.v == R(0));
  CHECK(s.pieces[0].hi.v == R(2));
  CHECK(s.pieces[0].lo_closed);
  CHECK(s.pieces[0].hi_closed);

  // point piece matching left limit merges; mismatching survives
  PW g;
  g.var = 0;
  g.pieces.push_back({EP(R(0)), EP(R(1)), true, false, FuncKind::Poly, mk({0, 1}), {}});
  g.pieces.push_back({EP(R(1)), EP(R(1)), true, true, FuncKind::Poly, mk({1}), {}});
  PW gs = pw_simplify(g);
  REQUIRE(gs.pieces.size() == 1);
  CHECK(gs.pieces[0].hi_closed);

  PW h = g;
  h.pieces[1].body = mk({5});  // jump at the point
  PW hs = pw_simplify(h);
  REQUIRE(hs.pieces.size() == 2);
}

TEST_CASE("pw_final_max pinned cases") {
  SECTION("1 - x^2 on [-2,2] attains 1 at 0") {
    PW f = pw_single(0, mk({1, 0, -1}), EP(R(-2)), EP(R(2)), true, true);
    auto fm = pw_final_max(f);
    REQUIRE(fm.defined);
    CHECK(fm.value_body == R(1));
    CHECK(fm.arg == R(0));
    CHECK(fm.attained);
  }
  SECTION("x on [0,1) has supremum 1, not attained") {
    PW f = pw_single(0, mk({0, 1}), EP(R(0)), EP(R(1)), true, false);
    auto fm = pw_final_max(f);
    REQUIRE(fm.defined);
    CHECK(fm.value_body == R(1));
    CHECK(fm.arg == R(1));
    CHECK_FALSE(fm.attained);
  }
  SECTION("unbounded pieces are flagged") {
    PW f = pw_single(0, mk({0, 1}), EP(R(0)), EP::pos_inf(), true, false);
    auto fm = pw_final_max(f);
    CHECK(fm.unbounded);
    PW g = pw_single(0, mk({0, 0, 1}), EP::neg_inf(), EP(R(0)), false, true);
    CHECK(pw_final_max(g).unbounded);
  }
  SECTION("point piece can win") {
    PW f;
    f.var = 0;
    f.pieces.push_back({EP(R(0)), EP(R(1)), true, false, FuncKind::Poly, mk({0, 1}), {}});
    f.pieces.push_back({EP(R(1)), EP(R(1)), true, true, FuncKind::Poly, mk({7}), {}});
    auto fm = pw_final_max(f);
    CHECK(fm.value_body == R(7));
    CHECK(fm.arg == R(1));
    CHECK(fm.attained);
  }
  SECTION("empty function is undefined") {
    CHECK_FALSE(pw_final_max(PW{}).defined);
  }
}

TEST_CASE("pw_log and pw_exp flip kinds; exp-poly products add exponents") {
  PW f = pw_single(0, mk({0, 1}), EP(R(0)), EP(R(1)), true, true, FuncKind::ExpPoly);
  PW lf = pw_log(f);
  CHECK(lf.kind() == FuncKind::Poly);
  PW ef = pw_exp(lf);
  CHECK(ef.kind() == FuncKind::ExpPoly);

  PW g = pw_single(0, mk({2}), EP(R(0)), EP(R(1)), true, true, FuncKind::ExpPoly);
  PW p = pw_product(f, g);
  REQUIRE(p.pieces.size() == 1);
  CHECK(p.pieces[0].body == mk({2, 1}));  // exponents add
}

TEST_CASE("restrict and mul_factor") {
  PW f = pw_single(0, mk({0, 1}), EP(R(0)), EP(R(4)), true, true);
  PW r = pw_restrict(f, EP(R(1)), EP(R(2)), false, true);
  REQUIRE(r.pieces.size() == 1);
  CHECK_FALSE(r.pieces[0].lo_closed);
  CHECK(r.eval(R(1)) == std::nullopt);
  CHECK(r.eval(R(2)).value() == R(2));

  PW m = pw_mul_factor(f, mk({0, 1}));
  CHECK(m.eval(R(3)).value() == R(9));
}

TEST_CASE("argmax records survive product and max") {
  PW a = pw_single(0, mk({1}), EP(R(0)), EP(R(2)), true, true);
  a.pieces[0].args.push_back(ArgRecord<R>::constant(5, R(7), true));
  PW b = pw_single(0, mk({2}), EP(R(1)), EP(R(3)), true, true);
  b.pieces[0].args.push_back(ArgRecord<R>::affine(6, AffineFunc<R>(0, R(1), R(0)), true));
  PW p = pw_product(a, b);
  REQUIRE(p.pieces.size() == 1);
  REQUIRE(p.pieces[0].args.size() == 2);
  CHECK(p.pieces[0].args[0].var == 5);
  CHECK(p.pieces[0].args[1].var == 6);
  CHECK(p.pieces[0].args[1].eval(R(3, 2)) == R(3, 2));

  PW m = pw_max(a, b);
  for (const auto& pc : m.pieces) {
    REQUIRE(pc.args.size() == 1);
    if (pc.lo.finite() && pc.lo.v >= R(2)) CHECK(pc.args[0].var == 6);
  }
}
