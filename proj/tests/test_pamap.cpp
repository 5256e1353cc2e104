#include <catch2/catch_amalgamated.hpp>

#include "cmap/bounds.hpp"
#include "cmap/density.hpp"
#include "cmap/enumerate.hpp"
#include "cmap/mpmap.hpp"
#include "cmap/optimize.hpp"
#include "cmap/pamap.hpp"
#include "cmap/polytope.hpp"
#include "fixtures.hpp"

using namespace cmap;
using fixtures::atom;
using fixtures::upoly;
using R = Rational;

namespace {

// x1, x2 in [0,2]; one clause keeping points out of an open inner triangle
CnfFormula wedge_formula() {
  CnfFormula F;
  F.vars = {{"x1", R(0), R(2)}, {"x2", R(0), R(2)}};
  Clause c;
  c.lits.push_back({atom({{1, R(1)}}, R(1)), false});                // x2 <= 1
  c.lits.push_back({atom({{0, R(-2)}, {1, R(1)}}, R(0)), true});     // x2 > 2 x1
  c.lits.push_back({atom({{0, R(2)}, {1, R(1)}}, R(19, 4)), true});  // x2 > 19/4 - 2 x1
  F.clauses.push_back(c);
  return F;
}

bool in_wedge(const R& x1, const R& x2) {
  return R(1) < x2 && x2 <= R(2) * x1 && R(2) * x1 + x2 <= R(19, 4);
}

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::map<int, std::pair<double, double>> dbox2(double lo, double hi) {
  return {{0, {lo, hi}}, {1, {lo, hi}}};
}

}  // namespace

TEST_CASE("complementary literals share one canonical atom") {
  Literal a{atom({{0, R(1)}, {1, R(-2)}}, R(3)), false};
  Literal na{a.atom, true};
  CanonLit ca = canon_literal(a), cna = canon_literal(na);
  REQUIRE(ca.atom == cna.atom);
  REQUIRE(ca.pol != cna.pol);
  // already-canonical atoms pass through
  REQUIRE(ca.atom == a.atom);
  REQUIRE(ca.pol);
}

TEST_CASE("projection onto a polytope") {
  Polytope P;
  P.atoms = {atom({{0, R(1)}, {1, R(1)}}, R(1)),   // x + y <= 1
             atom({{0, R(-1)}}, R(0)),             // x >= 0
             atom({{1, R(-1)}}, R(0))};            // y >= 0

  SECTION("outside point lands on the diagonal face exactly") {
    auto pt = project_onto_polytope({{0, 2.0}, {1, 2.0}}, P);
    REQUIRE(pt.at(0) == R(1, 2));
    REQUIRE(pt.at(1) == R(1, 2));
  }
  SECTION("interior points come back unchanged") {
    auto pt = project_onto_polytope({{0, 0.25}, {1, 0.25}}, P);
    REQUIRE(pt.at(0) == R(1, 4));
    REQUIRE(pt.at(1) == R(1, 4));
  }
  SECTION("single-face projection on the unit box") {
    Polytope B;
    B.atoms = {atom({{0, R(1)}}, R(1)), atom({{0, R(-1)}}, R(0)),
               atom({{1, R(1)}}, R(1)), atom({{1, R(-1)}}, R(0))};
    auto pt = project_onto_polytope({{0, 2.0}, {1, 0.0}}, B);
    REQUIRE(pt.at(0) == R(1));
    REQUIRE(pt.at(1) == R(0));
  }
  SECTION("zero sweeps stall") {
    REQUIRE_THROWS_AS(project_onto_polytope({{0, 2.0}, {1, 2.0}}, P, 0),
                      ProjectionStalled);
  }
}

TEST_CASE("piece upper bounds are exact for separable bodies") {
  std::map<int, std::pair<R, R>> box{{0, {R(-1), R(1)}}, {1, {R(-1), R(1)}}};

  SECTION("squared factors peak at the endpoints") {
    DensityPiece p;
    p.bodies = {{0, upoly(0, {R(0), R(0), R(1)})}, {1, upoly(1, {R(0), R(0), R(1)})}};
    REQUIRE(piece_upper_bound(p, FuncKind::Poly, box) == R(1));
  }
  SECTION("constant piece bounds to itself") {
    DensityPiece p;
    p.bodies = {{0, upoly(0, {R(5, 2)})}};
    REQUIRE(piece_upper_bound(p, FuncKind::Poly, box) == R(5, 2));
  }
  SECTION("monotone linear factors multiply") {
    DensityPiece p;
    p.bodies = {{0, upoly(0, {R(1), R(-1)})}, {1, upoly(1, {R(3), R(-1)})}};
    REQUIRE(piece_upper_bound(p, FuncKind::Poly, box) == R(8));
  }
  SECTION("exponents add instead of multiplying") {
    DensityPiece p;
    p.bodies = {{0, upoly(0, {R(0), R(0), R(-1)})}, {1, upoly(1, {R(2), R(1)})}};
    REQUIRE(piece_upper_bound(p, FuncKind::ExpPoly, box) == R(3));  // 0 + 3
  }
  SECTION("interval arithmetic covers non-separable bodies") {
    MultiPoly<R> xy;
    xy.terms.push_back({{{0, 1}, {1, 1}}, R(1)});
    MultiPoly<R> p = MultiPoly<R>::constant(R(2)) + xy * MultiPoly<R>::constant(R(-1));
    DensityPiece dp;
    dp.joint = p;
    REQUIRE(piece_upper_bound(dp, FuncKind::Poly, box) == R(3));
  }
}

TEST_CASE("enumeration carves the box into feasible polytopes") {
  SECTION("box only gives exactly one polytope") {
    CnfFormula F;
    F.vars = {{"x", R(-1), R(1)}, {"y", R(-1), R(1)}};
    DensityModel D = joint_density(MultiPoly<R>::constant(R(1)));
    auto out = enumerate_regions(F, D);
    REQUIRE(out.atoms.empty());
    REQUIRE(out.regions.size() == 1);
    REQUIRE(out.regions[0].covered);
    REQUIRE(out.regions[0].polytope.contains({{0, R(0)}, {1, R(0)}}));
  }
  SECTION("unsatisfiable constraints give an empty stream") {
    CnfFormula F;
    F.vars = {{"x", R(0), R(1)}};
    F.clauses.push_back(Clause{{Literal{atom({{0, R(1)}}, R(0)), false}}});   // x <= 0
    F.clauses.push_back(Clause{{Literal{atom({{0, R(-1)}}, R(-1)), false}}});  // x >= 1
    auto out = enumerate_regions(F, joint_density(MultiPoly<R>::constant(R(1))));
    REQUIRE(out.regions.empty());
    REQUIRE(out.complete);
  }
  SECTION("box-implied atoms are resolved, not enumerated") {
    CnfFormula F;
    F.vars = {{"x", R(0), R(1)}};
    // always true on the box: the clause drops out entirely
    F.clauses.push_back(Clause{{Literal{atom({{0, R(1)}}, R(5)), false}}});
    auto out = enumerate_regions(F, joint_density(MultiPoly<R>::constant(R(1))));
    REQUIRE(out.atoms.empty());
    REQUIRE(out.regions.size() == 1);
  }
  SECTION("the wedge formula splits into at least three disjoint polytopes") {
    CnfFormula F = wedge_formula();
    auto out = enumerate_regions(F, joint_density(MultiPoly<R>::constant(R(1))));
    REQUIRE(out.regions.size() >= 3);

    // Monte-Carlo partition check: satisfying samples lie in exactly one
    // polytope, wedge samples in none
    std::mt19937_64 rng(7);
    int sat_seen = 0, wedge_seen = 0;
    for (int s = 0; s < 100000; ++s) {
      R x1 = Rational::from_double(2.0 * unit(rng));
      R x2 = Rational::from_double(2.0 * unit(rng));
      std::map<int, R> pt{{0, x1}, {1, x2}};
      int members = 0;
      for (const auto& r : out.regions)
        if (r.polytope.contains(pt)) ++members;
      if (in_wedge(x1, x2)) {
        ++wedge_seen;
        REQUIRE(members == 0);
      } else {
        ++sat_seen;
        REQUIRE(members == 1);
      }
    }
    REQUIRE(sat_seen > 0);
    REQUIRE(wedge_seen > 0);
  }
}

TEST_CASE("partition property on random formulas") {
  std::mt19937_64 rng(11);
  auto rnd_int = [&](int lo, int hi) { return lo + int(rng() % std::uint64_t(hi - lo + 1)); };
  for (int trial = 0; trial < 10; ++trial) {
    int n = rnd_int(1, 3);
    CnfFormula F;
    for (int v = 0; v < n; ++v) F.vars.push_back({"x" + std::to_string(v), R(-1), R(1)});
    int natoms = rnd_int(2, 6);
    std::vector<LinearAtom> pool;
    while ((int)pool.size() < natoms) {
      std::vector<std::pair<int, R>> cs;
      for (int v = 0; v < n; ++v) {
        int c = rnd_int(-3, 3);
        if (c != 0) cs.push_back({v, R(c)});
      }
      if (cs.empty()) continue;
      pool.push_back(LinearAtom(cs, R(rnd_int(-2, 2), 2),
                                rng() % 2 ? LinearAtom::Lt : LinearAtom::Le));
    }
    int nclauses = rnd_int(1, 3);
    for (int c = 0; c < nclauses; ++c) {
      Clause cl;
      int nlits = rnd_int(1, 3);
      for (int l = 0; l < nlits; ++l)
        cl.lits.push_back({pool[rng() % pool.size()], rng() % 2 == 0});
      F.clauses.push_back(cl);
    }
    auto out = enumerate_regions(F, DensityModel{});
    for (int s = 0; s < 2000; ++s) {
      std::map<int, R> pt;
      for (int v = 0; v < n; ++v)
        pt[v] = Rational::from_double(-1.0 + 2.0 * unit(rng));
      int members = 0;
      for (const auto& r : out.regions)
        if (r.polytope.contains(pt)) ++members;
      if (formula_holds_at(F, pt))
        REQUIRE(members == 1);
      else
        REQUIRE(members == 0);
    }
  }
}

TEST_CASE("grid refinement") {
  FeasFn always = [](const std::map<int, R>&) { return true; };

  SECTION("linear score on the unit interval ends at the top corner") {
    auto got = grid_refine({{0, {0.0, 1.0}}},
                           [](const std::map<int, double>& x) { return x.at(0); }, always);
    REQUIRE(got.found);
    REQUIRE(got.value == 1.0);
    REQUIRE(got.point.at(0) == 1.0);
  }
  SECTION("symmetric bowl converges to the origin") {
    auto got = grid_refine(dbox2(-1.0, 1.0),
                           [](const std::map<int, double>& x) {
                             return -(x.at(0) * x.at(0) + x.at(1) * x.at(1));
                           },
                           always);
    REQUIRE(got.found);
    REQUIRE(got.value >= -1e-12);
  }
  SECTION("a sliver missing every grid point raises") {
    Polytope sliver;
    sliver.atoms = {atom({{0, R(1)}, {1, R(1)}}, R(1, 1000000)),  // x + y <= 1e-6
                    atom({{0, R(-1)}}, R(0)), atom({{1, R(-1)}}, R(0))};
    FeasFn feas = [&](const std::map<int, R>& x) { return sliver.contains(x); };
    // the [-1,1]^2 grid has no point with both coords in [0, 1e-6]
    REQUIRE_THROWS_AS(
        grid_refine(dbox2(-1.0, 1.0),
                    [](const std::map<int, double>&) { return 0.0; }, feas),
        NoFeasibleGridPoint);
  }
}

TEST_CASE("particle climb with the exact feasibility gate") {
  SECTION("unsatisfiable constraints never produce an incumbent") {
    FeasFn never = [](const std::map<int, R>&) { return false; };
    auto got = pcadam({{0, {-1.0, 1.0}}},
                      [](const std::map<int, double>& x) { return x.at(0); },
                      [](const std::map<int, double>&) {
                        return std::map<int, double>{{0, 1.0}};
                      },
                      never, {});
    REQUIRE_FALSE(got.found);
    REQUIRE(got.value == -std::numeric_limits<double>::infinity());
    REQUIRE(got.point.empty());
  }
  SECTION("a concave bump is climbed to its peak") {
    DensityModel D;
    DensityFactor f;
    DensityPiece p;
    p.bodies = {{0, upoly(0, {R(1), R(0), R(-1)})}};  // 1 - x^2
    f.pieces.push_back(p);
    D.factors.push_back(f);
    CnfFormula F;
    F.vars = {{"x", R(-1), R(1)}};
    FeasFn feas = [&](const std::map<int, R>& x) { return formula_holds_at(F, x); };
    PcAdamOptions opts;  // 10 particles, 2500 iterations, lr 0.001
    auto got = pcadam({{0, {-1.0, 1.0}}},
                      [&](const std::map<int, double>& x) { return model_score_d(D, x); },
                      [&](const std::map<int, double>& x) { return model_grad_d(D, x); },
                      feas, opts);
    REQUIRE(got.found);
    REQUIRE(got.value >= 0.999);
    REQUIRE(std::fabs(got.point.at(0)) <= 0.05);
  }
  SECTION("fixed seeds give bit-identical results") {
    auto run = [] {
      FeasFn gate = [](const std::map<int, R>& x) {
        return x.at(0).abs() <= R(1) && x.at(1).abs() <= R(1);
      };
      PcAdamOptions opts;
      opts.iters = 300;
      opts.seed = 42;
      return pcadam(dbox2(-1.0, 1.0),
                    [](const std::map<int, double>& x) {
                      double a = x.at(0) - 0.3, b = x.at(1) + 0.4;
                      return 2.0 - a * a - 3.0 * b * b;
                    },
                    [](const std::map<int, double>& x) {
                      return std::map<int, double>{{0, -2.0 * (x.at(0) - 0.3)},
                                                   {1, -6.0 * (x.at(1) + 0.4)}};
                    },
                    gate, opts);
    };
    auto a = run(), b = run();
    REQUIRE(a.found);
    REQUIRE(a.value == b.value);
    REQUIRE(a.point == b.point);
  }
}

TEST_CASE("polytope-enumeration solve on a box-only problem") {
  // -(x - 1/3)^2 peaks at x = 1/3 with value 0
  Problem<R> P;
  P.formula.vars = {{"x", R(-1), R(1)}};
  P.node_factors[0] = pw_single(0, upoly(0, {R(-1, 9), R(2, 3), R(-1)}), Ext<R>(R(-1)),
                                Ext<R>(R(1)), true, true);
  PamapOptions opts;
  opts.seed = 3;
  auto res = pamap_solve(P, opts);
  REQUIRE(res.found);
  REQUIRE(res.feasible);
  REQUIRE(res.stats.polytopes_enumerated == 1);
  REQUIRE(res.value <= R(0));
  REQUIRE(res.value.to_double() >= -1e-12);
  REQUIRE(std::fabs(res.point.at(0).to_double() - 1.0 / 3.0) < 1e-5);
}

TEST_CASE("wedge instance with the peak excluded") {
  CnfFormula F = wedge_formula();
  // concave quadratic peaking at (6/5, 3/2), inside the excluded wedge
  MultiPoly<R> p;
  p.terms.push_back({{{0, 2}}, R(-4)});
  p.terms.push_back({{{1, 2}}, R(-4)});
  p.terms.push_back({{{0, 1}, {1, 1}}, R(-2)});
  p.terms.push_back({{{0, 1}}, R(63, 5)});
  p.terms.push_back({{{1, 1}}, R(72, 5)});
  p.terms.push_back({{}, R(541, 25)});
  DensityModel D = joint_density(p);

  // the peak itself is infeasible
  REQUIRE(in_wedge(R(6, 5), R(3, 2)));
  REQUIRE_FALSE(formula_holds_at(F, {{0, R(6, 5)}, {1, R(3, 2)}}));

  PamapOptions opts;
  opts.seed = 1;
  auto res = pamap_solve(F, D, opts);
  REQUIRE(res.found);
  REQUIRE(res.stats.polytopes_enumerated >= 3);

  // recursive grid oracle over the box with exact formula feasibility
  auto oracle = grid_refine(
      dbox2(0.0, 2.0),
      [&](const std::map<int, double>& x) { return p.eval_d(x); },
      [&](const std::map<int, R>& x) { return formula_holds_at(F, x); });
  REQUIRE(oracle.found);
  double got = res.value.to_double();
  REQUIRE(got >= oracle.value - 1e-4 * std::fabs(oracle.value));
  // never above the one-sided supremum on the wedge edge, 6319/160
  REQUIRE(res.value <= R(6319, 160));
  // the reported point stays out of the open wedge
  REQUIRE_FALSE(in_wedge(res.point.at(0), res.point.at(1)));
}

TEST_CASE("pruning never changes the answer") {
  std::mt19937_64 rng(23);
  auto rnd_int = [&](int lo, int hi) { return lo + int(rng() % std::uint64_t(hi - lo + 1)); };
  int with_pruned = 0, instances = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Problem<R> P;
    P.formula.vars = {{"x", R(-1), R(1)}, {"y", R(-1), R(1)}};
    // two-piece node factor per variable, random split and bump centers
    for (int v = 0; v < 2; ++v) {
      R split(rnd_int(-4, 4), 10);
      R c1(rnd_int(-9, 9), 10), c2(rnd_int(-9, 9), 10);
      R h1(rnd_int(1, 5)), h2(rnd_int(1, 5));
      PiecewiseFunc<R> pw;
      pw.var = v;
      // h - (x - c)^2 restricted to each side of the split
      auto bump = [&](const R& h, const R& c) {
        return upoly(v, {h - c * c, R(2) * c, R(-1)});
      };
      pw.pieces.push_back(Piece<R>{Ext<R>(R(-1)), Ext<R>(split), true, false,
                                   FuncKind::Poly, bump(h1, c1), {}});
      pw.pieces.push_back(Piece<R>{Ext<R>(split), Ext<R>(R(1)), true, true,
                                   FuncKind::Poly, bump(h2, c2), {}});
      P.node_factors[v] = pw;
    }
    if (rnd_int(0, 1)) {
      Clause cl;
      cl.lits.push_back({atom({{0, R(1)}, {1, R(rnd_int(-2, 2))}}, R(rnd_int(-1, 1), 2)),
                         rnd_int(0, 1) == 1});
      P.formula.clauses.push_back(cl);
    }
    PamapOptions on, off;
    on.seed = off.seed = 91 + trial;
    on.iters = off.iters = 120;
    off.prune = false;
    PamapResult a, b;
    try {
      a = pamap_solve(P, on);
      b = pamap_solve(P, off);
    } catch (const Unsatisfiable&) {
      continue;
    }
    ++instances;
    REQUIRE(a.found == b.found);
    REQUIRE(a.value == b.value);
    REQUIRE(a.point == b.point);
    REQUIRE(b.stats.polytopes_pruned == 0);
    if (a.stats.polytopes_pruned > 0) ++with_pruned;
  }
  REQUIRE(instances >= 10);
  REQUIRE(with_pruned > 0);
}

TEST_CASE("deadline produces a timeout flag, not an exception") {
  CnfFormula F = wedge_formula();
  MultiPoly<R> p;
  p.terms.push_back({{{0, 2}}, R(-1)});
  p.terms.push_back({{}, R(5)});
  PamapOptions opts;
  opts.deadline_seconds = 0.0;
  auto res = pamap_solve(F, joint_density(p), opts);
  REQUIRE(res.stats.timed_out);
}

TEST_CASE("decomposition never loses to the plain grid") {
  Problem<R> P = fixtures::star_instance();
  PamapOptions opts;
  opts.seed = 5;
  auto res = pamap_solve(P, opts);
  REQUIRE(res.found);

  DensityModel D = build_density(P);
  std::map<int, std::pair<double, double>> box;
  for (size_t v = 0; v < P.formula.vars.size(); ++v)
    box[(int)v] = {P.formula.vars[v].lo.to_double(), P.formula.vars[v].hi.to_double()};
  auto plain = grid_refine(
      box, [&](const std::map<int, double>& x) { return model_score_d(D, x); },
      [&](const std::map<int, R>& x) {
        return formula_holds_at(P.formula, x) && selection_at(D, x).has_value();
      });
  REQUIRE(res.value.to_double() >= plain.value - 1e-9);

  // and it agrees with the exact message-passing solver
  auto exact = solve(P);
  REQUIRE(res.value <= exact.value);
  REQUIRE(res.value.to_double() >= exact.value.to_double() * (1 - 1e-4));
}

TEST_CASE("sliver polytopes fall back to an interior point") {
  // band 1e-9 <= x - y <= 3e-9 inside [-1,1]^2: every grid point of every
  // bounding-box grid misses it, so the fallback has to fire
  CnfFormula F;
  F.vars = {{"x", R(-1), R(1)}, {"y", R(-1), R(1)}};
  F.clauses.push_back(
      Clause{{Literal{atom({{0, R(1)}, {1, R(-1)}}, R(3, 1000000000)), false}}});
  F.clauses.push_back(
      Clause{{Literal{atom({{0, R(-1)}, {1, R(1)}}, R(-1, 1000000000)), false}}});
  MultiPoly<R> p;
  p.terms.push_back({{{0, 1}}, R(1)});
  p.terms.push_back({{}, R(2)});
  PamapOptions opts;
  opts.optimizer = PamapOptions::Optimizer::Grid;
  auto res = pamap_solve(F, joint_density(p), opts);
  REQUIRE(res.found);
  REQUIRE(res.feasible);
  REQUIRE(formula_holds_at(F, res.point));
}

TEST_CASE("log-space problems optimize the exponent") {
  // exp(-(x - 1/4)^2) on [-1,1], box only
  Problem<R> P;
  P.kind = FuncKind::ExpPoly;
  P.formula.vars = {{"x", R(-1), R(1)}};
  P.node_factors[0] = pw_single(0, upoly(0, {R(-1, 16), R(1, 2), R(-1)}), Ext<R>(R(-1)),
                                Ext<R>(R(1)), true, true, FuncKind::ExpPoly);
  PamapOptions opts;
  opts.seed = 17;
  auto res = pamap_solve(P, opts);
  REQUIRE(res.found);
  REQUIRE(res.value <= R(0));
  REQUIRE(res.value.to_double() >= -1e-10);
  REQUIRE(std::fabs(res.point.at(0).to_double() - 0.25) < 1e-4);
}

TEST_CASE("uncovered mass-free instances are unsatisfiable for the solver") {
  Problem<R> P;
  P.formula.vars = {{"x", R(-1), R(1)}};
  // factor defined only on [1/2, 1], formula forces x <= 0
  P.node_factors[0] = pw_single(0, upoly(0, {R(1)}), Ext<R>(R(1, 2)),
                                Ext<R>(R(1)), true, true);
  P.formula.clauses.push_back(Clause{{Literal{atom({{0, R(1)}}, R(0)), false}}});
  REQUIRE_THROWS_AS(pamap_solve(P), Unsatisfiable);
}
