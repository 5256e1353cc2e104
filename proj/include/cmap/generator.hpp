#ifndef CMAP_GENERATOR_HPP
#define CMAP_GENERATOR_HPP

#include <cmath>
#include <string>
#include <vector>

#include "problem.hpp"
#include "rng.hpp"

namespace cmap {

enum class Shape { Star, Snow3, Path };

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Star: return "star";
    case Shape::Snow3: return "snow";
    case Shape::Path: return "path";
  }
  return "?";
}

// heavy-tail coefficient cap, relaxed for small instances
inline double pareto_upper_for(int n_vars) { return n_vars <= 6 ? 15.0 : 2.5; }

struct GenConfig {
  Shape shape = Shape::Star;
  int n_vars = 4;
  int degree = 2;      // per univariate factor, before squaring
  int n_clauses = 2;   // per tree edge, so the primal graph realizes the shape
  int n_literals = 2;  // per clause
  double pareto_upper = 15.0;
  Rational lo{-1};
  Rational hi{1};
  std::uint64_t seed = 0;
};

namespace gendetail {

// coefficients and roots are snapped to thousandths so problem files stay
// exact and compact
inline Rational milli(double x) { return Rational((long long)std::llround(x * 1000), 1000); }

// Pareto(x_m = 2, alpha = 1) by inverse CDF, truncated at `upper` with a
// tail-mass floor of eps reserved above the largest sample
inline Rational truncated_pareto(std::mt19937_64& rng, double upper, double eps = 0.01) {
  double u = unit_double(rng()) * (1.0 - eps);
  double x = 2.0 / (1.0 - u * (1.0 - 2.0 / upper));
  Rational r = milli(x);
  return r < Rational(2) ? Rational(2) : r;
}

// parent links defining each shape's tree; node 0 is the natural root
inline std::vector<int> shape_parents(Shape s, int n) {
  std::vector<int> parent(n, -1);
  for (int k = 1; k < n; ++k) {
    switch (s) {
      case Shape::Star: parent[k] = 0; break;
      case Shape::Snow3: parent[k] = (k - 1) / 3; break;  // ternary heap order
      case Shape::Path: parent[k] = k - 1; break;
    }
  }
  return parent;
}

}  // namespace gendetail

// Strictly positive univariate factor: a random-root product with heavy-tail
// coefficients is integrated once and squared, then shifted up by one, so the
// result is >= 1 everywhere and has degree 2*floor(deg/2).
inline UniPoly<Rational> rand_poly_univar(int var, int deg, const Rational& lo,
                                          const Rational& hi, double pareto_upper,
                                          std::mt19937_64& rng) {
  assert(deg >= 2);
  int generate_degree = deg / 2;
  int num_roots = generate_degree - 1;
  UniPoly<Rational> prod = UniPoly<Rational>::constant(Rational(1));
  prod.var = var;
  double dlo = lo.to_double(), dhi = hi.to_double();
  for (int r = 0; r < num_roots; ++r) {
    Rational root = gendetail::milli(uniform_in(rng, dlo, dhi));
    Rational c = gendetail::truncated_pareto(rng, pareto_upper);
    prod = poly_mul(prod, UniPoly<Rational>(var, {Rational(0) - c * root, c}));
  }
  UniPoly<Rational> unsquared = poly_integrate(prod);
  UniPoly<Rational> sq = poly_mul(unsquared, unsquared);
  return poly_add(sq, UniPoly<Rational>::constant(Rational(1)));
}

// Random tree-shaped instance: every tree edge holds n_clauses clauses of
// n_literals random halfspaces over that edge's plane, so the primal graph is
// exactly the requested shape; one literal per edge carries a separable
// polynomial (value 1 on the literal's complement); every variable carries the
// interior-favoring box weight (x-lo)(hi-x).
inline Problem<Rational> gen_problem(const GenConfig& cfg) {
  assert(cfg.n_vars >= 2);
  std::mt19937_64 rng(cfg.seed);
  Problem<Rational> P;
  P.kind = FuncKind::Poly;
  for (int v = 0; v < cfg.n_vars; ++v)
    P.formula.vars.push_back({"x" + std::to_string(v), cfg.lo, cfg.hi});

  std::vector<int> parent = gendetail::shape_parents(cfg.shape, cfg.n_vars);
  std::vector<std::pair<int, int>> edges;
  for (int k = 1; k < cfg.n_vars; ++k) edges.push_back({parent[k], k});

  double dlo = cfg.lo.to_double(), dhi = cfg.hi.to_double();
  auto random_halfspace = [&](int i, int j) {
    // line through two distinct box points; a fair coin picks the valid side
    for (;;) {
      Rational pi = gendetail::milli(uniform_in(rng, dlo, dhi));
      Rational pj = gendetail::milli(uniform_in(rng, dlo, dhi));
      Rational qi = gendetail::milli(uniform_in(rng, dlo, dhi));
      Rational qj = gendetail::milli(uniform_in(rng, dlo, dhi));
      Rational ni = qj - pj, nj = pi - qi;
      if (ni.is_zero() && nj.is_zero()) continue;
      Rational rhs = ni * pi + nj * pj;
      if (rng() % 2 == 1) {
        ni = Rational(0) - ni;
        nj = Rational(0) - nj;
        rhs = Rational(0) - rhs;
      }
      std::vector<std::pair<int, Rational>> cs;
      if (!ni.is_zero()) cs.push_back({i, ni});
      if (!nj.is_zero()) cs.push_back({j, nj});
      return LinearAtom(cs, rhs, LinearAtom::Le);
    }
  };

  // n_clauses clauses per edge; a clause never mixes edges, since a scope of
  // three or more variables would break the tree factorization
  std::vector<std::vector<LinearAtom>> edge_literals(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    for (int c = 0; c < cfg.n_clauses; ++c) {
      Clause cl;
      for (int l = 0; l < cfg.n_literals; ++l) {
        LinearAtom a = random_halfspace(edges[e].first, edges[e].second);
        cl.lits.push_back({a, false});
        edge_literals[e].push_back(a);
      }
      P.formula.clauses.push_back(std::move(cl));
    }
  }

  // one guarded separable factor per edge
  for (size_t e = 0; e < edges.size(); ++e) {
    auto [i, j] = edges[e];
    const LinearAtom& guard =
        edge_literals[e][(size_t)uniform_int(rng, 0, (long long)edge_literals[e].size() - 1)];
    EdgeFactor<Rational> ef;
    ef.i = i;
    ef.j = j;
    ef.pieces.push_back({{Literal{guard, false}},
                         rand_poly_univar(i, cfg.degree, cfg.lo, cfg.hi, cfg.pareto_upper, rng),
                         rand_poly_univar(j, cfg.degree, cfg.lo, cfg.hi, cfg.pareto_upper, rng),
                         std::nullopt});
    ef.pieces.push_back({{Literal{guard, true}},
                         UniPoly<Rational>::constant(Rational(1)),
                         UniPoly<Rational>::constant(Rational(1)),
                         std::nullopt});
    P.edge_factors.push_back(std::move(ef));
  }

  // (x - lo)(hi - x): zero at the box walls, so optima sit inside
  for (int v = 0; v < cfg.n_vars; ++v) {
    UniPoly<Rational> q(v, {Rational(0) - cfg.lo * cfg.hi, cfg.lo + cfg.hi, Rational(-1)});
    P.node_factors.emplace(v, pw_single(v, q, Ext<Rational>(cfg.lo), Ext<Rational>(cfg.hi),
                                        true, true));
  }
  return P;
}

inline std::string instance_name(const GenConfig& cfg) {
  return std::string(shape_name(cfg.shape)) + "_n" + std::to_string(cfg.n_vars) + "_deg" +
         std::to_string(cfg.degree) + "_c" + std::to_string(cfg.n_clauses) + "_l" +
         std::to_string(cfg.n_literals) + "_s" + std::to_string(cfg.seed);
}

}  // namespace cmap

#endif  // CMAP_GENERATOR_HPP
