#ifndef CMAP_PAMAP_HPP
#define CMAP_PAMAP_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <thread>

#include "bounds.hpp"
#include "density.hpp"
#include "enumerate.hpp"
#include "optimize.hpp"
#include "polytope.hpp"
#include "problem.hpp"

namespace cmap {

struct PamapOptions {
  enum class Optimizer { Combo, Adam, Grid };
  // Combo runs the projected particle climb and one grid refinement per
  // polytope and keeps the better result
  Optimizer optimizer = Optimizer::Combo;
  int particles = 10;
  int iters = 500;
  double lr = 0.1;
  bool prune = true;
  std::optional<double> deadline_seconds;
  std::uint64_t seed = 0;
  bool theory_propagation = false;
  int workers = 1;  // 1 is deterministic; more lets polytopes race soundly
};

struct PamapStats {
  long long polytopes_enumerated = 0;
  long long polytopes_pruned = 0;
  bool timed_out = false;
  double wall_seconds = 0;
  long long projection_moves = 0;  // candidates the final projection moved > 1e-6
};

// value is in score space: the density itself for Poly problems, the
// exponent for ExpPoly problems. The point always lies in the closure of
// the polytope that produced it; `feasible` reports the exact membership
// check (formula atoms plus density coverage) at that point.
struct PamapResult {
  bool found = false;
  Rational value;
  std::map<int, Rational> point;
  bool feasible = false;
  PamapStats stats;
};

namespace pamapdetail {

struct RegionTask {
  const EnumeratedRegion* region;
  std::map<int, std::pair<Rational, Rational>> box;
  Rational ub;
  size_t ordinal;  // emission position, the deterministic tie-break
};

struct Incumbent {
  bool found = false;
  Rational value;
  std::map<int, Rational> point;
};

inline double l2_gap(const std::map<int, double>& a, const std::map<int, Rational>& b) {
  double s = 0;
  for (const auto& [v, x] : a) {
    double d = x - b.at(v).to_double();
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace pamapdetail

// Polytope-enumeration MAP: carve the feasible set into polytopes, bound
// each one from above, and optimize them best-bound-first, pruning every
// polytope whose bound cannot beat the incumbent.
inline PamapResult pamap_solve(const CnfFormula& F, const DensityModel& D,
                               const PamapOptions& opts = {}) {
  auto t0 = std::chrono::steady_clock::now();
  PamapResult res;

  std::optional<std::chrono::steady_clock::time_point> dl;
  if (opts.deadline_seconds)
    dl = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                  std::chrono::duration<double>(*opts.deadline_seconds));
  EnumOptions eopts;
  eopts.theory_propagation = opts.theory_propagation;
  eopts.deadline = dl;
  EnumerationResult enumr = enumerate_regions(F, D, eopts);
  res.stats.polytopes_enumerated = (long long)enumr.regions.size();
  res.stats.timed_out = !enumr.complete;

  std::vector<pamapdetail::RegionTask> tasks;
  std::vector<int> all_vars;
  for (size_t v = 0; v < F.vars.size(); ++v) all_vars.push_back((int)v);
  for (size_t i = 0; i < enumr.regions.size(); ++i) {
    const auto& r = enumr.regions[i];
    if (!r.covered) continue;  // no mass there, nothing to maximize
    pamapdetail::RegionTask t;
    t.region = &r;
    t.box = polytope_box(r.polytope, all_vars);
    t.ub = selection_upper_bound(D, r.selection, t.box);
    t.ordinal = i;
    tasks.push_back(std::move(t));
  }
  if (tasks.empty()) {
    if (enumr.complete) throw Unsatisfiable();
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;  // deadline cut enumeration before any usable polytope
  }
  std::sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) {
    if (!(a.ub == b.ub)) return b.ub < a.ub;
    return a.ordinal < b.ordinal;
  });

  pamapdetail::Incumbent inc;
  std::mutex inc_mu;
  std::atomic<long long> pruned{0};
  std::atomic<bool> timed_out{false};
  std::atomic<long long> moved{0};
  std::atomic<size_t> next{0};

  auto deadline_hit = [&]() {
    return opts.deadline_seconds &&
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >=
               *opts.deadline_seconds;
  };

  auto optimize_task = [&](const pamapdetail::RegionTask& t) {
    const Polytope& P = t.region->polytope;
    const PieceSelection& sel = t.region->selection;
    std::map<int, std::pair<double, double>> dbox;
    for (const auto& [v, b] : t.box) dbox[v] = {b.first.to_double(), b.second.to_double()};
    ScoreFn score = [&](const std::map<int, double>& x) {
      return selection_score_d(D, sel, x);
    };
    FeasFn feas = [&](const std::map<int, Rational>& x) { return P.contains(x); };

    OptCandidate cand;
    std::optional<std::map<int, Rational>> exact_cand;
    bool want_grid = opts.optimizer != PamapOptions::Optimizer::Adam;
    bool want_adam = opts.optimizer != PamapOptions::Optimizer::Grid;
    if (want_grid) {
      try {
        GridParams gp;
        gp.deadline = dl;
        cand = grid_refine(dbox, score, feas, gp);
        if (cand.timed_out) timed_out = true;
      } catch (const NoFeasibleGridPoint&) {
        // sliver polytope the grid never hits: take its relative interior
        if (auto c = lra_interior_point(P.atoms)) {
          exact_cand = *c;
          cand.found = true;
          cand.point.clear();
          for (const auto& [v, r] : *c) cand.point[v] = r.to_double();
          cand.value = score(cand.point);
        }
      }
    }
    if (want_adam) {
      PcAdamOptions aopts;
      aopts.particles = opts.particles;
      aopts.iters = opts.iters;
      aopts.lr = opts.lr;
      aopts.seed = opts.seed ^ (0x9e3779b97f4a7c15ULL * (t.ordinal + 1));
      aopts.deadline = dl;
      aopts.project = [&](const std::map<int, double>& x) {
        try {
          return project_onto_polytope_d(x, P);
        } catch (const ProjectionStalled&) {
          return x;  // keep climbing; the feasibility gate screens it out
        }
      };
      GradFn grad = [&](const std::map<int, double>& x) {
        return selection_grad_d(D, sel, x);
      };
      OptCandidate a = pcadam(dbox, score, grad, feas, aopts);
      if (a.timed_out) timed_out = true;
      if (a.found && (!cand.found || a.value > cand.value)) {
        cand = a;
        exact_cand.reset();
      }
    }
    if (!cand.found) {
      if (auto c = lra_interior_point(P.atoms)) {
        exact_cand = *c;
        cand.found = true;
        for (const auto& [v, r] : *c) cand.point[v] = r.to_double();
        cand.value = 0;
      } else {
        return;  // feasible region with no relative interior point: give up
      }
    }

    std::map<int, Rational> pt =
        exact_cand ? *exact_cand : project_onto_polytope(cand.point, P);
    if (!exact_cand && pamapdetail::l2_gap(cand.point, pt) > 1e-6) ++moved;
    Rational val = selection_score_exact(D, sel, pt);
    std::lock_guard<std::mutex> lk(inc_mu);
    if (!inc.found || inc.value < val) {
      inc.found = true;
      inc.value = val;
      inc.point = pt;
    }
  };

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      if (deadline_hit()) {
        timed_out = true;
        return;
      }
      if (opts.prune) {
        bool skip = false;
        {
          std::lock_guard<std::mutex> lk(inc_mu);
          skip = inc.found && tasks[i].ub <= inc.value;
        }
        if (skip) {
          ++pruned;
          continue;
        }
      }
      optimize_task(tasks[i]);
    }
  };
  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  res.stats.polytopes_pruned = pruned.load();
  res.stats.timed_out = res.stats.timed_out || timed_out.load();
  res.stats.projection_moves = moved.load();
  if (inc.found) {
    res.found = true;
    res.value = inc.value;
    res.point = inc.point;
    res.feasible = formula_holds_at(F, res.point) && selection_at(D, res.point).has_value();
  }
  res.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline PamapResult pamap_solve(const Problem<Rational>& P, const PamapOptions& opts = {}) {
  return pamap_solve(P.formula, build_density(P), opts);
}

}  // namespace cmap

#endif  // CMAP_PAMAP_HPP
