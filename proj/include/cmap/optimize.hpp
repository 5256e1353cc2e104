#ifndef CMAP_OPTIMIZE_HPP
#define CMAP_OPTIMIZE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"
#include "rng.hpp"

namespace cmap {

struct NoFeasibleGridPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// best point an optimizer saw that passed the exact feasibility gate;
// timed_out marks a run the deadline cut short of its full budget
struct OptCandidate {
  bool found = false;
  double value = -std::numeric_limits<double>::infinity();
  std::map<int, double> point;
  bool timed_out = false;
};

using ScoreFn = std::function<double(const std::map<int, double>&)>;
using GradFn = std::function<std::map<int, double>(const std::map<int, double>&)>;
using FeasFn = std::function<bool(const std::map<int, Rational>&)>;
using ProjectFn = std::function<std::map<int, double>(const std::map<int, double>&)>;

namespace optdetail {

inline std::map<int, Rational> exact_point(const std::map<int, double>& x) {
  std::map<int, Rational> out;
  for (const auto& [v, d] : x) out[v] = Rational::from_double(d);
  return out;
}

}  // namespace optdetail

struct PcAdamOptions {
  int particles = 10;
  int iters = 2500;
  double lr = 0.001;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  ProjectFn project;  // optional per-step repair, applied after each update
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Projected-climb Adam over a box: particles ascend the unconstrained score
// while only snapshots passing the exact feasibility gate can become the
// incumbent. Never-feasible runs report found = false with value -inf.
// Particles are independent, so they run one after another; memory stays
// flat no matter how large the particle budget is.
inline OptCandidate pcadam(const std::map<int, std::pair<double, double>>& box,
                           const ScoreFn& score, const GradFn& grad,
                           const FeasFn& feasible, const PcAdamOptions& opts,
                           const std::vector<std::map<int, double>>& init = {}) {
  std::mt19937_64 rng(opts.seed);
  OptCandidate best;
  auto consider = [&](const std::map<int, double>& x) {
    if (!feasible(optdetail::exact_point(x))) return;
    double s = score(x);
    if (!best.found || s > best.value) {
      best.found = true;
      best.value = s;
      best.point = x;
    }
  };
  auto expired = [&]() {
    return opts.deadline && std::chrono::steady_clock::now() >= *opts.deadline;
  };
  for (int p = 0; p < opts.particles; ++p) {
    std::map<int, double> x;
    if ((size_t)p < init.size()) {
      x = init[p];
    } else {
      for (const auto& [v, b] : box)
        x[v] = b.first + (b.second - b.first) * unit_double(rng());
    }
    consider(x);
    std::map<int, double> m, v;
    for (const auto& [var, _] : x) {
      m[var] = 0;
      v[var] = 0;
    }
    double b1t = 1, b2t = 1;
    for (int t = 1; t <= opts.iters; ++t) {
      if (expired()) {
        best.timed_out = true;
        return best;
      }
      b1t *= opts.beta1;
      b2t *= opts.beta2;
      std::map<int, double> g = grad(x);
      for (auto& [var, xv] : x) {
        double gv = g.count(var) ? g.at(var) : 0.0;
        m[var] = opts.beta1 * m[var] + (1 - opts.beta1) * gv;
        v[var] = opts.beta2 * v[var] + (1 - opts.beta2) * gv * gv;
        double mh = m[var] / (1 - b1t);
        double vh = v[var] / (1 - b2t);
        xv += opts.lr * mh / (std::sqrt(vh) + opts.eps);  // ascent
      }
      if (opts.project) x = opts.project(x);
      consider(x);
    }
  }
  return best;
}

struct GridParams {
  int per_dim = 10;
  int rounds = 30;
  double shrink = 0.2;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Recursive grid search: evaluate a uniform grid over the box, keep the best
// exactly-feasible point, then shrink the box around it and repeat. Throws
// NoFeasibleGridPoint when no round produced a feasible grid point. A deadline
// cut returns the incumbent so far with timed_out set instead of throwing.
inline OptCandidate grid_refine(const std::map<int, std::pair<double, double>>& box0,
                                const ScoreFn& score, const FeasFn& feasible,
                                const GridParams& params = {}) {
  std::map<int, std::pair<double, double>> box = box0;
  OptCandidate best;
  std::vector<int> vars;
  for (const auto& [v, _] : box) vars.push_back(v);
  if (vars.empty()) {
    std::map<int, double> x;
    if (!feasible({})) throw NoFeasibleGridPoint("no grid point satisfied the constraints");
    return {true, score(x), x};
  }
  long long evals = 0;
  auto expired = [&]() {
    return params.deadline && (++evals & 1023) == 0 &&
           std::chrono::steady_clock::now() >= *params.deadline;
  };
  for (int round = 0; round < params.rounds; ++round) {
    std::vector<int> steps(vars.size(), 0);
    std::map<int, double> x;
    bool done = false;
    while (!done) {
      if (expired()) {
        best.timed_out = true;
        return best;
      }
      for (size_t k = 0; k < vars.size(); ++k) {
        const auto& b = box.at(vars[k]);
        double frac = params.per_dim > 1 ? double(steps[k]) / (params.per_dim - 1) : 0.5;
        x[vars[k]] = b.first + (b.second - b.first) * frac;
      }
      if (feasible(optdetail::exact_point(x))) {
        double s = score(x);
        if (!best.found || s > best.value) {
          best.found = true;
          best.value = s;
          best.point = x;
        }
      }
      size_t k = 0;
      while (k < vars.size() && ++steps[k] == params.per_dim) steps[k++] = 0;
      if (k == vars.size()) done = true;
    }
    if (!best.found) {
      if (round + 1 == params.rounds)
        throw NoFeasibleGridPoint("no grid point satisfied the constraints");
      continue;  // nothing to recenter on yet; the next round rescans
    }
    for (int v : vars) {
      const auto& orig = box0.at(v);
      double half = (box.at(v).second - box.at(v).first) * params.shrink / 2;
      double c = best.point.at(v);
      double lo = std::max(orig.first, c - half);
      double hi = std::min(orig.second, c + half);
      box[v] = {lo, hi};
    }
  }
  if (!best.found) throw NoFeasibleGridPoint("no grid point satisfied the constraints");
  return best;
}

}  // namespace cmap

#endif  // CMAP_OPTIMIZE_HPP
