#ifndef CMAP_BENCH_HPP
#define CMAP_BENCH_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "density.hpp"
#include "mpmap.hpp"
#include "pamap.hpp"
#include "problem.hpp"
#include "rng.hpp"

namespace cmap {

enum class SolverId { Grid, MpMap, Pamap, PcAdam };

inline const char* solver_name(SolverId s) {
  switch (s) {
    case SolverId::Grid: return "grid";
    case SolverId::MpMap: return "mpmap";
    case SolverId::Pamap: return "pamap";
    case SolverId::PcAdam: return "pcadam";
  }
  return "?";
}

enum class RunStatus { Solved, Infeasible, Timeout, Error };

inline const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Solved: return "Solved";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::Timeout: return "Timeout";
    case RunStatus::Error: return "Error";
  }
  return "?";
}

// One solver run at one budget. `value` is in density space (the exponent is
// exponentiated for log-space problems) and is absent when the run produced
// no feasible point. rel_gap = max(0, v* - v)/v* against the best value any
// completed run on the instance found.
struct RunRecord {
  std::string instance;
  std::string solver;
  long long budget = 0;
  std::optional<double> value;
  std::optional<double> rel_gap;
  double seconds = 0;
  RunStatus status = RunStatus::Error;
};

struct SuiteInstance {
  std::string name;
  Problem<Rational> problem;
};

struct SuiteOptions {
  double deadline_seconds = 60;  // per instance-solver pair
  int workers = 1;
  double baseline_rel_tol = 0.01;  // ladder stop: within this of the grid value
};

// anytime budget ladders, escalated until the grid baseline is matched
inline constexpr int kPamapIterLadder[] = {1, 2, 4, 16, 32, 64, 128, 256};
inline constexpr long long kPcadamParticleLadder[] = {100, 1000, 10000, 100000, 1000000};

namespace benchdetail {

inline double density_space(FuncKind kind, double score) {
  return kind == FuncKind::ExpPoly ? std::exp(score) : score;
}

struct InstanceContext {
  const SuiteInstance* inst;
  DensityModel density;
  std::map<int, std::pair<double, double>> box;
  ScoreFn score;
  GradFn grad;
  FeasFn feasible;
  std::optional<double> baseline;  // grid value in density space
};

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// exact value of a gate-passing point, converted to density space
inline double exact_value_at(const InstanceContext& cx, const std::map<int, double>& pt) {
  auto s = density_model_score(cx.density, exact_of(pt));
  assert(s && "scored point lost its density coverage");
  return density_space(cx.inst->problem.kind, s->to_double());
}

// The baseline is the shrinking grid search run inside every enumerated
// polytope. It reports the grid resolution as its budget and is meant to be
// cheap to beat; the ladders below escalate until they match it.
inline RunRecord run_grid(InstanceContext& cx, const SuiteOptions& opts) {
  RunRecord rec;
  rec.instance = cx.inst->name;
  rec.solver = solver_name(SolverId::Grid);
  rec.budget = GridParams{}.per_dim;
  auto t0 = std::chrono::steady_clock::now();
  try {
    PamapOptions po;
    po.optimizer = PamapOptions::Optimizer::Grid;
    po.deadline_seconds = opts.deadline_seconds;
    PamapResult r = pamap_solve(cx.inst->problem, po);
    if (r.found) {
      rec.value = density_space(cx.inst->problem.kind, r.value.to_double());
      cx.baseline = rec.value;
    }
    rec.status = r.stats.timed_out ? RunStatus::Timeout : RunStatus::Solved;
  } catch (const Unsatisfiable&) {
    rec.status = RunStatus::Infeasible;
  } catch (const std::exception&) {
    rec.status = RunStatus::Error;
  }
  rec.seconds = elapsed(t0);
  return rec;
}

inline RunRecord run_mpmap(const InstanceContext& cx) {
  RunRecord rec;
  rec.instance = cx.inst->name;
  rec.solver = solver_name(SolverId::MpMap);
  rec.budget = 1;
  auto t0 = std::chrono::steady_clock::now();
  try {
    MapResult<Rational> r = solve(cx.inst->problem);
    rec.value = density_space(cx.inst->problem.kind, r.value.to_double());
    rec.status = RunStatus::Solved;
  } catch (const Unsatisfiable&) {
    rec.status = RunStatus::Infeasible;
  } catch (const std::exception&) {
    rec.status = RunStatus::Error;
  }
  rec.seconds = elapsed(t0);
  return rec;
}

inline bool beats_baseline(const InstanceContext& cx, const SuiteOptions& opts,
                           const std::optional<double>& value) {
  return value && cx.baseline && *value >= *cx.baseline * (1 - opts.baseline_rel_tol);
}

inline void run_pamap_ladder(const InstanceContext& cx, const SuiteOptions& opts,
                             std::vector<RunRecord>& out) {
  auto start = std::chrono::steady_clock::now();
  for (int iters : kPamapIterLadder) {
    double remaining = opts.deadline_seconds - elapsed(start);
    if (remaining <= 0) break;
    RunRecord rec;
    rec.instance = cx.inst->name;
    rec.solver = solver_name(SolverId::Pamap);
    rec.budget = iters;
    auto t0 = std::chrono::steady_clock::now();
    bool stop = false;
    try {
      PamapOptions po;
      po.iters = iters;
      po.seed = fnv1a64(cx.inst->name);
      po.deadline_seconds = remaining;
      PamapResult r = pamap_solve(cx.inst->problem, po);
      if (r.found) rec.value = density_space(cx.inst->problem.kind, r.value.to_double());
      rec.status = r.stats.timed_out ? RunStatus::Timeout : RunStatus::Solved;
      stop = r.stats.timed_out || beats_baseline(cx, opts, rec.value);
    } catch (const Unsatisfiable&) {
      rec.status = RunStatus::Infeasible;
      stop = true;  // proven massless; higher budgets cannot change that
    } catch (const std::exception&) {
      rec.status = RunStatus::Error;
      stop = true;
    }
    rec.seconds = elapsed(t0);
    out.push_back(std::move(rec));
    if (stop) break;
  }
}

inline void run_pcadam_ladder(const InstanceContext& cx, const SuiteOptions& opts,
                              std::vector<RunRecord>& out) {
  auto start = std::chrono::steady_clock::now();
  for (long long particles : kPcadamParticleLadder) {
    double remaining = opts.deadline_seconds - elapsed(start);
    if (remaining <= 0) break;
    RunRecord rec;
    rec.instance = cx.inst->name;
    rec.solver = solver_name(SolverId::PcAdam);
    rec.budget = particles;
    auto t0 = std::chrono::steady_clock::now();
    bool stop = false;
    try {
      PcAdamOptions ao;
      ao.particles = (int)particles;
      ao.seed = fnv1a64(cx.inst->name) ^ 0xadadadadadadadadULL;
      ao.deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(remaining));
      OptCandidate c = pcadam(cx.box, cx.score, cx.grad, cx.feasible, ao);
      if (c.found) rec.value = exact_value_at(cx, c.point);
      rec.status = c.timed_out ? RunStatus::Timeout : RunStatus::Solved;
      stop = c.timed_out || beats_baseline(cx, opts, rec.value);
    } catch (const std::exception&) {
      rec.status = RunStatus::Error;
      stop = true;
    }
    rec.seconds = elapsed(t0);
    out.push_back(std::move(rec));
    if (stop) break;
  }
}

inline std::vector<RunRecord> run_instance(const SuiteInstance& inst,
                                           const std::vector<SolverId>& solvers,
                                           const SuiteOptions& opts) {
  InstanceContext cx;
  cx.inst = &inst;
  cx.density = build_density(inst.problem);
  const CnfFormula& F = inst.problem.formula;
  for (int v = 0; v < (int)F.vars.size(); ++v)
    cx.box[v] = {F.vars[v].lo.to_double(), F.vars[v].hi.to_double()};
  cx.score = [&cx](const std::map<int, double>& x) { return model_score_d(cx.density, x); };
  cx.grad = [&cx](const std::map<int, double>& x) { return model_grad_d(cx.density, x); };
  cx.feasible = [&cx, &F](const std::map<int, Rational>& x) {
    return formula_holds_at(F, x) && selection_at(cx.density, x).has_value();
  };

  // the grid oracle always runs first: it is the baseline the budget ladders
  // escalate against; its record is emitted only when grid was requested
  std::vector<RunRecord> out;
  RunRecord grid_rec = run_grid(cx, opts);

  for (SolverId s : solvers) {
    switch (s) {
      case SolverId::Grid: out.push_back(grid_rec); break;
      case SolverId::MpMap: out.push_back(run_mpmap(cx)); break;
      case SolverId::Pamap: run_pamap_ladder(cx, opts, out); break;
      case SolverId::PcAdam: run_pcadam_ladder(cx, opts, out); break;
    }
  }

  // best completed value defines the gap; partial (timed out) values do not
  std::optional<double> vstar;
  for (const auto& r : out)
    if (r.status == RunStatus::Solved && r.value && (!vstar || *r.value > *vstar))
      vstar = r.value;
  for (auto& r : out) {
    if (!r.value || !vstar) continue;
    r.rel_gap = *vstar > 0 ? std::max(0.0, (*vstar - *r.value) / *vstar) : 0.0;
  }
  return out;
}

}  // namespace benchdetail

// Runs every requested solver on every instance and collects one record per
// run. Instances are distributed over worker threads; records keep the
// caller's instance order, then the caller's solver order, then ascending
// budget, so output order is independent of scheduling.
inline std::vector<RunRecord> run_suite(const std::vector<SuiteInstance>& instances,
                                        const std::vector<SolverId>& solvers,
                                        const SuiteOptions& opts = {}) {
  std::vector<RunRecord> all;
  if (solvers.empty() || instances.empty()) return all;
  std::vector<std::vector<RunRecord>> slots(instances.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= instances.size()) return;
      slots[i] = benchdetail::run_instance(instances[i], solvers, opts);
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
  for (auto& s : slots)
    for (auto& r : s) all.push_back(std::move(r));
  return all;
}

inline std::string csv_header() { return "instance,solver,budget,value,rel_gap,seconds,status"; }

inline std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = csv_header() + "\n";
  char buf[64];
  auto num = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
  };
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%lld", r.budget);
    out += r.instance + "," + r.solver + "," + buf + "," + num(r.value) + "," + num(r.rel_gap);
    std::snprintf(buf, sizeof buf, ",%.6f,", r.seconds);
    out += buf;
    out += status_name(r.status);
    out += "\n";
  }
  return out;
}

}  // namespace cmap

#endif  // CMAP_BENCH_HPP
