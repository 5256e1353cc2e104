#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <string>

#include "cmap/json_io.hpp"
#include "cmap/pamap.hpp"
#include "tool_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"MAP by polytope enumeration with bound-based pruning"};
  std::string problem_path, optimizer = "combo";
  cmap::PamapOptions opts;
  double deadline = -1;
  app.add_option("--problem", problem_path, "problem JSON file")->required();
  app.add_option("--optimizer", optimizer, "per-polytope optimizer (default: both, best kept)")
      ->check(CLI::IsMember({"adam", "grid", "combo"}));
  app.add_option("--particles", opts.particles, "climb particles per polytope");
  app.add_option("--iters", opts.iters, "climb iterations per particle");
  app.add_option("--lr", opts.lr, "climb learning rate");
  app.add_flag("--no-prune", [&](size_t) { opts.prune = false; }, "optimize every polytope");
  app.add_option("--deadline", deadline, "wall-clock budget in seconds");
  app.add_option("--seed", opts.seed, "base seed for the per-polytope climbs");
  app.add_option("--workers", opts.workers, "polytopes optimized concurrently");
  CLI11_PARSE(app, argc, argv);
  if (optimizer == "adam") opts.optimizer = cmap::PamapOptions::Optimizer::Adam;
  if (optimizer == "grid") opts.optimizer = cmap::PamapOptions::Optimizer::Grid;
  if (deadline >= 0) opts.deadline_seconds = deadline;

  try {
    cmap::Problem<cmap::Rational> P =
        cmap::problem_from_json(cmap::Json::parse(read_file(problem_path)));
    cmap::Json out;
    try {
      cmap::PamapResult r = cmap::pamap_solve(P, opts);
      out["status"] = "ok";
      out["kind"] = P.kind == cmap::FuncKind::Poly ? "pp" : "pep";
      out["found"] = r.found;
      if (r.found) {
        double score = r.value.to_double();
        out["value"] = P.kind == cmap::FuncKind::ExpPoly ? std::exp(score) : score;
        out["score_exact"] = r.value.str();
        cmap::Json asg = cmap::Json::object(), asg_exact = cmap::Json::object();
        for (const auto& [v, x] : r.point) {
          asg[P.formula.vars[v].name] = x.to_double();
          asg_exact[P.formula.vars[v].name] = x.str();
        }
        out["assignment"] = std::move(asg);
        out["assignment_exact"] = std::move(asg_exact);
        out["feasible"] = r.feasible;
      }
      out["polytopes_enumerated"] = r.stats.polytopes_enumerated;
      out["polytopes_pruned"] = r.stats.polytopes_pruned;
      out["timed_out"] = r.stats.timed_out;
      out["stats"] = {{"wall_seconds", r.stats.wall_seconds},
                      {"projection_moves", r.stats.projection_moves}};
    } catch (const cmap::Unsatisfiable&) {
      out["status"] = "unsatisfiable";
    }
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
