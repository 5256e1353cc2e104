#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cmap/bench.hpp"
#include "cmap/json_io.hpp"
#include "tool_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"run the solver suite over a directory of problem files"};
  std::string suite_dir, out_path;
  cmap::SuiteOptions opts;
  std::vector<std::string> solver_names{"grid", "mpmap", "pamap", "pcadam"};
  app.add_option("--suite", suite_dir, "directory of problem JSON files")->required();
  app.add_option("--out", out_path, "output CSV")->required();
  app.add_option("--deadline", opts.deadline_seconds, "seconds per instance-solver pair");
  app.add_option("--workers", opts.workers, "instances run concurrently");
  app.add_option("--solvers", solver_names, "subset of grid,mpmap,pamap,pcadam")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<cmap::SolverId> solvers;
    for (const auto& s : solver_names) {
      if (s == "grid")
        solvers.push_back(cmap::SolverId::Grid);
      else if (s == "mpmap")
        solvers.push_back(cmap::SolverId::MpMap);
      else if (s == "pamap")
        solvers.push_back(cmap::SolverId::Pamap);
      else if (s == "pcadam")
        solvers.push_back(cmap::SolverId::PcAdam);
      else
        throw std::runtime_error("unknown solver '" + s + "'");
    }

    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(suite_dir))
      if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<cmap::SuiteInstance> instances;
    for (const auto& p : paths)
      instances.push_back({std::filesystem::path(p).stem().string(),
                           cmap::problem_from_json(cmap::Json::parse(read_file(p)))});

    auto records = cmap::run_suite(instances, solvers, opts);
    write_file(out_path, cmap::records_to_csv(records));
    std::printf("%zu instances, %zu records -> %s\n", instances.size(), records.size(),
                out_path.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
