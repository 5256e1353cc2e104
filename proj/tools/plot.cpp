#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cmap/svg.hpp"
#include "tool_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"render per-shape runtime plots from a results CSV"};
  std::string in_path, out_dir;
  app.add_option("--in", in_path, "results CSV")->required();
  app.add_option("--out", out_dir, "output directory for SVG files")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    auto files = cmap::emit_plots(read_file(in_path));
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, bytes] : files) {
      write_file(out_dir + "/" + name, bytes);
      std::printf("%s/%s\n", out_dir.c_str(), name.c_str());
    }
    if (files.empty()) std::printf("no plottable rows in %s\n", in_path.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
