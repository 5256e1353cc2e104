#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "cmap/smt2.hpp"
#include "tool_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"convert a QF_LRA and/or/not document to the formula JSON schema"};
  std::string in_path, out_path;
  std::vector<std::string> box;
  app.add_option("input", in_path, "SMT-LIB2 file")->required();
  app.add_option("-o,--out", out_path, "output JSON (default: stdout)");
  app.add_option("--box", box, "fallback LO HI for variables without bound assertions")
      ->expected(2);
  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<std::pair<cmap::Rational, cmap::Rational>> fallback;
    if (!box.empty()) {
      auto lo = cmap::Rational::parse(box[0]), hi = cmap::Rational::parse(box[1]);
      if (!lo || !hi) throw std::runtime_error("unparsable --box bounds");
      fallback = {*lo, *hi};
    }
    cmap::Json j = cmap::formula_json_from_smt2(read_file(in_path), fallback);
    std::string text = j.dump(2) + "\n";
    if (out_path.empty())
      std::fputs(text.c_str(), stdout);
    else
      write_file(out_path, text);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
