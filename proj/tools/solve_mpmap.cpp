#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cmap/json_io.hpp"
#include "cmap/mpmap.hpp"
#include "tool_io.hpp"

namespace {

template <class S>
cmap::Json coeff_json(const S& c) {
  if constexpr (std::is_same_v<S, cmap::Rational>)
    return cmap::rat_json(c);
  else
    return c;
}

template <class S>
cmap::Json ext_out(const cmap::Ext<S>& e) {
  if (e.kind == cmap::Ext<S>::NegInf) return "-inf";
  if (e.kind == cmap::Ext<S>::PosInf) return "inf";
  return coeff_json(e.v);
}

template <class S>
cmap::Json message_json(const std::string& child, const std::string& parent,
                        const cmap::PiecewiseFunc<S>& m) {
  cmap::Json pieces = cmap::Json::array();
  for (const auto& p : m.pieces) {
    cmap::Json pj;
    pj["lo"] = ext_out(p.lo);
    pj["lo_closed"] = p.lo_closed;
    pj["hi"] = ext_out(p.hi);
    pj["hi_closed"] = p.hi_closed;
    pj["kind"] = p.kind == cmap::FuncKind::Poly ? "poly" : "exppoly";
    cmap::Json coeffs = cmap::Json::array();
    for (const auto& c : p.body.c) coeffs.push_back(coeff_json(c));
    pj["coeffs"] = std::move(coeffs);
    pieces.push_back(std::move(pj));
  }
  cmap::Json out;
  out["child"] = child;
  out["parent"] = parent;
  out["pieces"] = std::move(pieces);
  return out;
}

template <class S>
int run(const cmap::Problem<S>& P, const std::string& emit_dir, bool exact) {
  cmap::SolveOptions<S> sopts;
  int seq = 0;
  if (!emit_dir.empty()) {
    std::filesystem::create_directories(emit_dir);
    sopts.on_message = [&](int child, int parent, const cmap::PiecewiseFunc<S>& m) {
      const auto& vars = P.formula.vars;
      char name[64];
      std::snprintf(name, sizeof name, "%03d_", seq++);
      std::string path = emit_dir + "/" + name + vars[child].name + "_to_" +
                         (parent < 0 ? std::string("root") : vars[parent].name) + ".json";
      write_file(path, message_json(vars[child].name,
                                    parent < 0 ? std::string("root") : vars[parent].name, m)
                           .dump(2) +
                           "\n");
    };
  }

  cmap::Json out;
  try {
    cmap::MapResult<S> r = cmap::solve(P, sopts);
    out["status"] = "ok";
    out["kind"] = P.kind == cmap::FuncKind::Poly ? "pp" : "pep";
    double score = cmap::scalar_traits<S>::to_double(r.value);
    out["value"] = P.kind == cmap::FuncKind::ExpPoly ? std::exp(score) : score;
    if (exact) out["score_exact"] = cmap::scalar_traits<S>::to_rat(r.value).str();
    cmap::Json asg = cmap::Json::object(), asg_exact = cmap::Json::object();
    for (const auto& [v, x] : r.assignment) {
      asg[P.formula.vars[v].name] = cmap::scalar_traits<S>::to_double(x);
      if (exact) asg_exact[P.formula.vars[v].name] = cmap::scalar_traits<S>::to_rat(x).str();
    }
    out["assignment"] = std::move(asg);
    if (exact) out["assignment_exact"] = std::move(asg_exact);
    out["attained"] = r.attained;
    out["stats"] = {{"max_message_pieces", r.stats.max_message_pieces},
                    {"total_message_pieces", r.stats.total_message_pieces},
                    {"messages", r.stats.messages.size()},
                    {"wall_seconds", r.stats.wall_seconds}};
  } catch (const cmap::Unsatisfiable&) {
    out["status"] = "unsatisfiable";
  }
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact MAP over a tree-structured constrained density"};
  std::string problem_path, backend = "exact", emit_dir;
  app.add_option("--problem", problem_path, "problem JSON file")->required();
  app.add_option("--backend", backend, "arithmetic backend")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--emit-messages", emit_dir, "directory for per-message dumps");
  CLI11_PARSE(app, argc, argv);

  try {
    cmap::Problem<cmap::Rational> P =
        cmap::problem_from_json(cmap::Json::parse(read_file(problem_path)));
    if (backend == "float") return run(cmap::convert_problem<double>(P), emit_dir, false);
    return run(P, emit_dir, true);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
