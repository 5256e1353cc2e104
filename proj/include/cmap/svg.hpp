#ifndef CMAP_SVG_HPP
#define CMAP_SVG_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace cmap {

struct MalformedCsv : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvRow {
  std::string instance;
  std::string solver;
  long long budget = 0;
  std::optional<double> value;
  std::optional<double> rel_gap;
  double seconds = 0;
  std::string status;
};

namespace svgdetail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_num(const std::string& s, const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw MalformedCsv(what + ": unparsable number '" + s + "'");
  return v;
}

// instance ids look like "star_n4_deg2_c2_l2_s7"; the plots need the shape
// prefix and the variable count
inline std::pair<std::string, int> shape_and_n(const std::string& id) {
  size_t us = id.find('_');
  if (us == std::string::npos || us == 0 || us + 1 >= id.size() || id[us + 1] != 'n')
    throw MalformedCsv("instance id '" + id + "' lacks the shape_nN prefix");
  size_t k = us + 2, end = k;
  while (end < id.size() && std::isdigit((unsigned char)id[end])) ++end;
  if (end == k) throw MalformedCsv("instance id '" + id + "' lacks the shape_nN prefix");
  return {id.substr(0, us), std::atoi(id.substr(k, end - k).c_str())};
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};

}  // namespace svgdetail

inline std::vector<CsvRow> parse_results_csv(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  if (lines.empty()) throw MalformedCsv("empty document");
  if (lines[0] != "instance,solver,budget,value,rel_gap,seconds,status")
    throw MalformedCsv("unexpected header '" + lines[0] + "'");

  std::vector<CsvRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    auto f = svgdetail::split_fields(lines[i]);
    if (f.size() != 7) throw MalformedCsv(where + ": expected 7 fields, got " + std::to_string(f.size()));
    CsvRow r;
    r.instance = f[0];
    r.solver = f[1];
    r.budget = (long long)svgdetail::parse_num(f[2], where + " budget");
    if (!f[3].empty()) r.value = svgdetail::parse_num(f[3], where + " value");
    if (!f[4].empty()) r.rel_gap = svgdetail::parse_num(f[4], where + " rel_gap");
    r.seconds = svgdetail::parse_num(f[5], where + " seconds");
    r.status = f[6];
    if (r.status != "Solved" && r.status != "Infeasible" && r.status != "Timeout" &&
        r.status != "Error")
      throw MalformedCsv(where + ": unknown status '" + r.status + "'");
    rows.push_back(std::move(r));
  }
  return rows;
}

// One SVG per shape: per-solver median runtime of completed runs against the
// variable count, log-scale seconds. Timed-out runs appear individually as
// cross markers at the time they were cut. Bytes depend only on the row
// multiset, never on row order.
inline std::map<std::string, std::string> emit_plots(const std::string& csv_text) {
  using namespace svgdetail;
  std::vector<CsvRow> rows = parse_results_csv(csv_text);

  // shape -> solver -> N -> solved seconds pool; plus per-row timeout points
  std::map<std::string, std::map<std::string, std::map<int, std::vector<double>>>> solved;
  std::map<std::string, std::vector<std::tuple<std::string, int, double>>> timeouts;
  for (const auto& r : rows) {
    auto [shape, n] = shape_and_n(r.instance);
    if (r.status == "Solved") solved[shape][r.solver][n].push_back(r.seconds);
    if (r.status == "Timeout") timeouts[shape].push_back({r.solver, n, r.seconds});
  }

  std::map<std::string, std::string> files;
  std::set<std::string> shapes;
  for (const auto& [s, _] : solved) shapes.insert(s);
  for (const auto& [s, _] : timeouts) shapes.insert(s);

  for (const auto& shape : shapes) {
    // medians and plot extents
    std::map<std::string, std::map<int, double>> series;
    std::set<int> ns;
    std::set<std::string> solvers;
    double tmin = 1e300, tmax = -1e300;
    auto clampt = [](double t) { return std::max(t, 1e-6); };
    if (solved.count(shape))
      for (const auto& [solver, by_n] : solved.at(shape))
        for (const auto& [n, pool] : by_n) {
          double m = clampt(median(pool));
          series[solver][n] = m;
          ns.insert(n);
          solvers.insert(solver);
          tmin = std::min(tmin, m);
          tmax = std::max(tmax, m);
        }
    auto touts = timeouts.count(shape) ? timeouts.at(shape)
                                       : std::vector<std::tuple<std::string, int, double>>{};
    std::sort(touts.begin(), touts.end());
    for (const auto& [solver, n, secs] : touts) {
      ns.insert(n);
      solvers.insert(solver);
      tmin = std::min(tmin, clampt(secs));
      tmax = std::max(tmax, clampt(secs));
    }
    if (ns.empty()) continue;

    const double W = 640, H = 420, ML = 70, MR = 150, MT = 40, MB = 50;
    const double PW = W - ML - MR, PH = H - MT - MB;
    int nmin = *ns.begin(), nmax = *ns.rbegin();
    double lmin = std::floor(std::log10(tmin) - 0.25), lmax = std::ceil(std::log10(tmax) + 0.25);
    auto X = [&](double n) {
      return nmax > nmin ? ML + (n - nmin) / (nmax - nmin) * PW : ML + PW / 2;
    };
    auto Y = [&](double t) {
      return MT + (1 - (std::log10(clampt(t)) - lmin) / (lmax - lmin)) * PH;
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "viewBox=\"0 0 640 420\">\n";
    s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt(ML + PW / 2) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
         "text-anchor=\"middle\">" + shape + "</text>\n";
    // axes
    s += "<line x1=\"" + fmt(ML) + "\" y1=\"" + fmt(MT) + "\" x2=\"" + fmt(ML) + "\" y2=\"" +
         fmt(MT + PH) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt(ML) + "\" y1=\"" + fmt(MT + PH) + "\" x2=\"" + fmt(ML + PW) +
         "\" y2=\"" + fmt(MT + PH) + "\" stroke=\"black\"/>\n";
    for (int n : ns) {
      s += "<text x=\"" + fmt(X(n)) + "\" y=\"" + fmt(MT + PH + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
           std::to_string(n) + "</text>\n";
    }
    for (int d = (int)lmin; d <= (int)lmax; ++d) {
      char lbl[16];
      std::snprintf(lbl, sizeof lbl, "1e%d", d);
      s += "<line x1=\"" + fmt(ML - 4) + "\" y1=\"" + fmt(Y(std::pow(10.0, d))) + "\" x2=\"" +
           fmt(ML) + "\" y2=\"" + fmt(Y(std::pow(10.0, d))) + "\" stroke=\"black\"/>\n";
      s += "<text x=\"" + fmt(ML - 8) + "\" y=\"" + fmt(Y(std::pow(10.0, d)) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + lbl +
           "</text>\n";
    }
    s += "<text x=\"" + fmt(ML + PW / 2) + "\" y=\"" + fmt(H - 12) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">variables</text>\n";
    s += "<text x=\"16\" y=\"" + fmt(MT + PH / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt(MT + PH / 2) + ")\">seconds</text>\n";

    // color per solver name, stable under row order
    std::map<std::string, const char*> color;
    int ci = 0;
    for (const auto& solver : solvers) color[solver] = kPalette[ci++ % 6];

    for (const auto& [solver, by_n] : series) {
      std::string pts;
      for (const auto& [n, t] : by_n) {
        if (!pts.empty()) pts += " ";
        pts += fmt(X(n)) + "," + fmt(Y(t));
      }
      if (by_n.size() > 1)
        s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color[solver] +
             "\" stroke-width=\"1.5\"/>\n";
      for (const auto& [n, t] : by_n)
        s += "<circle cx=\"" + fmt(X(n)) + "\" cy=\"" + fmt(Y(t)) + "\" r=\"4\" fill=\"" +
             color[solver] + "\"/>\n";
    }
    for (const auto& [solver, n, secs] : touts) {
      double cx = X(n), cy = Y(secs);
      s += "<path d=\"M" + fmt(cx - 4) + " " + fmt(cy - 4) + " L" + fmt(cx + 4) + " " +
           fmt(cy + 4) + " M" + fmt(cx - 4) + " " + fmt(cy + 4) + " L" + fmt(cx + 4) + " " +
           fmt(cy - 4) + "\" stroke=\"" + color[solver] + "\" stroke-width=\"2\"/>\n";
    }

    double ly = MT + 8;
    for (const auto& solver : solvers) {
      s += "<line x1=\"" + fmt(W - MR + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
           fmt(W - MR + 34) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color[solver] +
           "\" stroke-width=\"2\"/>\n";
      s += "<text x=\"" + fmt(W - MR + 40) + "\" y=\"" + fmt(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + solver + "</text>\n";
      ly += 18;
    }
    if (!touts.empty()) {
      s += "<text x=\"" + fmt(W - MR + 10) + "\" y=\"" + fmt(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">x = timeout</text>\n";
    }
    s += "</svg>\n";
    files[shape + ".svg"] = std::move(s);
  }
  return files;
}

}  // namespace cmap

#endif  // CMAP_SVG_HPP
