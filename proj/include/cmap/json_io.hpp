#ifndef CMAP_JSON_IO_HPP
#define CMAP_JSON_IO_HPP

#include <json.hpp>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "problem.hpp"

namespace cmap {

// Insertion-ordered documents keep serialization byte-deterministic.
using Json = nlohmann::ordered_json;

struct MalformedInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Json rat_json(const Rational& r) { return r.str(); }

// Exact scalars come in as "num/den", "-3", or "0.25" strings; integral JSON
// numbers are accepted as-is. Non-integral floats are rejected so a document
// can never smuggle in a rounded value.
inline Rational rat_from_json(const Json& j, const std::string& what) {
  if (j.is_string()) {
    auto r = Rational::parse(j.get<std::string>());
    if (!r) throw MalformedInput(what + ": unparsable number '" + j.get<std::string>() + "'");
    return *r;
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned()) return Rational((long long)j.get<unsigned long long>());
  if (j.is_number_float())
    throw MalformedInput(what + ": write non-integer numbers as strings, e.g. \"1/3\" or \"0.25\"");
  throw MalformedInput(what + ": expected a number");
}

inline Json ext_json(const Ext<Rational>& e) {
  if (e.kind == Ext<Rational>::NegInf) return "-inf";
  if (e.kind == Ext<Rational>::PosInf) return "inf";
  return rat_json(e.v);
}

inline Ext<Rational> ext_from_json(const Json& j, const std::string& what) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return Ext<Rational>::neg_inf();
    if (s == "inf" || s == "+inf") return Ext<Rational>::pos_inf();
  }
  return Ext<Rational>(rat_from_json(j, what));
}

namespace jsondetail {

struct NameTable {
  std::map<std::string, int> index;
  int at(const std::string& name, const std::string& what) const {
    auto it = index.find(name);
    if (it == index.end()) throw MalformedInput(what + ": unknown variable '" + name + "'");
    return it->second;
  }
};

inline NameTable read_variables(const Json& j, CnfFormula& f) {
  if (!j.contains("variables") || !j["variables"].is_array() || j["variables"].empty())
    throw MalformedInput("variables: expected a non-empty array");
  NameTable names;
  for (const auto& v : j["variables"]) {
    VarInfo info;
    info.name = v.at("name").get<std::string>();
    info.lo = rat_from_json(v.at("lo"), "variable " + info.name + " lo");
    info.hi = rat_from_json(v.at("hi"), "variable " + info.name + " hi");
    if (info.hi < info.lo) throw MalformedInput("variable " + info.name + ": empty box");
    if (!names.index.emplace(info.name, (int)f.vars.size()).second)
      throw MalformedInput("duplicate variable name '" + info.name + "'");
    f.vars.push_back(std::move(info));
  }
  return names;
}

// A raw literal before equality rewriting.
struct RawLit {
  LinearAtom atom;  // op is Le or Lt; Eq is captured by the flag below
  bool eq = false;
  bool negated = false;
};

inline RawLit read_raw_literal(const Json& j, const NameTable& names, const std::string& what) {
  RawLit out;
  if (!j.contains("coeffs") || !j["coeffs"].is_object() || j["coeffs"].empty())
    throw MalformedInput(what + ": literal needs a non-empty coeffs object");
  for (const auto& [name, cj] : j["coeffs"].items()) {
    Rational c = rat_from_json(cj, what + " coeff of " + name);
    if (!c.is_zero()) out.atom.coeffs.push_back({names.at(name, what), c});
  }
  if (out.atom.coeffs.empty()) throw MalformedInput(what + ": literal has all-zero coefficients");
  out.atom.rhs = rat_from_json(j.at("const"), what + " const");
  const std::string op = j.at("op").get<std::string>();
  if (op == "<=")
    out.atom.op = LinearAtom::Le;
  else if (op == "<")
    out.atom.op = LinearAtom::Lt;
  else if (op == "=" || op == "==")
    out.eq = true;
  else
    throw MalformedInput(what + ": unknown op '" + op + "'");
  if (j.contains("negated")) out.negated = j.at("negated").get<bool>();
  if (!out.eq) out.atom.normalize();
  return out;
}

inline LinearAtom flipped(const LinearAtom& a) {
  LinearAtom r = a;
  for (auto& [v, c] : r.coeffs) c = Rational(0) - c;
  r.rhs = Rational(0) - r.rhs;
  r.normalize();
  return r;
}

// Equality literals are rewritten at the door: a positive (t = c) splits the
// clause into a (≤, ≥) pair of clauses, a negated one becomes the (<, >)
// disjunction inside the clause. Downstream code only ever sees Le and Lt.
inline std::vector<Clause> read_clause(const Json& j, const NameTable& names, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw MalformedInput(what + ": a clause is a non-empty array of literals");
  std::vector<Clause> expanded{Clause{}};
  int k = 0;
  for (const auto& lj : j) {
    RawLit raw = read_raw_literal(lj, names, what + " literal " + std::to_string(k++));
    if (!raw.eq) {
      for (auto& c : expanded) c.lits.push_back(Literal{raw.atom, raw.negated});
      continue;
    }
    LinearAtom le = raw.atom, ge;
    le.op = LinearAtom::Le;
    le.normalize();
    ge = flipped(le);
    if (raw.negated) {
      LinearAtom lt = le, gt = ge;
      lt.op = LinearAtom::Lt;
      gt.op = LinearAtom::Lt;
      for (auto& c : expanded) {
        c.lits.push_back(Literal{lt, false});
        c.lits.push_back(Literal{gt, false});
      }
    } else {
      std::vector<Clause> doubled;
      doubled.reserve(expanded.size() * 2);
      for (const auto& c : expanded) {
        Clause a = c, b = c;
        a.lits.push_back(Literal{le, false});
        b.lits.push_back(Literal{ge, false});
        doubled.push_back(std::move(a));
        doubled.push_back(std::move(b));
      }
      expanded = std::move(doubled);
    }
  }
  return expanded;
}

inline Json literal_json(const Literal& l, const std::vector<VarInfo>& vars) {
  Json coeffs = Json::object();
  for (const auto& [v, c] : l.atom.coeffs) coeffs[vars[v].name] = rat_json(c);
  Json out;
  out["coeffs"] = std::move(coeffs);
  out["const"] = rat_json(l.atom.rhs);
  out["op"] = l.atom.op == LinearAtom::Lt ? "<" : "<=";
  out["negated"] = l.neg;
  return out;
}

inline UniPoly<Rational> poly_from_json(const Json& j, int var, const std::string& what) {
  if (!j.is_array()) throw MalformedInput(what + ": expected a coefficient array");
  std::vector<Rational> c;
  int k = 0;
  for (const auto& cj : j) c.push_back(rat_from_json(cj, what + " coeff " + std::to_string(k++)));
  return UniPoly<Rational>(var, std::move(c));
}

inline Json poly_json(const UniPoly<Rational>& p) {
  Json out = Json::array();
  for (const auto& c : p.c) out.push_back(rat_json(c));
  return out;
}

inline FuncKind kind_from_json(const std::string& s, const std::string& what) {
  if (s == "poly" || s == "pp") return FuncKind::Poly;
  if (s == "exppoly" || s == "pep") return FuncKind::ExpPoly;
  throw MalformedInput(what + ": unknown kind '" + s + "'");
}

}  // namespace jsondetail

inline CnfFormula formula_from_json(const Json& j) {
  CnfFormula f;
  auto names = jsondetail::read_variables(j, f);
  if (j.contains("clauses")) {
    int k = 0;
    for (const auto& cj : j["clauses"])
      for (auto& c : jsondetail::read_clause(cj, names, "clause " + std::to_string(k++)))
        f.clauses.push_back(std::move(c));
  }
  return f;
}

inline Json formula_to_json(const CnfFormula& f) {
  Json j;
  j["variables"] = Json::array();
  for (const auto& v : f.vars)
    j["variables"].push_back({{"name", v.name}, {"lo", rat_json(v.lo)}, {"hi", rat_json(v.hi)}});
  j["clauses"] = Json::array();
  for (const auto& c : f.clauses) {
    Json cl = Json::array();
    for (const auto& l : c.lits) cl.push_back(jsondetail::literal_json(l, f.vars));
    j["clauses"].push_back(std::move(cl));
  }
  return j;
}

inline Problem<Rational> problem_from_json(const Json& j) {
  Problem<Rational> P;
  P.formula = formula_from_json(j);
  jsondetail::NameTable names;
  for (int v = 0; v < (int)P.formula.vars.size(); ++v) names.index[P.formula.vars[v].name] = v;
  P.kind = jsondetail::kind_from_json(j.value("kind", "pp"), "problem kind");

  if (j.contains("node_factors")) {
    for (const auto& [name, pjs] : j["node_factors"].items()) {
      int v = names.at(name, "node factor");
      PiecewiseFunc<Rational> pw;
      pw.var = v;
      for (const auto& pj : pjs) {
        Piece<Rational> pc;
        const std::string what = "node factor " + name;
        pc.lo = ext_from_json(pj.at("lo"), what + " lo");
        pc.hi = ext_from_json(pj.at("hi"), what + " hi");
        pc.lo_closed = pj.at("lo_closed").get<bool>();
        pc.hi_closed = pj.at("hi_closed").get<bool>();
        pc.kind = jsondetail::kind_from_json(pj.value("kind", j.value("kind", "pp")), what);
        pc.body = jsondetail::poly_from_json(pj.at("coeffs"), v, what);
        pw.pieces.push_back(std::move(pc));
      }
      if (!pw.invariants_ok())
        throw MalformedInput("node factor " + name + ": pieces out of order or overlapping");
      P.node_factors.emplace(v, std::move(pw));
    }
  }

  if (j.contains("edge_factors")) {
    for (const auto& ej : j["edge_factors"]) {
      EdgeFactor<Rational> ef;
      ef.i = names.at(ej.at("i").get<std::string>(), "edge factor");
      ef.j = names.at(ej.at("j").get<std::string>(), "edge factor");
      const std::string what =
          "edge factor " + ej.at("i").get<std::string>() + "," + ej.at("j").get<std::string>();
      for (const auto& pj : ej.at("pieces")) {
        EdgePiece<Rational> pc;
        if (pj.contains("guard")) {
          int k = 0;
          for (const auto& lj : pj["guard"]) {
            auto raw = jsondetail::read_raw_literal(lj, names, what + " guard " + std::to_string(k++));
            if (!raw.eq) {
              pc.guard.push_back(Literal{raw.atom, raw.negated});
            } else if (!raw.negated) {
              LinearAtom le = raw.atom;
              le.op = LinearAtom::Le;
              le.normalize();
              pc.guard.push_back(Literal{le, false});
              pc.guard.push_back(Literal{jsondetail::flipped(le), false});
            } else {
              throw MalformedInput(what + ": a negated equality cannot guard a piece");
            }
          }
        }
        if (pj.contains("terms")) {
          MultiPoly<Rational> mp;
          for (const auto& tj : pj["terms"]) {
            typename MultiPoly<Rational>::Term t;
            int pi = tj.value("pow_i", 0), pw_j = tj.value("pow_j", 0);
            if (pi > 0) t.vp.push_back({ef.i, pi});
            if (pw_j > 0) t.vp.push_back({ef.j, pw_j});
            t.coeff = rat_from_json(tj.at("coeff"), what + " term coeff");
            mp.terms.push_back(std::move(t));
          }
          mp.normalize();
          pc.joint = std::move(mp);
          pc.left = UniPoly<Rational>::constant(Rational(1));
          pc.right = UniPoly<Rational>::constant(Rational(1));
        } else {
          pc.left = jsondetail::poly_from_json(pj.at("left"), ef.i, what + " left");
          pc.right = jsondetail::poly_from_json(pj.at("right"), ef.j, what + " right");
        }
        ef.pieces.push_back(std::move(pc));
      }
      P.edge_factors.push_back(std::move(ef));
    }
  }
  return P;
}

inline Json problem_to_json(const Problem<Rational>& P) {
  Json j;
  j["kind"] = P.kind == FuncKind::Poly ? "pp" : "pep";
  Json fj = formula_to_json(P.formula);
  j["variables"] = std::move(fj["variables"]);
  j["clauses"] = std::move(fj["clauses"]);

  Json nf = Json::object();
  for (const auto& [v, pw] : P.node_factors) {
    Json arr = Json::array();
    for (const auto& pc : pw.pieces) {
      Json pj;
      pj["lo"] = ext_json(pc.lo);
      pj["lo_closed"] = pc.lo_closed;
      pj["hi"] = ext_json(pc.hi);
      pj["hi_closed"] = pc.hi_closed;
      pj["kind"] = pc.kind == FuncKind::Poly ? "poly" : "exppoly";
      pj["coeffs"] = jsondetail::poly_json(pc.body);
      arr.push_back(std::move(pj));
    }
    nf[P.formula.vars[v].name] = std::move(arr);
  }
  j["node_factors"] = std::move(nf);

  Json efs = Json::array();
  for (const auto& ef : P.edge_factors) {
    Json ej;
    ej["i"] = P.formula.vars[ef.i].name;
    ej["j"] = P.formula.vars[ef.j].name;
    Json pcs = Json::array();
    for (const auto& pc : ef.pieces) {
      Json pj;
      Json guard = Json::array();
      for (const auto& l : pc.guard) guard.push_back(jsondetail::literal_json(l, P.formula.vars));
      pj["guard"] = std::move(guard);
      if (pc.joint) {
        Json terms = Json::array();
        for (const auto& t : pc.joint->terms) {
          Json tj;
          int pi = 0, pjv = 0;
          for (const auto& [v, e] : t.vp) (v == ef.i ? pi : pjv) = e;
          tj["pow_i"] = pi;
          tj["pow_j"] = pjv;
          tj["coeff"] = rat_json(t.coeff);
          terms.push_back(std::move(tj));
        }
        pj["terms"] = std::move(terms);
      } else {
        pj["left"] = jsondetail::poly_json(pc.left);
        pj["right"] = jsondetail::poly_json(pc.right);
      }
      pcs.push_back(std::move(pj));
    }
    ej["pieces"] = std::move(pcs);
    efs.push_back(std::move(ej));
  }
  j["edge_factors"] = std::move(efs);
  return j;
}

}  // namespace cmap

#endif  // CMAP_JSON_IO_HPP
