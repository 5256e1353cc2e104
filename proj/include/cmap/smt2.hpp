#ifndef CMAP_SMT2_HPP
#define CMAP_SMT2_HPP

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json_io.hpp"
#include "rational.hpp"

namespace cmap {

struct Smt2Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace smtdetail {

struct Sexp {
  std::string tok;           // nonempty for atoms
  std::vector<Sexp> kids;    // nonempty for lists
  bool atom() const { return !tok.empty(); }
};

inline std::vector<Sexp> parse_sexprs(const std::string& text) {
  std::vector<std::string> toks;
  size_t i = 0, n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
    } else if (c == ';') {
      while (i < n && text[i] != '\n') ++i;
    } else if (c == '(' || c == ')') {
      toks.push_back(std::string(1, c));
      ++i;
    } else if (c == '"' || c == '|') {
      char quote = c;
      size_t j = i + 1;
      while (j < n && text[j] != quote) ++j;
      if (j == n) throw Smt2Error("unterminated quote");
      toks.push_back(text.substr(i, j - i + 1));
      i = j + 1;
    } else {
      size_t j = i;
      while (j < n && !std::isspace((unsigned char)text[j]) && text[j] != '(' && text[j] != ')' &&
             text[j] != ';')
        ++j;
      toks.push_back(text.substr(i, j - i));
      i = j;
    }
  }

  std::vector<Sexp> roots;
  std::vector<Sexp> stack;  // open lists
  for (const auto& t : toks) {
    if (t == "(") {
      stack.push_back(Sexp{});
    } else if (t == ")") {
      if (stack.empty()) throw Smt2Error("unbalanced ')'");
      Sexp done = std::move(stack.back());
      stack.pop_back();
      if (done.kids.empty() && done.tok.empty()) throw Smt2Error("empty list '()'");
      if (stack.empty())
        roots.push_back(std::move(done));
      else
        stack.back().kids.push_back(std::move(done));
    } else {
      Sexp a;
      a.tok = t;
      if (stack.empty())
        roots.push_back(std::move(a));
      else
        stack.back().kids.push_back(std::move(a));
    }
  }
  if (!stack.empty()) throw Smt2Error("unbalanced '('");
  return roots;
}

// linear term: coefficient per variable plus a constant
struct LinTerm {
  std::map<std::string, Rational> c;
  Rational k;
};

inline bool is_numeral(const std::string& t) {
  size_t i = t.size() > 1 && (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i >= t.size()) return false;
  for (; i < t.size(); ++i)
    if (!std::isdigit((unsigned char)t[i]) && t[i] != '.' && t[i] != '/') return false;
  return true;
}

inline LinTerm lin_term(const Sexp& e, const std::set<std::string>& vars) {
  LinTerm out;
  if (e.atom()) {
    if (vars.count(e.tok)) {
      out.c[e.tok] = Rational(1);
      return out;
    }
    if (is_numeral(e.tok)) {
      auto r = Rational::parse(e.tok);
      if (!r) throw Smt2Error("unparsable numeral '" + e.tok + "'");
      out.k = *r;
      return out;
    }
    throw Smt2Error("unknown symbol '" + e.tok + "'");
  }
  const std::string& op = e.kids[0].tok;
  auto args = [&](size_t from) {
    std::vector<LinTerm> ts;
    for (size_t i = from; i < e.kids.size(); ++i) ts.push_back(lin_term(e.kids[i], vars));
    return ts;
  };
  if (op == "+") {
    if (e.kids.size() < 2) throw Smt2Error("'+' needs arguments");
    for (auto& t : args(1)) {
      out.k = out.k + t.k;
      for (auto& [v, a] : t.c) out.c[v] = out.c[v] + a;
    }
    return out;
  }
  if (op == "-") {
    auto ts = args(1);
    if (ts.empty()) throw Smt2Error("'-' needs arguments");
    if (ts.size() == 1) {
      out.k = Rational(0) - ts[0].k;
      for (auto& [v, a] : ts[0].c) out.c[v] = Rational(0) - a;
      return out;
    }
    out = ts[0];
    for (size_t i = 1; i < ts.size(); ++i) {
      out.k = out.k - ts[i].k;
      for (auto& [v, a] : ts[i].c) out.c[v] = out.c[v] - a;
    }
    return out;
  }
  if (op == "*") {
    if (e.kids.size() < 2) throw Smt2Error("'*' needs arguments");
    out.k = Rational(1);
    for (auto& t : args(1)) {
      if (t.c.empty()) {  // constant factor
        out.k = out.k * t.k;
        for (auto& [v, a] : out.c) a = a * t.k;
      } else if (out.c.empty()) {
        Rational scale = out.k;
        out = t;
        out.k = out.k * scale;
        for (auto& [v, a] : out.c) a = a * scale;
      } else {
        throw Smt2Error("nonlinear product of two variable terms");
      }
    }
    return out;
  }
  if (op == "/") {
    if (e.kids.size() != 3) throw Smt2Error("'/' takes two arguments");
    LinTerm num = lin_term(e.kids[1], vars), den = lin_term(e.kids[2], vars);
    if (!den.c.empty()) throw Smt2Error("division by a variable term");
    if (den.k.is_zero()) throw Smt2Error("division by zero");
    out = num;
    out.k = out.k / den.k;
    for (auto& [v, a] : out.c) a = a / den.k;
    return out;
  }
  throw Smt2Error("unsupported term operator '" + op + "'");
}

// one comparison literal, already moved to (coeffs.x <=|<|= const) form
struct Lit {
  std::map<std::string, Rational> coeffs;
  Rational rhs;
  std::string op;  // "<=", "<", or "="
  bool negated = false;
};

// boolean skeleton in negation normal form
struct Node {
  enum Kind { And, Or, Leaf } kind = Leaf;
  std::vector<Node> kids;
  Lit lit;
};

inline Lit make_lit(const std::string& op, const LinTerm& l, const LinTerm& r, bool neg) {
  LinTerm d;
  d.k = l.k - r.k;
  d.c = l.c;
  for (auto& [v, a] : r.c) d.c[v] = d.c[v] - a;
  Lit out;
  for (auto& [v, a] : d.c)
    if (!a.is_zero()) out.coeffs[v] = a;
  if (out.coeffs.empty()) throw Smt2Error("comparison mentions no variables");
  out.rhs = Rational(0) - d.k;
  out.negated = neg;
  if (op == "<=" || op == "<" || op == "=") {
    out.op = op;
  } else if (op == ">=" || op == ">") {
    for (auto& [v, a] : out.coeffs) a = Rational(0) - a;
    out.rhs = Rational(0) - out.rhs;
    out.op = op == ">=" ? "<=" : "<";
  } else {
    throw Smt2Error("unsupported comparison '" + op + "'");
  }
  return out;
}

// push negation onto the atoms; chainable comparisons expand pairwise
inline Node normalize(const Sexp& e, bool neg, const std::set<std::string>& vars) {
  if (e.atom()) {
    if (e.tok == "true" || e.tok == "false") throw Smt2Error("bare boolean constants are not supported");
    throw Smt2Error("expected a formula, got symbol '" + e.tok + "'");
  }
  const std::string& op = e.kids[0].tok;
  if (op == "not") {
    if (e.kids.size() != 2) throw Smt2Error("'not' takes one argument");
    return normalize(e.kids[1], !neg, vars);
  }
  if (op == "and" || op == "or") {
    if (e.kids.size() < 2) throw Smt2Error("'" + op + "' needs arguments");
    Node n;
    n.kind = (op == "and") != neg ? Node::And : Node::Or;  // De Morgan
    for (size_t i = 1; i < e.kids.size(); ++i) n.kids.push_back(normalize(e.kids[i], neg, vars));
    return n;
  }
  if (op == "<=" || op == "<" || op == ">=" || op == ">" || op == "=") {
    if (e.kids.size() < 3) throw Smt2Error("'" + op + "' takes at least two arguments");
    std::vector<Node> leaves;
    for (size_t i = 1; i + 1 < e.kids.size(); ++i) {
      Node leaf;
      leaf.lit = make_lit(op, lin_term(e.kids[i], vars), lin_term(e.kids[i + 1], vars), neg);
      leaves.push_back(std::move(leaf));
    }
    if (leaves.size() == 1) return leaves[0];
    Node n;
    // a chain is a conjunction of its links; negation turns it into a disjunction
    n.kind = neg ? Node::Or : Node::And;
    n.kids = std::move(leaves);
    return n;
  }
  throw Smt2Error("unsupported operator '" + op + "'");
}

inline void collect_clauses(const Node& n, std::vector<std::vector<Lit>>& out) {
  if (n.kind == Node::And) {
    for (const auto& k : n.kids) collect_clauses(k, out);
    return;
  }
  if (n.kind == Node::Leaf) {
    out.push_back({n.lit});
    return;
  }
  std::vector<Lit> clause;
  // an or node must flatten to literals; nested conjunctions would need
  // distribution, which this subset refuses to do silently
  std::vector<const Node*> stack{&n};
  while (!stack.empty()) {
    const Node* cur = stack.back();
    stack.pop_back();
    if (cur->kind == Node::And)
      throw Smt2Error("conjunction under a disjunction: rewrite the input in CNF");
    if (cur->kind == Node::Leaf) {
      clause.push_back(cur->lit);
      continue;
    }
    for (const auto& k : cur->kids) stack.push_back(&k);
  }
  out.push_back(std::move(clause));
}

}  // namespace smtdetail

// Converts a restricted SMT-LIB2 document (QF_LRA; and/or/not over linear
// comparisons; one or more asserts) to the formula JSON schema. Variable
// boxes are read off the unit bound assertions; variables left unbounded
// take the fallback box or fail the conversion.
inline Json formula_json_from_smt2(const std::string& text,
                                   std::optional<std::pair<Rational, Rational>> fallback_box =
                                       std::nullopt) {
  using namespace smtdetail;
  std::vector<Sexp> cmds = parse_sexprs(text);
  std::vector<std::string> var_order;
  std::set<std::string> vars;
  std::vector<std::vector<Lit>> clauses;

  for (const auto& cmd : cmds) {
    if (cmd.atom() || cmd.kids.empty() || !cmd.kids[0].atom())
      throw Smt2Error("expected a command list");
    const std::string& head = cmd.kids[0].tok;
    if (head == "set-logic") {
      if (cmd.kids.size() != 2 || cmd.kids[1].tok != "QF_LRA")
        throw Smt2Error("only the QF_LRA logic is supported");
    } else if (head == "declare-fun" || head == "declare-const") {
      bool fun = head == "declare-fun";
      if (cmd.kids.size() != (fun ? 4u : 3u) || !cmd.kids[1].atom())
        throw Smt2Error("malformed " + head);
      if (fun && !(cmd.kids[2].kids.empty() && cmd.kids[2].tok.empty()))
        throw Smt2Error("only zero-arity declarations are supported");
      const Sexp& sort = cmd.kids[fun ? 3 : 2];
      if (!sort.atom() || sort.tok != "Real")
        throw Smt2Error("variable '" + cmd.kids[1].tok + "' must have sort Real");
      if (!vars.insert(cmd.kids[1].tok).second)
        throw Smt2Error("duplicate declaration of '" + cmd.kids[1].tok + "'");
      var_order.push_back(cmd.kids[1].tok);
    } else if (head == "assert") {
      if (cmd.kids.size() != 2) throw Smt2Error("'assert' takes one formula");
      collect_clauses(normalize(cmd.kids[1], false, vars), clauses);
    } else if (head == "check-sat" || head == "exit" || head == "get-model" ||
               head == "set-info" || head == "set-option") {
      // irrelevant to the conversion
    } else {
      throw Smt2Error("unsupported command '" + head + "'");
    }
  }
  if (var_order.empty()) throw Smt2Error("no variables declared");

  // boxes from the unit bound assertions
  std::map<std::string, std::optional<Rational>> lo, hi;
  for (const auto& cl : clauses) {
    if (cl.size() != 1 || cl[0].coeffs.size() != 1) continue;
    const Lit& l = cl[0];
    const auto& [v, a] = *l.coeffs.begin();
    Rational bound = l.rhs / a;
    bool upper;
    if (l.op == "=") {
      if (l.negated) continue;
      if (!lo[v] || *lo[v] < bound) lo[v] = bound;
      if (!hi[v] || bound < *hi[v]) hi[v] = bound;
      continue;
    }
    upper = a.sign() > 0;       // a*v <= rhs
    if (l.negated) upper = !upper;  // complement flips the direction
    if (upper) {
      if (!hi[v] || bound < *hi[v]) hi[v] = bound;
    } else {
      if (!lo[v] || *lo[v] < bound) lo[v] = bound;
    }
  }

  Json j;
  j["variables"] = Json::array();
  for (const auto& v : var_order) {
    std::optional<Rational> l = lo[v], h = hi[v];
    if (!l && fallback_box) l = fallback_box->first;
    if (!h && fallback_box) h = fallback_box->second;
    if (!l || !h)
      throw Smt2Error("variable '" + v +
                      "' has no finite box: add unit bound assertions or a fallback box");
    if (*h < *l) throw Smt2Error("variable '" + v + "' has an empty box");
    j["variables"].push_back({{"name", v}, {"lo", rat_json(*l)}, {"hi", rat_json(*h)}});
  }
  j["clauses"] = Json::array();
  for (const auto& cl : clauses) {
    Json cj = Json::array();
    for (const auto& l : cl) {
      Json lj;
      Json coeffs = Json::object();
      for (const auto& [v, a] : l.coeffs) coeffs[v] = rat_json(a);
      lj["coeffs"] = std::move(coeffs);
      lj["const"] = rat_json(l.rhs);
      lj["op"] = l.op;
      lj["negated"] = l.negated;
      cj.push_back(std::move(lj));
    }
    j["clauses"].push_back(std::move(cj));
  }
  return j;
}

}  // namespace cmap

#endif  // CMAP_SMT2_HPP
