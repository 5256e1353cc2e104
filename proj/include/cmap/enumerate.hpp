#ifndef CMAP_ENUMERATE_HPP
#define CMAP_ENUMERATE_HPP

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "density.hpp"
#include "polytope.hpp"
#include "problem.hpp"

namespace cmap {

namespace enumdetail {

// Truth value of an atom that holds (or fails) at every point of the box.
// Such atoms never discriminate, so they are resolved here instead of being
// enumerated: the assignment space only carries atoms that cut the box.
inline std::optional<bool> box_fixed_truth(
    const LinearAtom& a, const std::map<int, std::pair<Rational, Rational>>& box) {
  Rational mx(0), mn(0);
  for (const auto& [v, c] : a.coeffs) {
    const auto& b = box.at(v);
    mx = mx + c * (c < Rational(0) ? b.first : b.second);
    mn = mn + c * (c < Rational(0) ? b.second : b.first);
  }
  bool strict = a.op == LinearAtom::Lt;
  if (strict ? mx < a.rhs : mx <= a.rhs) return true;
  if (strict ? a.rhs <= mn : a.rhs < mn) return false;
  return std::nullopt;
}

// literal over the atom table: holds iff table atom `idx` is assigned `pol`
struct TLit {
  int idx;
  bool pol;
};

// Exhaustive model enumeration over a clause database: plain DPLL with unit
// propagation, decisions in ascending atom order trying true first, and a
// blocking clause appended after every model, so each call to next() yields
// a distinct total assignment until the database becomes unsatisfiable.
struct SatEnumerator {
  int n = 0;
  std::vector<std::vector<TLit>> clauses;
  // partial-assignment veto; return true to cut the whole subtree
  std::function<bool(const std::vector<int>&)> prune;

  std::optional<std::vector<bool>> next() {
    std::vector<int> assign(n, -1);  // -1 unknown, 0 false, 1 true
    if (!search(assign)) return std::nullopt;
    std::vector<bool> model(n);
    std::vector<TLit> block;
    for (int i = 0; i < n; ++i) {
      model[i] = assign[i] == 1;
      block.push_back({i, !model[i]});
    }
    clauses.push_back(std::move(block));
    return model;
  }

 private:
  bool propagate(std::vector<int>& assign) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& cl : clauses) {
        int unassigned = -1;
        bool sat = false, forced = false;
        int free_count = 0;
        for (const auto& l : cl) {
          if (assign[l.idx] == -1) {
            ++free_count;
            unassigned = l.idx;
            forced = l.pol;
          } else if ((assign[l.idx] == 1) == l.pol) {
            sat = true;
            break;
          }
        }
        if (sat) continue;
        if (free_count == 0) return false;
        if (free_count == 1) {
          assign[unassigned] = forced ? 1 : 0;
          changed = true;
        }
      }
    }
    return true;
  }

  bool search(std::vector<int>& assign) const {
    if (!propagate(assign)) return false;
    if (prune && prune(assign)) return false;
    int pick = -1;
    for (int i = 0; i < n; ++i)
      if (assign[i] == -1) {
        pick = i;
        break;
      }
    if (pick == -1) return true;
    for (int val : {1, 0}) {
      std::vector<int> saved = assign;
      assign[pick] = val;
      if (search(assign)) return true;
      assign = saved;
    }
    return false;
  }
};

}  // namespace enumdetail

struct EnumOptions {
  // theory propagation cuts assignment subtrees whose decided atoms are
  // already jointly infeasible; off by default, the emitted set is identical
  bool theory_propagation = false;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct EnumeratedRegion {
  Polytope polytope;             // box atoms plus the signed enumerated atoms
  std::vector<bool> assignment;  // over the enumerated atom table
  PieceSelection selection;      // active piece per factor; -1 = uncovered
  bool covered = true;           // every factor selected a piece
};

struct EnumerationResult {
  std::vector<LinearAtom> atoms;  // the enumerated (box-cutting) atoms
  std::vector<EnumeratedRegion> regions;
  bool complete = true;  // false when the deadline cut the stream short
  long long assignments_visited = 0;
};

// Carve the box into the polytopes induced by the formula's atoms and the
// density's piece boundaries: every distinct feasible truth assignment over
// the discriminating atoms yields one polytope, each paired with the piece
// of every factor that is active there. Disjointness and single-coverage
// follow from assignments differing in at least one atom.
inline EnumerationResult enumerate_regions(const CnfFormula& F, const DensityModel& D,
                                           const EnumOptions& opts = {}) {
  std::map<int, std::pair<Rational, Rational>> box;
  for (size_t v = 0; v < F.vars.size(); ++v) box[(int)v] = {F.vars[v].lo, F.vars[v].hi};

  // collect candidate atoms from clause literals and piece guards
  std::map<LinearAtom, int> index;
  std::map<LinearAtom, bool> fixed;
  EnumerationResult out;
  auto admit_atom = [&](const LinearAtom& a) {
    if (index.count(a) || fixed.count(a)) return;
    if (auto f = enumdetail::box_fixed_truth(a, box)) {
      fixed[a] = *f;
      return;
    }
    index[a] = 0;  // renumbered after collection
  };
  for (const auto& cl : F.clauses)
    for (const auto& l : cl.lits) admit_atom(canon_literal(l).atom);
  for (const auto& f : D.factors)
    for (const auto& p : f.pieces)
      for (const auto& l : p.guard) admit_atom(canon_literal(l).atom);
  int next_id = 0;
  for (auto& [a, id] : index) {
    id = next_id++;
    out.atoms.push_back(a);
  }

  // -1 when the literal is enumerable, otherwise its fixed truth value
  auto resolve = [&](const Literal& l) -> std::pair<int, bool> {
    CanonLit c = canon_literal(l);
    auto it = index.find(c.atom);
    if (it != index.end()) return {it->second, c.pol};
    return {fixed.at(c.atom) == c.pol ? -2 : -3, true};  // -2 true, -3 false
  };

  // Boolean abstraction of the formula; fixed-true literal satisfies the
  // clause outright, fixed-false literals drop out. An emptied clause means
  // the formula is unsatisfiable on the box.
  enumdetail::SatEnumerator sat;
  sat.n = next_id;
  for (const auto& cl : F.clauses) {
    std::vector<enumdetail::TLit> tcl;
    bool satisfied = false;
    for (const auto& l : cl.lits) {
      auto [idx, pol] = resolve(l);
      if (idx == -2) {
        satisfied = true;
        break;
      }
      if (idx == -3) continue;
      tcl.push_back({idx, pol});
    }
    if (satisfied) continue;
    if (tcl.empty()) return out;  // no region satisfies this clause
    sat.clauses.push_back(std::move(tcl));
  }

  // per piece: the enumerable guard literals, or dead when a fixed literal fails
  struct PieceGuard {
    std::vector<enumdetail::TLit> lits;
    bool dead = false;
  };
  std::vector<std::vector<PieceGuard>> guards(D.factors.size());
  for (size_t f = 0; f < D.factors.size(); ++f)
    for (const auto& p : D.factors[f].pieces) {
      PieceGuard g;
      for (const auto& l : p.guard) {
        auto [idx, pol] = resolve(l);
        if (idx == -3) {
          g.dead = true;
          break;
        }
        if (idx >= 0) g.lits.push_back({idx, pol});
      }
      guards[f].push_back(std::move(g));
    }

  std::vector<LinearAtom> base = box_atoms(F);
  auto conj_atoms = [&](const std::vector<int>& assign) {
    std::vector<LinearAtom> conj = base;
    for (int i = 0; i < sat.n; ++i) {
      if (assign[i] == -1) continue;
      conj.push_back(assign[i] == 1 ? out.atoms[i] : out.atoms[i].negated());
    }
    return conj;
  };
  if (opts.theory_propagation)
    sat.prune = [&](const std::vector<int>& assign) {
      return !lra_feasible(conj_atoms(assign));
    };

  while (auto model = sat.next()) {
    ++out.assignments_visited;
    std::vector<int> assign(sat.n);
    for (int i = 0; i < sat.n; ++i) assign[i] = (*model)[i] ? 1 : 0;
    std::vector<LinearAtom> conj = conj_atoms(assign);
    if (lra_feasible(conj)) {
      EnumeratedRegion r;
      r.polytope.atoms = std::move(conj);
      r.assignment = *model;
      for (size_t f = 0; f < D.factors.size(); ++f) {
        int active = -1;
        for (size_t k = 0; k < guards[f].size(); ++k) {
          const auto& g = guards[f][k];
          if (g.dead) continue;
          bool holds = true;
          for (const auto& l : g.lits)
            if ((*model)[l.idx] != l.pol) {
              holds = false;
              break;
            }
          if (holds) {
            // guards are mutually exclusive on feasible regions
            assert(active == -1 && "two pieces active on one feasible region");
            active = (int)k;
          }
        }
        r.selection.piece.push_back(active);
        if (active < 0) r.covered = false;
      }
      out.regions.push_back(std::move(r));
    }
    if (opts.deadline && std::chrono::steady_clock::now() >= *opts.deadline) {
      out.complete = false;
      break;
    }
  }
  return out;
}

}  // namespace cmap

#endif  // CMAP_ENUMERATE_HPP
