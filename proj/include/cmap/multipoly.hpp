#ifndef CMAP_MULTIPOLY_HPP
#define CMAP_MULTIPOLY_HPP

#include <algorithm>
#include <map>
#include <vector>

#include "poly.hpp"

namespace cmap {

// Sparse multivariate polynomial. Terms hold (variable, power) lists sorted
// by variable; normalization merges duplicates and drops zero coefficients.
template <class S>
struct MultiPoly {
  struct Term {
    std::vector<std::pair<int, int>> vp;
    S coeff{};
  };
  std::vector<Term> terms;

  static MultiPoly constant(const S& c) {
    MultiPoly p;
    if (!scalar_traits<S>::is_zero(c)) p.terms.push_back({{}, c});
    return p;
  }
  static MultiPoly from_uni(const UniPoly<S>& u) {
    MultiPoly p;
    for (size_t k = 0; k < u.c.size(); ++k) {
      if (scalar_traits<S>::is_zero(u.c[k])) continue;
      Term t;
      if (k > 0) t.vp.push_back({u.var, (int)k});
      t.coeff = u.c[k];
      p.terms.push_back(std::move(t));
    }
    return p;
  }

  bool is_zero() const { return terms.empty(); }

  void normalize() {
    for (auto& t : terms) {
      std::sort(t.vp.begin(), t.vp.end());
      std::vector<std::pair<int, int>> merged;
      for (auto& [v, e] : t.vp) {
        if (!merged.empty() && merged.back().first == v)
          merged.back().second += e;
        else if (e != 0)
          merged.push_back({v, e});
      }
      t.vp = std::move(merged);
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.vp < b.vp; });
    std::vector<Term> out;
    for (auto& t : terms) {
      if (!out.empty() && out.back().vp == t.vp)
        out.back().coeff = out.back().coeff + t.coeff;
      else
        out.push_back(std::move(t));
    }
    terms.clear();
    for (auto& t : out)
      if (!scalar_traits<S>::is_zero(t.coeff)) terms.push_back(std::move(t));
  }

  std::vector<int> vars() const {
    std::vector<int> out;
    for (const auto& t : terms)
      for (const auto& [v, e] : t.vp) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  S eval(const std::map<int, S>& x) const {
    S sum{};
    for (const auto& t : terms) {
      S prod = t.coeff;
      for (const auto& [v, e] : t.vp) {
        auto it = x.find(v);
        assert(it != x.end() && "assignment misses a polynomial variable");
        for (int k = 0; k < e; ++k) prod = prod * it->second;
      }
      sum = sum + prod;
    }
    return sum;
  }

  double eval_d(const std::map<int, double>& x) const {
    double sum = 0;
    for (const auto& t : terms) {
      double prod = scalar_traits<S>::to_double(t.coeff);
      for (const auto& [v, e] : t.vp) {
        auto it = x.find(v);
        assert(it != x.end() && "assignment misses a polynomial variable");
        for (int k = 0; k < e; ++k) prod *= it->second;
      }
      sum += prod;
    }
    return sum;
  }

  MultiPoly derivative(int var) const {
    MultiPoly d;
    for (const auto& t : terms) {
      Term r;
      S c = t.coeff;
      bool has = false;
      for (const auto& [v, e] : t.vp) {
        if (v == var) {
          has = true;
          c = c * S(e);
          if (e > 1) r.vp.push_back({v, e - 1});
        } else {
          r.vp.push_back({v, e});
        }
      }
      if (!has) continue;
      r.coeff = c;
      d.terms.push_back(std::move(r));
    }
    d.normalize();
    return d;
  }

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    r.normalize();
    return r;
  }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r;
    for (const auto& ta : a.terms)
      for (const auto& tb : b.terms) {
        Term t;
        t.vp = ta.vp;
        t.vp.insert(t.vp.end(), tb.vp.begin(), tb.vp.end());
        t.coeff = ta.coeff * tb.coeff;
        r.terms.push_back(std::move(t));
      }
    r.normalize();
    return r;
  }
};

}  // namespace cmap

#endif  // CMAP_MULTIPOLY_HPP
