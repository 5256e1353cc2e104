#ifndef CMAP_SCALAR_HPP
#define CMAP_SCALAR_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rational.hpp"

namespace cmap {

// Two scalar backends drive the function-algebra layers: exact rationals and
// plain doubles. The double backend compares through an epsilon band and is
// meant for benchmark speed only; every correctness suite instantiates the
// exact backend.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static int cmp(const Rational& a, const Rational& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
  }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }
  static bool is_zero(const Rational& a) { return a.is_zero(); }
  static Rational from_rat(const Rational& r) { return r; }
  static Rational to_rat(const Rational& s) { return s; }
  static double to_double(const Rational& s) { return s.to_double(); }
  static Rational abs(const Rational& s) { return s.abs(); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr double eps_cmp = 1e-12;  // piece-boundary comparison band
  static int cmp(double a, double b) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    if (std::fabs(a - b) <= eps_cmp * scale) return 0;
    return a < b ? -1 : 1;
  }
  static bool eq(double a, double b) { return cmp(a, b) == 0; }
  static bool is_zero(double a) { return std::fabs(a) <= eps_cmp; }
  static double from_rat(const Rational& r) { return r.to_double(); }
  static Rational to_rat(double s) { return Rational::from_double(s); }
  static double to_double(double s) { return s; }
  static double abs(double s) { return std::fabs(s); }
};

// Scalar extended with +-infinity, used for piece endpoints and cell rails.
template <class S>
struct Ext {
  enum Kind { NegInf = -1, Fin = 0, PosInf = 1 };
  Kind kind = Fin;
  S v{};

  Ext() = default;
  Ext(const S& x) : kind(Fin), v(x) {}
  static Ext neg_inf() { Ext e; e.kind = NegInf; return e; }
  static Ext pos_inf() { Ext e; e.kind = PosInf; return e; }

  bool finite() const { return kind == Fin; }

  friend int ext_cmp(const Ext& a, const Ext& b) {
    if (a.kind != Fin || b.kind != Fin) {
      int ka = (int)a.kind, kb = (int)b.kind;
      // A finite value sits strictly between the infinities.
      if (ka != kb) return ka < kb ? -1 : 1;
      return 0;  // same infinity
    }
    return scalar_traits<S>::cmp(a.v, b.v);
  }
  friend bool operator==(const Ext& a, const Ext& b) { return ext_cmp(a, b) == 0; }
  friend bool operator<(const Ext& a, const Ext& b) { return ext_cmp(a, b) < 0; }
  friend bool operator<=(const Ext& a, const Ext& b) { return ext_cmp(a, b) <= 0; }
};

template <class S>
Ext<S> ext_min(const Ext<S>& a, const Ext<S>& b) { return ext_cmp(a, b) <= 0 ? a : b; }
template <class S>
Ext<S> ext_max(const Ext<S>& a, const Ext<S>& b) { return ext_cmp(a, b) <= 0 ? b : a; }

}  // namespace cmap

#endif  // CMAP_SCALAR_HPP
