#ifndef CMAP_RATIONAL_HPP
#define CMAP_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cmap {

// Arbitrary-precision rational, always kept in canonical form (gcd 1, den > 0).
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}
  Rational(long n) : v_((signed long)n) {}
  Rational(long long n) : v_((signed long)n) {
    static_assert(sizeof(long long) == sizeof(long), "LP64 assumed");
  }
  Rational(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    Rational n(num), d(den);
    v_ = n.v_ / d.v_;
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
  explicit Rational(const mpz_class& z) : v_(z) {}

  static Rational from_double(double d);           // exact binary expansion
  static std::optional<Rational> parse(const std::string& s);

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
  friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
  friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
  friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) != 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) >= 0; }

  Rational abs() const { return Rational(mpq_class(::abs(v_))); }

  // Round to the nearest multiple of 2^-k, ties toward +inf. Keeps materialized
  // breakpoints on a dyadic grid so denominators stay small downstream.
  Rational round_dyadic(unsigned k) const {
    mpz_class scaled_num = v_.get_num() << k;
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled_num.get_mpz_t(), v_.get_den().get_mpz_t());
    // round: q + (2r >= den)
    if (2 * r >= v_.get_den()) q += 1;
    mpq_class out(q);
    out /= (mpz_class(1) << k);
    out.canonicalize();
    return Rational(out);
  }

  double to_double() const { return v_.get_d(); }

  // "n" for integers, "n/d" otherwise.
  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class v_;
};

inline Rational Rational::from_double(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("Rational::from_double: non-finite");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), d);
  return Rational(q);
}

// Accepts "a/b", integers, and plain decimals ("-4.75"). No exponents.
inline std::optional<Rational> Rational::parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
      if (ns.empty() || ds.empty()) return std::nullopt;
      mpq_class q{mpz_class(ns), mpz_class(ds)};
      if (q.get_den() == 0) return std::nullopt;
      q.canonicalize();
      return Rational(q);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(mpq_class(mpz_class(s)));
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (fp.empty()) fp = "0";
    for (char c : fp)
      if (!isdigit((unsigned char)c)) return std::nullopt;
    bool neg = !ip.empty() && ip[0] == '-';
    if (ip == "-" || ip == "+" || ip.empty()) ip += "0";
    mpz_class scale = 1;
    for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
    mpz_class whole(ip);
    mpz_class frac(fp);
    mpq_class q(::abs(whole) * scale + frac, scale);
    q.canonicalize();
    if (neg || sgn(whole) < 0) q = -q;
    return Rational(q);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace cmap

#endif  // CMAP_RATIONAL_HPP
