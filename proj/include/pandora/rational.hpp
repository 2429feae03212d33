#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "pandora/errors.hpp"

namespace pandora {

/// Exact rational number in lowest terms with a positive denominator.
///
/// All monetary values, costs and probabilities in the library are Rationals so
/// that indices, capped values and welfare comparisons are exact.
class Rational {
 public:
  Rational() = default;

  template <std::integral I>
  Rational(I n) : q_(static_cast<long>(n)) {}  // NOLINT(google-explicit-constructor)

  Rational(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }

  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Parses "p/q", an integer "p", or a finite decimal "1.25" / "-0.5".
  static Rational parse(std::string_view text) {
    std::string s(trim(text));
    if (s.empty()) throw ValidationError("empty rational literal");
    if (auto dot = s.find('.'); dot != std::string::npos) return parse_decimal(s, dot);
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw ValidationError("malformed rational literal '" + s + "'");
    if (q.get_den() == 0) throw DomainError("rational with zero denominator: '" + s + "'");
    q.canonicalize();
    return Rational(std::move(q));
  }

  /// Exact conversion of a binary floating point value (every finite double is dyadic).
  static Rational from_double(double x) {
    if (!std::isfinite(x)) throw DomainError("non-finite value cannot be converted to a rational");
    return Rational(mpq_class(x));
  }

  const mpq_class& raw() const noexcept { return q_; }

  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }
  double to_double() const { return q_.get_d(); }
  std::string numerator() const { return q_.get_num().get_str(); }
  std::string denominator() const { return q_.get_den().get_str(); }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  Rational operator-() const { return Rational(mpq_class(-q_)); }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.sign() == 0) throw DomainError("division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  std::size_t hash() const {
    return std::hash<std::string>{}(str());
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  static Rational parse_decimal(const std::string& s, std::size_t dot) {
    std::string int_part = s.substr(0, dot);
    std::string frac_part = s.substr(dot + 1);
    bool negative = false;
    if (!int_part.empty() && (int_part[0] == '-' || int_part[0] == '+')) {
      negative = int_part[0] == '-';
      int_part.erase(0, 1);
    }
    auto digits = [](const std::string& d) {
      for (char c : d)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if ((int_part.empty() && frac_part.empty()) || !digits(int_part) || !digits(frac_part))
      throw ValidationError("malformed decimal literal '" + s + "'");
    mpz_class whole(int_part.empty() ? std::string("0") : int_part);
    mpz_class frac(frac_part.empty() ? std::string("0") : frac_part);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
    mpq_class q(whole * scale + frac, scale);
    q.canonicalize();
    if (negative) q = -q;
    return Rational(std::move(q));
  }

  mpq_class q_{0};
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational positive_part(const Rational& x) { return x.sign() > 0 ? x : Rational(0); }

/// x^k for integer k >= 0.
inline Rational pow(const Rational& x, unsigned k) {
  Rational r(1);
  for (unsigned i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace pandora

template <>
struct std::hash<pandora::Rational> {
  std::size_t operator()(const pandora::Rational& r) const { return r.hash(); }
};
