#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fastdelivery {

using Integer = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact arbitrary-precision fraction. All lengths, velocities, times and
/// coordinates in this library are Rationals; no rounding ever happens in
/// the core algorithms. Kept in canonical form (positive denominator,
/// gcd(|num|, den) = 1) by the underlying representation.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : v_(value) {}  // NOLINT: implicit by design
  Rational(const Integer& value) : v_(value) {}

  Rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    v_ = den < 0 ? BigRational(-num, -den) : BigRational(num, den);
  }
  Rational(std::int64_t num, std::int64_t den)
      : Rational(Integer(num), Integer(den)) {}

  static Rational from_big(BigRational v) {
    Rational r;
    r.v_ = std::move(v);
    return r;
  }

  Integer numerator() const { return boost::multiprecision::numerator(v_); }
  Integer denominator() const {
    return boost::multiprecision::denominator(v_);
  }

  bool is_zero() const { return v_.is_zero(); }
  bool is_negative() const { return v_ < 0; }
  bool is_integer() const { return denominator() == 1; }

  double to_double() const { return v_.convert_to<double>(); }

  /// Canonical text form: "p" when the denominator is 1, "p/q" otherwise.
  std::string to_string() const {
    if (is_integer()) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

  /// Parses "p", "p/q" or an exact decimal such as "2.5" (-> 5/2).
  static std::optional<Rational> parse(std::string_view text);

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) {
    return Rational::from_big(-a.v_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.v_ == b.v_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return a.v_ != b.v_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.v_ < b.v_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.v_ <= b.v_;
  }
  friend bool operator>(const Rational& a, const Rational& b) {
    return a.v_ > b.v_;
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return a.v_ >= b.v_;
  }

 private:
  BigRational v_;
};

/// Canonical reduced fraction with positive denominator; rejects den == 0.
inline Rational make_rational(const Integer& num, const Integer& den) {
  return Rational(num, den);
}
inline Rational make_rational(std::int64_t num, std::int64_t den) {
  return Rational(num, den);
}

inline std::optional<Rational> Rational::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  auto digits = [&](std::string& out) {
    std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) return false;
    out.assign(text.substr(start, pos - start));
    return true;
  };

  std::string whole;
  if (!digits(whole)) return std::nullopt;

  try {
    if (pos == text.size()) {
      Integer n(whole);
      return Rational(negative ? Integer(-n) : n, Integer(1));
    }
    if (text[pos] == '/') {
      ++pos;
      std::string den;
      if (!digits(den) || pos != text.size()) return std::nullopt;
      Integer d(den);
      if (d == 0) return std::nullopt;
      Integer n(whole);
      return Rational(negative ? Integer(-n) : n, d);
    }
    if (text[pos] == '.') {
      ++pos;
      std::string frac;
      if (!digits(frac) || pos != text.size()) return std::nullopt;
      Integer scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      Integer n = Integer(whole) * scale + Integer(frac);
      return Rational(negative ? Integer(-n) : n, scale);
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace fastdelivery
