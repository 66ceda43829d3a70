#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace colflow {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Always stored in lowest terms with a positive
/// denominator; every operation is exact. This is the arithmetic substrate
/// for all flows, coverage levels and risk ratios.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(int v) : num_(v), den_(1) {}                // NOLINT: implicit by design
  Rational(long long v) : num_(v), den_(1) {}          // NOLINT
  Rational(BigInt v) : num_(std::move(v)), den_(1) {}  // NOLINT
  Rational(BigInt num, BigInt den);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  // Lowest-terms representation makes equality componentwise.
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// Parses "42", "-3.25", ".5". Returns nullopt on malformed input.
  static std::optional<Rational> from_decimal_string(std::string_view text);

  /// "3/4", "-7/2", "5".
  std::string to_fraction_string() const;

  /// Decimal rendering, round half to even at `precision` fractional digits,
  /// trailing zeros trimmed ("1/4" at precision 6 -> "0.25").
  std::string decimal_string(int precision) const;

  double to_double() const;
  explicit operator double() const { return to_double(); }

  /// Floor of num/den as an integer.
  BigInt floor() const;
  BigInt ceil() const;

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  void normalize();

  BigInt num_;
  BigInt den_;
};

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

/// r^exp by repeated squaring, exact.
Rational pow(const Rational& base, unsigned exp);

}  // namespace colflow
