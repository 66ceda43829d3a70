#include "colflow/rational.hpp"

#include <cctype>
#include <ostream>

#include "colflow/errors.hpp"

namespace colflow {

namespace {

BigInt gcd(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

BigInt pow10(int k) {
  BigInt r = 1;
  for (int i = 0; i < k; ++i) r *= 10;
  return r;
}

}  // namespace

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) fail(ErrorCode::InvalidInput, "rational with zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  BigInt g = gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) fail(ErrorCode::InvalidInput, "division by zero rational");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

std::optional<Rational> Rational::from_decimal_string(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    i = 1;
  }
  BigInt mantissa = 0;
  int frac_digits = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  if (negative) mantissa = -mantissa;
  return Rational(std::move(mantissa), pow10(frac_digits));
}

std::string Rational::to_fraction_string() const {
  std::string s = num_.str();
  if (den_ != 1) {
    s += "/";
    s += den_.str();
  }
  return s;
}

std::string Rational::decimal_string(int precision) const {
  if (precision < 0) precision = 0;
  BigInt p10 = pow10(precision);
  BigInt scaled_abs = (num_ < 0 ? -num_ : num_) * p10;
  BigInt q = scaled_abs / den_;
  BigInt rem = scaled_abs % den_;
  // round half to even
  BigInt twice = rem * 2;
  if (twice > den_ || (twice == den_ && q % 2 != 0)) ++q;

  std::string digits = q.str();
  std::string out;
  if (num_ < 0 && q != 0) out = "-";
  if (precision == 0) {
    out += digits;
    return out;
  }
  if (static_cast<int>(digits.size()) <= precision) {
    digits.insert(0, precision + 1 - digits.size(), '0');
  }
  std::string integral = digits.substr(0, digits.size() - precision);
  std::string fraction = digits.substr(digits.size() - precision);
  while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();
  out += integral;
  if (!fraction.empty()) {
    out += ".";
    out += fraction;
  }
  if (out == "-0" || out.empty()) out = "0";
  return out;
}

double Rational::to_double() const {
  return num_.convert_to<double>() / den_.convert_to<double>();
}

BigInt Rational::floor() const {
  BigInt q = num_ / den_;
  if (num_ < 0 && num_ % den_ != 0) --q;
  return q;
}

BigInt Rational::ceil() const {
  BigInt q = num_ / den_;
  if (num_ > 0 && num_ % den_ != 0) ++q;
  return q;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.to_fraction_string();
}

Rational abs(const Rational& r) { return r.is_negative() ? -r : r; }

Rational min(const Rational& a, const Rational& b) { return a <= b ? a : b; }

Rational max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

Rational pow(const Rational& base, unsigned exp) {
  Rational result = 1;
  Rational b = base;
  while (exp > 0) {
    if (exp & 1u) result *= b;
    b *= b;
    exp >>= 1u;
  }
  return result;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveExposure: return "NonPositiveExposure";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::PartialPriorities: return "PartialPriorities";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InfeasibleFlow: return "InfeasibleFlow";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotMaximum: return "NotMaximum";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MissingPriorities: return "MissingPriorities";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace colflow
