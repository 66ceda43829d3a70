#include <doctest.h>

#include <random>

#include "colflow/errors.hpp"
#include "colflow/rational.hpp"

using namespace colflow;

TEST_CASE("rational normalizes to lowest terms with positive denominator") {
  Rational r(BigInt(6), BigInt(-8));
  CHECK(r.num() == -3);
  CHECK(r.den() == 4);
  CHECK(Rational(BigInt(0), BigInt(-7)) == Rational(0));
  CHECK(Rational(BigInt(0), BigInt(-7)).den() == 1);
  CHECK_THROWS_AS(Rational(BigInt(1), BigInt(0)), Error);
}

TEST_CASE("rational arithmetic round-trips on random values") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    auto pick = [&] {
      long long num = static_cast<long long>(rng() % 4001) - 2000;
      long long den = 1 + static_cast<long long>(rng() % 97);
      return Rational(BigInt(num), BigInt(den));
    };
    Rational a = pick();
    Rational b = pick();
    CHECK((a + b) - b == a);
    if (!b.is_zero()) CHECK((a * b) / b == a);
    // lowest terms after every operation
    Rational sum = a + b;
    BigInt n = sum.num() < 0 ? BigInt(-sum.num()) : sum.num();
    BigInt d = sum.den();
    while (d != 0) {
      BigInt t2 = n % d;
      n = d;
      d = t2;
    }
    CHECK(n <= 1);
    CHECK(sum.den() > 0);
  }
}

TEST_CASE("rational comparisons are exact") {
  CHECK(Rational(BigInt(1), BigInt(3)) < Rational(BigInt(2), BigInt(5)));
  CHECK(Rational(BigInt(2), BigInt(3)) > Rational(BigInt(3), BigInt(5)));
  CHECK(Rational(BigInt(2), BigInt(4)) == Rational(BigInt(1), BigInt(2)));
  CHECK(Rational(BigInt(2), BigInt(3)) + Rational(BigInt(1), BigInt(1000)) >
        Rational(BigInt(2), BigInt(3)));
}

TEST_CASE("decimal parsing") {
  CHECK(*Rational::from_decimal_string("42") == Rational(42));
  CHECK(*Rational::from_decimal_string("-3.25") == Rational(BigInt(-13), BigInt(4)));
  CHECK(*Rational::from_decimal_string(".5") == Rational(BigInt(1), BigInt(2)));
  CHECK(*Rational::from_decimal_string("100.250") == Rational(BigInt(401), BigInt(4)));
  CHECK(!Rational::from_decimal_string(""));
  CHECK(!Rational::from_decimal_string("1.2.3"));
  CHECK(!Rational::from_decimal_string("1e5"));
  CHECK(!Rational::from_decimal_string("."));
}

TEST_CASE("decimal rendering trims trailing zeros and rounds half to even") {
  CHECK(Rational(BigInt(1), BigInt(4)).decimal_string(6) == "0.25");
  CHECK(Rational(BigInt(1), BigInt(3)).decimal_string(6) == "0.333333");
  CHECK(Rational(BigInt(2), BigInt(3)).decimal_string(6) == "0.666667");
  CHECK(Rational(5).decimal_string(6) == "5");
  CHECK(Rational(0).decimal_string(6) == "0");
  CHECK(Rational(BigInt(-1), BigInt(3)).decimal_string(3) == "-0.333");
  CHECK(Rational(BigInt(1), BigInt(8)).decimal_string(2) == "0.12");  // ties to even
  CHECK(Rational(BigInt(3), BigInt(8)).decimal_string(2) == "0.38");
  CHECK(Rational(BigInt(-1), BigInt(1000000)).decimal_string(2) == "0");
}

TEST_CASE("fraction strings, floor and ceil") {
  CHECK(Rational(BigInt(3), BigInt(4)).to_fraction_string() == "3/4");
  CHECK(Rational(-5).to_fraction_string() == "-5");
  CHECK(Rational(BigInt(7), BigInt(2)).floor() == 3);
  CHECK(Rational(BigInt(7), BigInt(2)).ceil() == 4);
  CHECK(Rational(BigInt(-7), BigInt(2)).floor() == -4);
  CHECK(Rational(BigInt(-7), BigInt(2)).ceil() == -3);
}

TEST_CASE("pow is exact") {
  CHECK(pow(Rational(BigInt(1), BigInt(100)), 3) == Rational(BigInt(1), BigInt(1000000)));
  CHECK(pow(Rational(2), 0) == Rational(1));
}
