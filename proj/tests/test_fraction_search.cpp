#include <doctest.h>

#include <random>

#include "colflow/fraction_search.hpp"

using namespace colflow;

namespace {

struct CountingPredicate {
  Rational threshold;
  long calls = 0;

  bool le(const Rational& x) {
    ++calls;
    return threshold <= x;
  }
  bool ge(const Rational& y) {
    ++calls;
    return y <= threshold;
  }
};

long ceil_log2(long long x) {
  long bits = 0;
  long long p = 1;
  while (p < x) {
    p *= 2;
    ++bits;
  }
  return bits;
}

}  // namespace

TEST_CASE("find_min_rational recovers every fraction up to a small bound") {
  const long long bound = 40;
  for (long long den = 1; den <= bound; ++den) {
    for (long long num = 0; num <= den; ++num) {
      CountingPredicate pred{Rational(BigInt(num), BigInt(den))};
      auto result = find_min_rational(
          BigInt(bound), [&](const Rational& x) { return pred.le(x); });
      REQUIRE(result.value == pred.threshold);
      if (!pred.threshold.is_zero()) {
        REQUIRE(result.neighbor.has_value());
        CHECK(*result.neighbor < pred.threshold);
        CHECK(result.neighbor->den() <= bound);
        CHECK(result.neighbor->num() <= bound);
      }
    }
  }
}

TEST_CASE("find_min_rational stays within the query budget") {
  std::mt19937_64 rng(5150);
  for (int t = 0; t < 400; ++t) {
    long long bound = 2 + static_cast<long long>(rng() % 5000);
    long long den = 1 + static_cast<long long>(rng() % bound);
    long long num = static_cast<long long>(rng() % (den + 1));
    CountingPredicate pred{Rational(BigInt(num), BigInt(den))};
    auto result =
        find_min_rational(BigInt(bound), [&](const Rational& x) { return pred.le(x); });
    CHECK(result.value == pred.threshold);
    // the query budget the balancer advertises: 3 * ceil(log2(2 N^2)),
    // minus the two confirmation calls it adds on top
    long budget = 3 * ceil_log2(2 * bound * bound) - 2;
    CHECK(pred.calls <= budget);
  }
}

TEST_CASE("find_min_rational worst cases: boundary answers") {
  CountingPredicate zero{Rational(0)};
  auto at_zero = find_min_rational(BigInt(1000), [&](const Rational& x) { return zero.le(x); });
  CHECK(at_zero.value == Rational(0));
  CHECK(!at_zero.neighbor.has_value());
  CHECK(zero.calls == 1);

  CountingPredicate one{Rational(1)};
  auto at_one = find_min_rational(BigInt(1000), [&](const Rational& x) { return one.le(x); });
  CHECK(at_one.value == Rational(1));
  CHECK(one.calls <= 3 * ceil_log2(2 * 1000 * 1000));

  // Fibonacci-style continued fractions are the long-run worst case
  CountingPredicate fib{Rational(BigInt(610), BigInt(987))};
  auto at_fib = find_min_rational(BigInt(1000), [&](const Rational& x) { return fib.le(x); });
  CHECK(at_fib.value == fib.threshold);
  CHECK(fib.calls <= 3 * ceil_log2(2 * 1000 * 1000));
}

TEST_CASE("find_max_rational recovers fractions beyond one") {
  const long long bound = 30;
  for (long long den = 1; den <= 6; ++den) {
    for (long long num = 0; num <= bound; ++num) {
      Rational target = Rational(BigInt(num), BigInt(den));
      if (target.num() > bound || target.den() > bound) continue;
      CountingPredicate pred{target};
      auto result =
          find_max_rational(BigInt(bound), [&](const Rational& y) { return pred.ge(y); });
      REQUIRE(result.value == target);
      if (result.neighbor) CHECK(*result.neighbor > target);
    }
  }
}

TEST_CASE("find_max_rational handles large answers within budget") {
  std::mt19937_64 rng(31337);
  for (int t = 0; t < 200; ++t) {
    long long bound = 2 + static_cast<long long>(rng() % 3000);
    long long den = 1 + static_cast<long long>(rng() % bound);
    long long num = static_cast<long long>(rng() % (bound + 1));
    Rational target = Rational(BigInt(num), BigInt(den));
    if (target.num() > bound || target.den() > bound) {
      --t;
      continue;
    }
    CountingPredicate pred{target};
    auto result =
        find_max_rational(BigInt(bound), [&](const Rational& y) { return pred.ge(y); });
    CHECK(result.value == target);
    CHECK(pred.calls <= 3 * ceil_log2(2 * bound * bound));
  }
}
