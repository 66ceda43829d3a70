#include "colflow/fraction_search.hpp"

#include "colflow/errors.hpp"

namespace colflow {

namespace {

struct Frac {
  BigInt num;
  BigInt den;

  Rational to_rational() const { return Rational(num, den); }
};

/// pred(1) is known true and pred is a true-prefix over [1, kmax]; returns
/// the largest k with pred(k), probing by doubling then binary search.
BigInt last_true(const BigInt& kmax, const std::function<bool(const BigInt&)>& pred) {
  BigInt lo = 1;
  BigInt hi = 1;
  while (hi < kmax) {
    BigInt next = hi * 2;
    if (next > kmax) next = kmax;
    if (pred(next)) {
      lo = next;
      hi = next;
    } else {
      hi = next;
      while (hi - lo > 1) {
        BigInt mid = (lo + hi) / 2;
        if (pred(mid)) lo = mid;
        else hi = mid;
      }
      return lo;
    }
  }
  return lo;
}

}  // namespace

FractionSearchResult find_min_rational(const BigInt& bound, const FractionPredicate& le) {
  internal_check(bound >= 1, "fraction search bound must be positive");
  if (le(Rational(0))) return {Rational(0), std::nullopt};

  // x* in (lo, hi]; lo and hi are Farey neighbors (hi.num*lo.den - lo.num*hi.den == 1).
  Frac lo{0, 1};
  Frac hi{1, 1};
  while (lo.den + hi.den <= bound) {
    Frac mediant{lo.num + hi.num, lo.den + hi.den};
    if (le(mediant.to_rational())) {
      // Run of moves toward lo: hi_k = (k*lo + hi), feasible while k <= K*.
      BigInt kmax = (bound - hi.den) / lo.den;
      auto probe = [&](const BigInt& k) {
        return le(Rational(k * lo.num + hi.num, k * lo.den + hi.den));
      };
      BigInt k_star = last_true(kmax, probe);
      Frac new_hi{k_star * lo.num + hi.num, k_star * lo.den + hi.den};
      if (k_star < kmax) {
        BigInt k1 = k_star + 1;
        lo = Frac{k1 * lo.num + hi.num, k1 * lo.den + hi.den};
      }
      hi = new_hi;
    } else {
      // Run of moves toward hi: lo_k = (lo + k*hi), infeasible while k <= K*.
      BigInt kmax = (bound - lo.den) / hi.den;
      auto probe = [&](const BigInt& k) {
        return !le(Rational(lo.num + k * hi.num, lo.den + k * hi.den));
      };
      BigInt k_star = last_true(kmax, probe);
      Frac new_lo{lo.num + k_star * hi.num, lo.den + k_star * hi.den};
      if (k_star < kmax) {
        BigInt k1 = k_star + 1;
        hi = Frac{lo.num + k1 * hi.num, lo.den + k1 * hi.den};
      }
      lo = new_lo;
    }
  }
  return {hi.to_rational(), lo.to_rational()};
}

FractionSearchResult find_max_rational(const BigInt& bound, const FractionPredicate& ge) {
  internal_check(bound >= 1, "fraction search bound must be positive");
  internal_check(ge(Rational(0)), "find_max_rational: predicate must hold at zero");

  // y* in [lo, hi); hi starts at the formal 1/0 so the domain is unbounded.
  Frac lo{0, 1};
  Frac hi{1, 0};
  while (lo.num + hi.num <= bound && lo.den + hi.den <= bound) {
    Frac mediant{lo.num + hi.num, lo.den + hi.den};
    if (ge(mediant.to_rational())) {
      // lo_k = (lo + k*hi): true while k <= K*.
      BigInt kmax = (bound - lo.num) / hi.num;
      if (hi.den > 0) {
        BigInt den_limit = (bound - lo.den) / hi.den;
        if (den_limit < kmax) kmax = den_limit;
      }
      auto probe = [&](const BigInt& k) {
        return ge(Rational(lo.num + k * hi.num, lo.den + k * hi.den));
      };
      BigInt k_star = last_true(kmax, probe);
      Frac new_lo{lo.num + k_star * hi.num, lo.den + k_star * hi.den};
      if (k_star < kmax) {
        BigInt k1 = k_star + 1;
        hi = Frac{lo.num + k1 * hi.num, lo.den + k1 * hi.den};
      }
      lo = new_lo;
    } else {
      // hi_k = (k*lo + hi): false while k <= K*.
      BigInt kmax = (bound - hi.den) / lo.den;
      if (lo.num > 0) {
        BigInt num_limit = (bound - hi.num) / lo.num;
        if (num_limit < kmax) kmax = num_limit;
      }
      auto probe = [&](const BigInt& k) {
        return !ge(Rational(k * lo.num + hi.num, k * lo.den + hi.den));
      };
      BigInt k_star = last_true(kmax, probe);
      Frac new_hi{k_star * lo.num + hi.num, k_star * lo.den + hi.den};
      if (k_star < kmax) {
        BigInt k1 = k_star + 1;
        lo = Frac{k1 * lo.num + hi.num, k1 * lo.den + hi.den};
      }
      hi = new_hi;
    }
  }
  std::optional<Rational> neighbor;
  if (hi.den > 0) neighbor = hi.to_rational();
  return {lo.to_rational(), neighbor};
}

}  // namespace colflow
