#pragma once

#include <functional>

#include "colflow/rational.hpp"

namespace colflow {

/// Threshold predicate evaluated at exact fractions. Each call is expected
/// to cost one max-flow computation, so the search keeps call counts
/// logarithmic in the bound.
using FractionPredicate = std::function<bool(const Rational&)>;

struct FractionSearchResult {
  Rational value;
  /// The adjacent bound-representable fraction on the far side of the
  /// answer (the walk proved the predicate flips there). Absent when the
  /// answer sits on the domain boundary.
  std::optional<Rational> neighbor;
};

/// Finds the smallest x in [0,1] with le(x) true, where le is upward closed
/// (le(x) true implies le(x') true for x' > x) and the answer is exactly
/// representable with numerator and denominator <= bound.
///
/// Stern-Brocot mediant descent; runs of same-direction moves are located
/// by doubling plus binary search, so the number of predicate calls is
/// O(log bound).
FractionSearchResult find_min_rational(const BigInt& bound, const FractionPredicate& le);

/// Finds the largest y >= 0 with ge(y) true, where ge is downward closed and
/// the answer is exactly representable with numerator and denominator
/// <= bound. ge(0) must hold.
FractionSearchResult find_max_rational(const BigInt& bound, const FractionPredicate& ge);

}  // namespace colflow
