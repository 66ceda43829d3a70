#pragma once

#include <random>
#include <string>
#include <vector>

#include "colflow/instance.hpp"
#include "colflow/report.hpp"

namespace colflow {

/// A positive-flow edge (security, account) whose security could instead
/// serve a strictly worse-covered eligible account.
struct RatioBalanceViolation {
  int flow_edge = -1;     // edge index with f > 0
  int sibling_edge = -1;  // edge index of the worse-covered alternative
  Rational r_receiving;   // risk ratio of the account receiving flow
  Rational r_sibling;
};

/// Exhaustive exact check of the balance condition: for every edge (i,j)
/// with positive flow and every sibling (i,l), r_j >= r_l. A sibling whose
/// claim limit is already saturated cannot absorb diverted flow and is
/// exempt. A violation is reported when r_l - r_j > tolerance (0 = exact).
std::vector<RatioBalanceViolation> check_ratio_balance(const Instance& inst,
                                                       const FlowAssignment& f,
                                                       const Rational& tolerance = Rational(0));

struct MaximalityVerdict {
  bool maximal = false;
  std::string augmenting_path;  // human-readable witness when not maximal
};

/// Maximal iff the residual of the full network (sink caps e_j) admits no
/// augmenting source-sink path.
MaximalityVerdict check_maximality(const Instance& inst, const FlowAssignment& f);

/// Independent risk-vector oracle by exhaustive subset enumeration: the
/// critical coverage level is the minimum over nonempty account subsets B of
/// capacity(neighborhood of B) / exposure(B), capped at 1; the union of
/// minimizing subsets peels off, and the recursion repeats. Claim limits
/// enter through min-cuts on the sub-instance. Never touches the phase loop.
///
/// Throws Error(TooLarge) past max_accounts and Error(InvalidInput) on
/// priority instances.
std::vector<Rational> oracle_risk_vector(const Instance& inst, int max_accounts = 15);

/// Max absolute deviation between the analytic objective derivative -2 r_j
/// and central finite differences of the floating objective at the given
/// flow. Floating evaluation is confined to this check.
double gradient_check(const Instance& inst, const FlowAssignment& f, double step = 1e-5);

struct LocalOptVerdict {
  bool ok = true;
  long candidates_tested = 0;
  long violations = 0;
  Rational best_candidate_objective;
};

/// Generates `trials` random feasible maximum flows (shuffled greedy
/// saturation completed to maximality, alternated with convex combinations
/// with f) and asserts each has objective >= objective(f), exactly.
LocalOptVerdict local_opt_probe(const Instance& inst, const FlowAssignment& f, int trials,
                                std::uint64_t seed = 0x5eed);

/// Random feasible flow: greedy saturation along a shuffled edge order,
/// scaled by a random factor when interior is requested.
FlowAssignment random_feasible_flow(const Instance& inst, std::mt19937_64& rng,
                                    bool interior = false);

/// Random maximum flow: greedy saturation completed by augmentation.
FlowAssignment random_maximum_flow(const Instance& inst, std::mt19937_64& rng);

}  // namespace colflow
