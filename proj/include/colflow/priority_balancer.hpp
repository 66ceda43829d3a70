#pragma once

#include <vector>

#include "colflow/flow_network.hpp"
#include "colflow/instance.hpp"
#include "colflow/ratio_balancer.hpp"
#include "colflow/report.hpp"

namespace colflow {

/// Integer weights that make a weighted flow sum order profiles
/// lexicographically: class p weighs B^(P-p) with B = 1 + sum of exposures,
/// which strictly exceeds any achievable flow value.
struct PriorityWeights {
  BigInt base;                     // B
  std::vector<BigInt> class_weight;  // B^(P-p) for p = 1..P

  static PriorityWeights for_instance(const Instance& inst);
};

struct LexSolution {
  PriorityProfile profile;
  std::vector<BigInt> potentials;  // by network node, certifies optimality
  FlowNetwork net;
  MinCostFlowResult solution;
};

/// The lexicographically optimal per-class flow totals over the capacity
/// polytope: class 1 is served first, then class 2 subject to that, and so
/// on. Realized as a profitable-paths-only min-cost flow with the weights
/// above. Throws Error(MissingPriorities) when edges carry no priorities.
LexSolution lex_optimal_profile(const Instance& inst);

/// Ratio-balances within the set of lexicographically optimal flows: fixes
/// optimal potentials once, restricts to the arcs every optimal flow may
/// use (zero reduced cost; negative forces saturation, positive forces
/// zero), then runs the phase algorithm. The output's priority profile is
/// certified equal to the lex-optimal one.
BalanceReport balance_with_priorities(const Instance& inst);
BalanceReport balance_with_priorities(const Instance& inst, LambdaQueryBudget* budget_out);

/// The composite epsilon-weighted objective
///   -sum_p eps^p F_p + eps^(P+1) * sum_j e_j r_j^2,
/// evaluated exactly. Verification aid only; never the production path.
Rational eval_priority_objective(const Instance& inst, const FlowAssignment& f,
                                 const Rational& eps);

/// Per-class totals of an assignment.
PriorityProfile priority_profile_of(const Instance& inst, const FlowAssignment& f);

}  // namespace colflow
