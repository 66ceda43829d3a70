#pragma once

#include <optional>
#include <vector>

#include "colflow/flow_network.hpp"
#include "colflow/instance.hpp"
#include "colflow/report.hpp"

namespace colflow {

enum class BalanceMode {
  Standard,      // lambda in [0,1], sink caps lambda*e_j
  OverCoverage,  // lambda >= 1 on the restricted sub-instance
};

/// Counts feasibility queries (max-flow computations) against the fraction
/// bound N. The per-phase count stays within a small constant times
/// log2(N^2); tests assert it, and blowing the hard limit signals a
/// bound-selection bug rather than an input error.
struct LambdaQueryBudget {
  BigInt bound_n = 1;
  long queries_used = 0;
  long phase_queries = 0;
  std::vector<long> per_phase;

  void begin_phase();
  void count_query();
  long hard_limit() const;
};

/// The auxiliary flow problem at coverage level lambda: source arcs v_i,
/// sink arcs lambda*e_j, middle arcs +infinity or the claim limit.
FlowNetwork build_p_lambda(const Instance& inst, const Rational& lambda, BalanceMode mode);

struct FeasibilityResult {
  bool feasible = false;
  FlowNetwork net;
  MaxFlowResult flow;
  ResidualCut cut;
};

/// Feasible iff the max-flow of the lambda network saturates every sink arc.
FeasibilityResult is_feasible(const Instance& inst, const Rational& lambda, BalanceMode mode);

struct LambdaResult {
  Rational lambda;
  FlowNetwork net;
  MaxFlowResult flow;  // confirming max flow at exactly lambda
  ResidualCut cut;
};

/// The maximum feasible lambda, exactly, by bounded-fraction threshold
/// search (one max-flow per query), confirmed by a feasibility check at the
/// answer and at the adjacent bound-representable fraction.
LambdaResult find_lambda(const Instance& inst, BalanceMode mode, LambdaQueryBudget& budget);

/// The phase algorithm: peel tight sets at increasing critical coverage
/// levels until the graph is exhausted. Returns the ratio-balanced maximum
/// flow with the per-account surplus/risk vectors and the phase list.
BalanceReport phase_decompose(const Instance& inst);
BalanceReport phase_decompose(const Instance& inst, LambdaQueryBudget* budget_out);

/// Distributes leftover security value across fully covered accounts
/// (coverage levels >= 1) and records the extra phases; the base report is
/// unchanged. Instances with no fully covered account come back untouched.
BalanceReport over_coverage_pass(const Instance& inst, BalanceReport report);

namespace detail {

/// Working state shared by the standard, over-coverage and priority phase
/// runs: live/pinned node sets, reduced security availabilities, committed
/// inflows and the enabled edge set.
struct PhaseProblem {
  const Instance* inst = nullptr;
  BalanceMode mode = BalanceMode::Standard;
  std::vector<char> sec_live;
  std::vector<char> acct_live;
  std::vector<char> acct_pinned;
  std::vector<Rational> avail;        // per security
  std::vector<Rational> pinned_req;   // per account, meaningful when pinned
  std::vector<Rational> base_inflow;  // per live account, committed coverage
  std::vector<char> edge_on;
  std::vector<Rational> locked_flow;  // per edge, accumulates the output

  // Priority runs: securities whose full availability ships in every
  // admissible flow, and the pinned total flow the networks must carry.
  std::vector<char> sec_forced;
  bool use_value_pin = false;
  Rational value_pin;

  static PhaseProblem standard(const Instance& inst);

  bool any_live_securities() const;
  bool any_live_accounts() const;
  bool any_forced_securities() const;
  BigInt search_bound() const;
};

struct PhaseRunResult {
  std::vector<PhaseRecord> phases;
  FlowAssignment flow;
};

PhaseRunResult run_phase_loop(PhaseProblem problem, LambdaQueryBudget& budget);

}  // namespace detail

}  // namespace colflow
