#pragma once

#include <optional>
#include <vector>

#include "colflow/instance.hpp"
#include "colflow/rational.hpp"

namespace colflow {

/// Per-edge flow values, aligned with Instance::edges(). In over-coverage
/// mode the per-account inflow bound is waived.
struct FlowAssignment {
  std::vector<Rational> edge_flow;
  bool over_coverage = false;
};

FlowAssignment zero_flow(const Instance& inst);

/// One peeling step of the balancing recursion: the critical coverage level
/// and the node sets it retires.
struct PhaseRecord {
  int index = 0;  // k, 1-based
  Rational lambda;
  std::vector<int> tight_securities;  // sorted instance indices
  std::vector<int> tight_accounts;
};

struct OverCoverageResult {
  FlowAssignment flow;  // complete assignment, over_coverage = true
  std::vector<PhaseRecord> phases;
};

/// Per-priority-class flow totals, index p-1 for class p.
struct PriorityProfile {
  std::vector<Rational> class_total;

  friend bool operator==(const PriorityProfile& a, const PriorityProfile& b) {
    return a.class_total == b.class_total;
  }
};

struct BalanceReport {
  FlowAssignment flow;
  std::vector<Rational> surplus;     // s_j, by account
  std::vector<Rational> risk_ratio;  // r_j, by account
  std::vector<PhaseRecord> phases;
  Rational objective;  // sum_j e_j r_j^2
  std::optional<OverCoverageResult> over_coverage;
  std::optional<PriorityProfile> priority_profile;
};

/// Throws Error(InfeasibleFlow) if f violates the assignment invariants
/// against inst (negative flow, cap, per-security or per-account bound).
void check_flow(const Instance& inst, const FlowAssignment& f);

std::vector<Rational> security_outflow(const Instance& inst, const FlowAssignment& f);
std::vector<Rational> account_inflow(const Instance& inst, const FlowAssignment& f);

/// s_j = e_j - inflow(j).
std::vector<Rational> surplus_vector(const Instance& inst, const FlowAssignment& f);

/// r_j = s_j / e_j, exact. Validates f first.
std::vector<Rational> risk_vector(const Instance& inst, const FlowAssignment& f);

/// sum_j e_j r_j^2, exact. Validates f first.
Rational mwsr_objective(const Instance& inst, const FlowAssignment& f);

Rational total_flow(const FlowAssignment& f);

}  // namespace colflow
