#include "colflow/priority_balancer.hpp"

#include <algorithm>

#include "colflow/errors.hpp"

namespace colflow {

PriorityWeights PriorityWeights::for_instance(const Instance& inst) {
  PriorityWeights w;
  w.base = 1 + inst.total_exposure();
  int p_count = inst.num_priorities();
  w.class_weight.resize(p_count);
  for (int p = 1; p <= p_count; ++p) {
    BigInt weight = 1;
    for (int k = 0; k < p_count - p; ++k) weight *= w.base;
    w.class_weight[p - 1] = weight;
  }
  return w;
}

namespace {

struct PriorityNetwork {
  FlowNetwork net;
  std::vector<int> sec_node;
  std::vector<int> acct_node;
  std::vector<int> source_arc;  // per security
  std::vector<int> middle_arc;  // per edge
  std::vector<int> sink_arc;    // per account
};

PriorityNetwork build_priority_network(const Instance& inst, const PriorityWeights& weights) {
  PriorityNetwork pn;
  pn.sec_node.resize(inst.security_count());
  pn.acct_node.resize(inst.account_count());
  pn.source_arc.resize(inst.security_count());
  pn.middle_arc.resize(inst.edge_count());
  pn.sink_arc.resize(inst.account_count());
  for (int i = 0; i < inst.security_count(); ++i) {
    pn.sec_node[i] = pn.net.add_node(NodeKind::Security, i);
    pn.source_arc[i] =
        pn.net.add_arc(pn.net.source(), pn.sec_node[i], Rational(inst.securities()[i].value));
  }
  for (int j = 0; j < inst.account_count(); ++j) {
    pn.acct_node[j] = pn.net.add_node(NodeKind::Account, j);
    pn.sink_arc[j] =
        pn.net.add_arc(pn.acct_node[j], pn.net.sink(), Rational(inst.accounts()[j].exposure));
  }
  for (int e = 0; e < inst.edge_count(); ++e) {
    const auto& edge = inst.edges()[e];
    pn.middle_arc[e] = pn.net.add_arc(pn.sec_node[edge.security], pn.acct_node[edge.account],
                                      edge.cap, -weights.class_weight[edge.priority - 1]);
  }
  return pn;
}

}  // namespace

PriorityProfile priority_profile_of(const Instance& inst, const FlowAssignment& f) {
  PriorityProfile profile;
  profile.class_total.assign(std::max(inst.num_priorities(), 0), Rational(0));
  for (int e = 0; e < inst.edge_count(); ++e) {
    int p = inst.edges()[e].priority;
    if (p > 0) profile.class_total[p - 1] += f.edge_flow[e];
  }
  return profile;
}

LexSolution lex_optimal_profile(const Instance& inst) {
  if (!inst.has_priorities())
    fail(ErrorCode::MissingPriorities, "instance edges carry no priorities");
  auto weights = PriorityWeights::for_instance(inst);
  auto pn = build_priority_network(inst, weights);
  auto solution = min_cost_flow_profitable(pn.net);

  FlowAssignment f;
  f.edge_flow.resize(inst.edge_count());
  for (int e = 0; e < inst.edge_count(); ++e)
    f.edge_flow[e] = solution.arc_flow[pn.middle_arc[e]];

  LexSolution lex;
  lex.profile = priority_profile_of(inst, f);
  lex.potentials = solution.potential;
  lex.net = std::move(pn.net);
  lex.solution = std::move(solution);
  return lex;
}

BalanceReport balance_with_priorities(const Instance& inst) {
  return balance_with_priorities(inst, nullptr);
}

BalanceReport balance_with_priorities(const Instance& inst, LambdaQueryBudget* budget_out) {
  if (!inst.has_priorities())
    fail(ErrorCode::MissingPriorities, "instance edges carry no priorities");
  auto weights = PriorityWeights::for_instance(inst);
  auto pn = build_priority_network(inst, weights);
  auto solution = min_cost_flow_profitable(pn.net);
  const auto& pot = solution.potential;

  auto reduced_cost = [&](int arc) {
    const Arc& a = pn.net.arcs()[arc];
    return a.cost + pot[a.from] - pot[a.to];
  };

  // Complementary slackness against the fixed potentials carves out the
  // subnetwork carrying every lex-optimal flow.
  detail::PhaseProblem problem = detail::PhaseProblem::standard(inst);

  for (int j = 0; j < inst.account_count(); ++j) {
    BigInt rc = reduced_cost(pn.sink_arc[j]);
    if (rc < 0) {
      // Fully covered in every lex-optimal flow; balanced out of the
      // lambda scaling and finished in the last phase.
      problem.acct_live[j] = 0;
      problem.acct_pinned[j] = 1;
      problem.pinned_req[j] = Rational(inst.accounts()[j].exposure);
    } else if (rc > 0) {
      // Receives nothing in any lex-optimal flow: cut its eligibility so it
      // locks in risk ratio 1 through a lambda = 0 phase.
      for (int e = 0; e < inst.edge_count(); ++e)
        if (inst.edges()[e].account == j) problem.edge_on[e] = 0;
    }
  }
  for (int i = 0; i < inst.security_count(); ++i) {
    BigInt rc = reduced_cost(pn.source_arc[i]);
    if (rc > 0) {
      // Unused in any lex-optimal flow.
      problem.sec_live[i] = 0;
      for (int e = 0; e < inst.edge_count(); ++e)
        if (inst.edges()[e].security == i) problem.edge_on[e] = 0;
    } else if (rc < 0) {
      // Ships its full value in every lex-optimal flow.
      problem.sec_forced[i] = 1;
    }
  }
  for (int e = 0; e < inst.edge_count(); ++e) {
    BigInt rc = reduced_cost(pn.middle_arc[e]);
    if (rc > 0) {
      problem.edge_on[e] = 0;  // carries zero flow in every lex-optimal flow
    } else if (rc < 0) {
      // Saturated in every lex-optimal flow; only possible with a claim limit.
      const auto& edge = inst.edges()[e];
      internal_check(edge.cap.has_value(),
                     "uncapped edge with negative reduced cost at optimality");
      problem.edge_on[e] = 0;
      problem.locked_flow[e] = *edge.cap;
      problem.avail[edge.security] -= *edge.cap;
      internal_check(!problem.avail[edge.security].is_negative(),
                     "committed claim limits exceed security value");
      if (problem.acct_pinned[edge.account]) {
        problem.pinned_req[edge.account] -= *edge.cap;
        internal_check(!problem.pinned_req[edge.account].is_negative(),
                       "committed claim limits exceed pinned requirement");
      } else {
        problem.base_inflow[edge.account] += *edge.cap;
      }
    }
  }

  // A forced security with a single admissible edge has no routing freedom:
  // commit its shipment outright.
  for (int i = 0; i < inst.security_count(); ++i) {
    if (!problem.sec_forced[i] || !problem.sec_live[i]) continue;
    int only_edge = -1;
    int enabled = 0;
    for (int e = 0; e < inst.edge_count(); ++e)
      if (problem.edge_on[e] && inst.edges()[e].security == i) {
        ++enabled;
        only_edge = e;
      }
    if (enabled == 0) {
      internal_check(problem.avail[i].is_zero(),
                     "forced security has no admissible edge to ship through");
      problem.sec_live[i] = 0;
    } else if (enabled == 1) {
      const auto& edge = inst.edges()[only_edge];
      internal_check(!edge.cap || *edge.cap >= problem.avail[i],
                     "forced shipment exceeds the claim limit");
      problem.locked_flow[only_edge] = problem.avail[i];
      problem.edge_on[only_edge] = 0;
      if (problem.acct_pinned[edge.account]) {
        problem.pinned_req[edge.account] -= problem.avail[i];
        internal_check(!problem.pinned_req[edge.account].is_negative(),
                       "forced shipment exceeds pinned requirement");
      } else {
        problem.base_inflow[edge.account] += problem.avail[i];
      }
      problem.avail[i] = 0;
      problem.sec_live[i] = 0;
    }
  }

  // Multi-edge forced securities need the bounded feasibility networks with
  // the admissible total flow pinned.
  if (problem.any_forced_securities()) {
    Rational locked_total = 0;
    for (int e = 0; e < inst.edge_count(); ++e) locked_total += problem.locked_flow[e];
    problem.use_value_pin = true;
    problem.value_pin = solution.value - locked_total;
  }

  std::vector<char> admissible_edge = problem.edge_on;
  std::vector<char> pinned_account = problem.acct_pinned;
  LambdaQueryBudget budget;
  auto run = detail::run_phase_loop(std::move(problem), budget);
  if (budget_out) *budget_out = budget;

  BalanceReport report;
  report.flow = std::move(run.flow);
  report.flow.over_coverage = false;
  report.phases = std::move(run.phases);
  report.surplus = surplus_vector(inst, report.flow);
  report.risk_ratio = risk_vector(inst, report.flow);
  report.objective = mwsr_objective(inst, report.flow);

  // The weighted cost depends only on the class totals, so profile equality
  // certifies that the balanced flow is still lexicographically optimal.
  auto lex_profile = priority_profile_of(inst, [&] {
    FlowAssignment f;
    f.edge_flow.resize(inst.edge_count());
    for (int e = 0; e < inst.edge_count(); ++e)
      f.edge_flow[e] = solution.arc_flow[pn.middle_arc[e]];
    return f;
  }());
  auto out_profile = priority_profile_of(inst, report.flow);
  internal_check(lex_profile == out_profile,
                 "balanced flow's priority profile deviates from the lex-optimal profile");
  report.priority_profile = std::move(out_profile);

  // Balance condition restricted to the admissible subnetwork. An account
  // pinned to full coverage cannot give flow up, so it is never a violating
  // receiver.
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (!admissible_edge[e] || report.flow.edge_flow[e].is_zero()) continue;
    int i = inst.edges()[e].security;
    int j = inst.edges()[e].account;
    if (pinned_account[j]) continue;
    for (int g = 0; g < inst.edge_count(); ++g) {
      if (g == e || !admissible_edge[g] || inst.edges()[g].security != i) continue;
      int l = inst.edges()[g].account;
      const auto& cap = inst.edges()[g].cap;
      if (cap && report.flow.edge_flow[g] >= *cap) continue;
      internal_check(report.risk_ratio[j] >= report.risk_ratio[l],
                     "balance condition violated inside the admissible subnetwork");
    }
  }
  return report;
}

Rational eval_priority_objective(const Instance& inst, const FlowAssignment& f,
                                 const Rational& eps) {
  if (!inst.has_priorities())
    fail(ErrorCode::MissingPriorities, "instance edges carry no priorities");
  if (eps <= Rational(0) || eps >= Rational(1))
    fail(ErrorCode::InvalidInput, "eps must lie strictly between 0 and 1");
  auto profile = priority_profile_of(inst, f);
  int p_count = inst.num_priorities();
  Rational value = 0;
  for (int p = 1; p <= p_count; ++p)
    value -= pow(eps, static_cast<unsigned>(p)) * profile.class_total[p - 1];
  value += pow(eps, static_cast<unsigned>(p_count) + 1) * mwsr_objective(inst, f);
  return value;
}

}  // namespace colflow
