#include "colflow/verification.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "colflow/errors.hpp"
#include "colflow/flow_network.hpp"

namespace colflow {

std::vector<RatioBalanceViolation> check_ratio_balance(const Instance& inst,
                                                       const FlowAssignment& f,
                                                       const Rational& tolerance) {
  check_flow(inst, f);
  auto risk = [&] {
    auto surplus = surplus_vector(inst, f);
    std::vector<Rational> r(inst.account_count());
    for (int j = 0; j < inst.account_count(); ++j)
      r[j] = surplus[j] / Rational(inst.accounts()[j].exposure);
    return r;
  }();

  std::vector<RatioBalanceViolation> violations;
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (f.edge_flow[e].is_zero() || f.edge_flow[e].is_negative()) continue;
    int i = inst.edges()[e].security;
    int j = inst.edges()[e].account;
    for (int g = 0; g < inst.edge_count(); ++g) {
      if (g == e || inst.edges()[g].security != i) continue;
      int l = inst.edges()[g].account;
      const auto& cap = inst.edges()[g].cap;
      if (cap && f.edge_flow[g] >= *cap) continue;  // no room to divert
      if (risk[l] - risk[j] > tolerance)
        violations.push_back({e, g, risk[j], risk[l]});
    }
  }
  return violations;
}

namespace {

struct StandardNetwork {
  FlowNetwork net;
  std::vector<int> middle_arc;  // per edge
  std::vector<int> source_arc;
  std::vector<int> sink_arc;
};

StandardNetwork standard_network(const Instance& inst) {
  StandardNetwork sn;
  sn.middle_arc.resize(inst.edge_count());
  sn.source_arc.resize(inst.security_count());
  sn.sink_arc.resize(inst.account_count());
  std::vector<int> sec_node(inst.security_count());
  std::vector<int> acct_node(inst.account_count());
  for (int i = 0; i < inst.security_count(); ++i) {
    sec_node[i] = sn.net.add_node(NodeKind::Security, i);
    sn.source_arc[i] =
        sn.net.add_arc(sn.net.source(), sec_node[i], Rational(inst.securities()[i].value));
  }
  for (int j = 0; j < inst.account_count(); ++j) {
    acct_node[j] = sn.net.add_node(NodeKind::Account, j);
    sn.sink_arc[j] =
        sn.net.add_arc(acct_node[j], sn.net.sink(), Rational(inst.accounts()[j].exposure));
  }
  for (int e = 0; e < inst.edge_count(); ++e)
    sn.middle_arc[e] = sn.net.add_arc(sec_node[inst.edges()[e].security],
                                      acct_node[inst.edges()[e].account], inst.edges()[e].cap);
  return sn;
}

std::vector<Rational> network_flow_of(const Instance& inst, const StandardNetwork& sn,
                                      const FlowAssignment& f) {
  std::vector<Rational> arc_flow(sn.net.arc_count(), Rational(0));
  for (int e = 0; e < inst.edge_count(); ++e) arc_flow[sn.middle_arc[e]] = f.edge_flow[e];
  auto outflow = security_outflow(inst, f);
  for (int i = 0; i < inst.security_count(); ++i) arc_flow[sn.source_arc[i]] = outflow[i];
  auto inflow = account_inflow(inst, f);
  for (int j = 0; j < inst.account_count(); ++j) arc_flow[sn.sink_arc[j]] = inflow[j];
  return arc_flow;
}

}  // namespace

MaximalityVerdict check_maximality(const Instance& inst, const FlowAssignment& f) {
  check_flow(inst, f);
  auto sn = standard_network(inst);
  MaxFlowResult current;
  current.arc_flow = network_flow_of(inst, sn, f);
  current.value = total_flow(f);

  // BFS on the residual, tracking parents for the witness.
  std::vector<int> parent(sn.net.node_count(), -1);
  std::vector<char> seen(sn.net.node_count(), 0);
  std::queue<int> q;
  seen[sn.net.source()] = 1;
  q.push(sn.net.source());
  std::vector<std::vector<std::pair<int, int>>> adj(sn.net.node_count());  // (slot head, arc)
  for (int a = 0; a < sn.net.arc_count(); ++a) {
    adj[sn.net.arcs()[a].from].push_back({sn.net.arcs()[a].to, a});
    adj[sn.net.arcs()[a].to].push_back({sn.net.arcs()[a].from, ~a});
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [v, slot] : adj[u]) {
      if (seen[v]) continue;
      bool residual;
      if (slot >= 0) {
        const Arc& arc = sn.net.arcs()[slot];
        residual = !arc.cap || current.arc_flow[slot] < *arc.cap;
      } else {
        residual = current.arc_flow[~slot] > Rational(0);
      }
      if (!residual) continue;
      seen[v] = 1;
      parent[v] = u;
      q.push(v);
    }
  }

  MaximalityVerdict verdict;
  verdict.maximal = !seen[sn.net.sink()];
  if (!verdict.maximal) {
    std::vector<int> path;
    for (int v = sn.net.sink(); v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    std::string text;
    for (int v : path) {
      if (!text.empty()) text += " -> ";
      const NetNode& node = sn.net.nodes()[v];
      switch (node.kind) {
        case NodeKind::Source: text += "source"; break;
        case NodeKind::Sink: text += "sink"; break;
        case NodeKind::Security: text += "security '" + inst.securities()[node.ref].id + "'"; break;
        case NodeKind::Account: text += "account '" + inst.accounts()[node.ref].id + "'"; break;
      }
    }
    verdict.augmenting_path = std::move(text);
  }
  return verdict;
}

namespace {

struct OracleState {
  const Instance& inst;
  std::vector<char> sec_live;
  std::vector<char> acct_live;
  std::vector<char> edge_on;
  std::vector<Rational> avail;

  explicit OracleState(const Instance& instance)
      : inst(instance),
        sec_live(instance.security_count(), 1),
        acct_live(instance.account_count(), 1),
        edge_on(instance.edge_count(), 1) {
    avail.reserve(instance.security_count());
    for (const auto& s : instance.securities()) avail.emplace_back(s.value);
  }

  // Capacity a set of accounts can absorb from its neighborhood (min-cut
  // when claim limits are present; plain neighborhood value otherwise).
  Rational group_capacity(const std::vector<int>& accounts) const {
    if (!inst.has_caps()) {
      std::vector<char> in_group(inst.account_count(), 0);
      for (int j : accounts) in_group[j] = 1;
      std::vector<char> adjacent(inst.security_count(), 0);
      for (int e = 0; e < inst.edge_count(); ++e)
        if (edge_on[e] && in_group[inst.edges()[e].account]) adjacent[inst.edges()[e].security] = 1;
      Rational total = 0;
      for (int i = 0; i < inst.security_count(); ++i)
        if (sec_live[i] && adjacent[i]) total += avail[i];
      return total;
    }
    FlowNetwork net = capacity_network(accounts).first;
    return max_flow(net).value;
  }

  std::pair<FlowNetwork, std::vector<int>> capacity_network(
      const std::vector<int>& accounts) const {
    FlowNetwork net;
    std::vector<char> in_group(inst.account_count(), 0);
    for (int j : accounts) in_group[j] = 1;
    std::vector<int> sec_node(inst.security_count(), -1);
    std::vector<int> acct_node(inst.account_count(), -1);
    std::vector<int> middle_arc(inst.edge_count(), -1);
    for (int i = 0; i < inst.security_count(); ++i)
      if (sec_live[i]) {
        sec_node[i] = net.add_node(NodeKind::Security, i);
        net.add_arc(net.source(), sec_node[i], avail[i]);
      }
    for (int j : accounts) {
      acct_node[j] = net.add_node(NodeKind::Account, j);
      net.add_arc(acct_node[j], net.sink(), std::nullopt);
    }
    for (int e = 0; e < inst.edge_count(); ++e) {
      const auto& edge = inst.edges()[e];
      if (edge_on[e] && in_group[edge.account] && sec_node[edge.security] >= 0)
        middle_arc[e] = net.add_arc(sec_node[edge.security], acct_node[edge.account],
                                    inst.edges()[e].cap);
    }
    return {std::move(net), std::move(middle_arc)};
  }

  Rational group_exposure(const std::vector<int>& accounts) const {
    Rational total = 0;
    for (int j : accounts) total += Rational(inst.accounts()[j].exposure);
    return total;
  }

  void retire_accounts(const std::vector<int>& tight_accounts) {
    // Tight securities: the group's cut side plus exhausted ones; surviving
    // securities commit their saturated claim-limited edges into the group.
    std::vector<char> in_group(inst.account_count(), 0);
    for (int j : tight_accounts) in_group[j] = 1;

    std::vector<char> tight_sec(inst.security_count(), 0);
    if (!inst.has_caps()) {
      for (int e = 0; e < inst.edge_count(); ++e)
        if (edge_on[e] && in_group[inst.edges()[e].account]) tight_sec[inst.edges()[e].security] = 1;
    } else {
      auto [net, middle_arc] = capacity_network(tight_accounts);
      auto flow = max_flow(net);
      auto cut = residual_unreachable(net, flow);
      for (int i : cut.unreachable_securities) tight_sec[i] = 1;
      for (int e = 0; e < inst.edge_count(); ++e) {
        if (middle_arc[e] < 0) continue;
        int i = inst.edges()[e].security;
        if (!tight_sec[i]) avail[i] -= flow.arc_flow[middle_arc[e]];
      }
    }
    for (int i = 0; i < inst.security_count(); ++i) {
      if (!sec_live[i]) continue;
      if (tight_sec[i] || avail[i].is_zero()) sec_live[i] = 0;
    }
    for (int j : tight_accounts) acct_live[j] = 0;
    for (int e = 0; e < inst.edge_count(); ++e) {
      const auto& edge = inst.edges()[e];
      if (!sec_live[edge.security] || !acct_live[edge.account]) edge_on[e] = 0;
    }
  }
};

}  // namespace

std::vector<Rational> oracle_risk_vector(const Instance& inst, int max_accounts) {
  if (inst.has_priorities())
    fail(ErrorCode::InvalidInput, "the subset oracle does not handle priorities");
  if (inst.account_count() > max_accounts)
    fail(ErrorCode::TooLarge, "instance has " + std::to_string(inst.account_count()) +
                                  " accounts; oracle limit is " + std::to_string(max_accounts));

  OracleState state(inst);
  std::vector<Rational> risk(inst.account_count(), Rational(1));

  while (true) {
    std::vector<int> live;
    for (int j = 0; j < inst.account_count(); ++j)
      if (state.acct_live[j]) live.push_back(j);
    if (live.empty()) break;

    int k = static_cast<int>(live.size());
    std::optional<Rational> best;
    std::uint32_t best_union = 0;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> group;
      for (int b = 0; b < k; ++b)
        if (mask & (1u << b)) group.push_back(live[b]);
      Rational ratio = state.group_capacity(group) / state.group_exposure(group);
      if (!best || ratio < *best) {
        best = ratio;
        best_union = mask;
      } else if (ratio == *best) {
        best_union |= mask;
      }
    }

    if (*best >= Rational(1)) {
      for (int j : live) {
        risk[j] = Rational(0);
        state.acct_live[j] = 0;
      }
      break;
    }

    std::vector<int> tight;
    for (int b = 0; b < k; ++b)
      if (best_union & (1u << b)) tight.push_back(live[b]);
    for (int j : tight) risk[j] = Rational(1) - *best;
    state.retire_accounts(tight);
  }
  return risk;
}

double gradient_check(const Instance& inst, const FlowAssignment& f, double step) {
  check_flow(inst, f);
  std::vector<double> base(inst.edge_count());
  for (int e = 0; e < inst.edge_count(); ++e) base[e] = f.edge_flow[e].to_double();

  auto objective = [&](const std::vector<double>& flow) {
    std::vector<double> inflow(inst.account_count(), 0.0);
    for (int e = 0; e < inst.edge_count(); ++e) inflow[inst.edges()[e].account] += flow[e];
    double total = 0.0;
    for (int j = 0; j < inst.account_count(); ++j) {
      double exposure = Rational(inst.accounts()[j].exposure).to_double();
      double r = (exposure - inflow[j]) / exposure;
      total += exposure * r * r;
    }
    return total;
  };

  auto risk = risk_vector(inst, f);
  double max_dev = 0.0;
  std::vector<double> probe = base;
  for (int e = 0; e < inst.edge_count(); ++e) {
    int j = inst.edges()[e].account;
    probe[e] = base[e] + step;
    double up = objective(probe);
    probe[e] = base[e] - step;
    double down = objective(probe);
    probe[e] = base[e];
    double fd = (up - down) / (2.0 * step);
    double analytic = -2.0 * risk[j].to_double();
    max_dev = std::max(max_dev, std::abs(fd - analytic));
  }
  return max_dev;
}

FlowAssignment random_feasible_flow(const Instance& inst, std::mt19937_64& rng, bool interior) {
  std::vector<int> order(inst.edge_count());
  for (int e = 0; e < inst.edge_count(); ++e) order[e] = e;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Rational> rem_value;
  for (const auto& s : inst.securities()) rem_value.emplace_back(s.value);
  std::vector<Rational> rem_exposure;
  for (const auto& a : inst.accounts()) rem_exposure.emplace_back(a.exposure);

  FlowAssignment f = zero_flow(inst);
  for (int e : order) {
    const auto& edge = inst.edges()[e];
    Rational amount = min(rem_value[edge.security], rem_exposure[edge.account]);
    if (edge.cap && *edge.cap < amount) amount = *edge.cap;
    if (amount.is_negative() || amount.is_zero()) continue;
    if (interior) {
      // stay away from the bounds so the edge can be perturbed both ways
      amount = amount * Rational(1 + static_cast<long long>(rng() % 7), 9);
    }
    f.edge_flow[e] = amount;
    rem_value[edge.security] -= amount;
    rem_exposure[edge.account] -= amount;
  }
  return f;
}

FlowAssignment random_maximum_flow(const Instance& inst, std::mt19937_64& rng) {
  FlowAssignment greedy = random_feasible_flow(inst, rng, false);
  auto sn = standard_network(inst);
  auto completed = max_flow_from(sn.net, network_flow_of(inst, sn, greedy));
  FlowAssignment f = zero_flow(inst);
  for (int e = 0; e < inst.edge_count(); ++e) f.edge_flow[e] = completed.arc_flow[sn.middle_arc[e]];
  return f;
}

LocalOptVerdict local_opt_probe(const Instance& inst, const FlowAssignment& f, int trials,
                                std::uint64_t seed) {
  Rational base_objective = mwsr_objective(inst, f);
  std::mt19937_64 rng(seed);
  LocalOptVerdict verdict;
  verdict.best_candidate_objective = base_objective;
  bool first = true;
  for (int t = 0; t < trials; ++t) {
    FlowAssignment candidate = random_maximum_flow(inst, rng);
    if (t % 2 == 1) {
      // convex combination with the production flow; still a maximum flow
      Rational theta(1 + static_cast<long long>(rng() % 15), 16);
      for (int e = 0; e < inst.edge_count(); ++e)
        candidate.edge_flow[e] =
            theta * f.edge_flow[e] + (Rational(1) - theta) * candidate.edge_flow[e];
    }
    Rational objective = mwsr_objective(inst, candidate);
    ++verdict.candidates_tested;
    if (objective < base_objective) ++verdict.violations;
    if (first || objective < verdict.best_candidate_objective) {
      verdict.best_candidate_objective = objective;
      first = false;
    }
  }
  verdict.ok = verdict.violations == 0;
  return verdict;
}

}  // namespace colflow
