#include "colflow/ratio_balancer.hpp"

#include <algorithm>
#include <map>

#include "colflow/errors.hpp"
#include "colflow/fraction_search.hpp"

namespace colflow {

namespace {

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt x = a, y = b;
  while (y != 0) {
    BigInt t = x % y;
    x = std::move(y);
    y = std::move(t);
  }
  return (a / x) * b;
}

long ceil_log2(const BigInt& x) {
  if (x <= 1) return 0;
  unsigned bit = boost::multiprecision::msb(x);
  BigInt power = BigInt(1) << bit;
  return static_cast<long>(bit) + (power == x ? 0 : 1);
}

}  // namespace

void LambdaQueryBudget::begin_phase() {
  per_phase.push_back(0);
  phase_queries = 0;
}

void LambdaQueryBudget::count_query() {
  ++queries_used;
  ++phase_queries;
  if (!per_phase.empty()) ++per_phase.back();
  if (phase_queries > hard_limit())
    fail(ErrorCode::BudgetExceeded,
         "feasibility queries exceeded the bound for N = " + bound_n.str() +
             "; the search bound is too small for this instance");
}

long LambdaQueryBudget::hard_limit() const {
  // Far above the advertised 3*ceil(log2(2 N^2)); only a bound-selection bug
  // can reach this.
  return 8 * (ceil_log2(bound_n) + 2) + 64;
}

namespace detail {

PhaseProblem PhaseProblem::standard(const Instance& inst) {
  PhaseProblem p;
  p.inst = &inst;
  p.mode = BalanceMode::Standard;
  p.sec_live.assign(inst.security_count(), 1);
  p.acct_live.assign(inst.account_count(), 1);
  p.acct_pinned.assign(inst.account_count(), 0);
  p.avail.reserve(inst.security_count());
  for (const auto& s : inst.securities()) p.avail.emplace_back(s.value);
  p.pinned_req.assign(inst.account_count(), Rational(0));
  p.base_inflow.assign(inst.account_count(), Rational(0));
  p.edge_on.assign(inst.edge_count(), 1);
  p.locked_flow.assign(inst.edge_count(), Rational(0));
  p.sec_forced.assign(inst.security_count(), 0);
  return p;
}

bool PhaseProblem::any_live_securities() const {
  return std::any_of(sec_live.begin(), sec_live.end(), [](char c) { return c != 0; });
}

bool PhaseProblem::any_live_accounts() const {
  return std::any_of(acct_live.begin(), acct_live.end(), [](char c) { return c != 0; });
}

bool PhaseProblem::any_forced_securities() const {
  for (int i = 0; i < inst->security_count(); ++i)
    if (sec_live[i] && sec_forced[i]) return true;
  return false;
}

BigInt PhaseProblem::search_bound() const {
  bool plain = mode == BalanceMode::Standard && !inst->has_caps() && !use_value_pin;
  if (plain) {
    for (const auto& b : base_inflow) plain = plain && b.is_zero();
    for (int j = 0; j < inst->account_count(); ++j) plain = plain && !acct_pinned[j];
    for (int i = 0; i < inst->security_count(); ++i) plain = plain && !sec_forced[i];
  }
  if (plain) {
    // No claim limits, no commitments: the critical ratios have numerator
    // and denominator at most n*M.
    BigInt n = inst->node_count();
    BigInt bound = n * inst->max_magnitude();
    return bound < 1 ? BigInt(1) : bound;
  }
  // Generalized safe bound: every critical lambda is a cut value over a
  // subset-sum of exposures; scale by the lcm of working denominators.
  BigInt scale = 1;
  Rational cap_sum = 0;
  for (int i = 0; i < inst->security_count(); ++i) {
    if (!sec_live[i]) continue;
    scale = lcm(scale, avail[i].den());
    cap_sum += avail[i];
  }
  for (int e = 0; e < inst->edge_count(); ++e) {
    if (!edge_on[e] || !inst->edges()[e].cap) continue;
    scale = lcm(scale, inst->edges()[e].cap->den());
    cap_sum += *inst->edges()[e].cap;
  }
  BigInt exposure_sum = 0;
  for (int j = 0; j < inst->account_count(); ++j) {
    if (acct_live[j]) {
      scale = lcm(scale, base_inflow[j].den());
      cap_sum += base_inflow[j];
      exposure_sum += inst->accounts()[j].exposure;
    } else if (acct_pinned[j]) {
      scale = lcm(scale, pinned_req[j].den());
      cap_sum += pinned_req[j];
      exposure_sum += inst->accounts()[j].exposure;
    }
  }
  if (use_value_pin) {
    scale = lcm(scale, value_pin.den());
    cap_sum += abs(value_pin);
  }
  BigInt numerator_bound = cap_sum.ceil() + 1;
  BigInt bound = scale * (numerator_bound > exposure_sum ? numerator_bound : exposure_sum);
  return bound < 1 ? BigInt(1) : bound;
}

namespace {

struct BuiltNetwork {
  FlowNetwork net;
  std::vector<int> source_arc;  // per security, -1 if absent
  std::vector<int> middle_arc;  // per edge, -1 if absent
  std::vector<int> sink_arc;    // per account, -1 if absent
  Rational target;              // max-flow value required for feasibility
  // Lower-bound mode (forced securities present): per-arc lower bounds and
  // the pinned total circulation the remaining admissible flows must carry.
  bool bounded = false;
  std::vector<Rational> lower;
  Rational value_pin;
};

BuiltNetwork build_network(const PhaseProblem& p, const Rational& lambda) {
  const Instance& inst = *p.inst;
  BuiltNetwork b;
  b.source_arc.assign(inst.security_count(), -1);
  b.middle_arc.assign(inst.edge_count(), -1);
  b.sink_arc.assign(inst.account_count(), -1);
  b.target = 0;
  b.bounded = p.any_forced_securities();
  b.value_pin = p.value_pin;

  std::vector<int> sec_node(inst.security_count(), -1);
  std::vector<int> acct_node(inst.account_count(), -1);
  auto push_arc = [&](int from, int to, std::optional<Rational> cap, Rational low) {
    int arc = b.net.add_arc(from, to, std::move(cap));
    b.lower.push_back(std::move(low));
    return arc;
  };
  for (int i = 0; i < inst.security_count(); ++i) {
    if (!p.sec_live[i]) continue;
    sec_node[i] = b.net.add_node(NodeKind::Security, i);
    b.source_arc[i] = push_arc(b.net.source(), sec_node[i], p.avail[i],
                               p.sec_forced[i] ? p.avail[i] : Rational(0));
  }
  for (int j = 0; j < inst.account_count(); ++j) {
    Rational need;
    Rational room;
    if (p.acct_live[j]) {
      need = lambda * Rational(inst.accounts()[j].exposure) - p.base_inflow[j];
      if (need.is_negative()) need = 0;
      room = b.bounded ? Rational(inst.accounts()[j].exposure) - p.base_inflow[j] : need;
      if (room < need) room = need;
    } else if (p.acct_pinned[j]) {
      need = p.pinned_req[j];
      room = need;
    } else {
      continue;
    }
    acct_node[j] = b.net.add_node(NodeKind::Account, j);
    b.sink_arc[j] = push_arc(acct_node[j], b.net.sink(), room, need);
    b.target += need;
  }
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (!p.edge_on[e]) continue;
    const auto& edge = inst.edges()[e];
    if (sec_node[edge.security] < 0 || acct_node[edge.account] < 0) continue;
    b.middle_arc[e] =
        push_arc(sec_node[edge.security], acct_node[edge.account], edge.cap, Rational(0));
  }
  return b;
}

struct Probe {
  BuiltNetwork built;
  MaxFlowResult flow;
  bool feasible = false;
};

// Circulation feasibility with lower bounds and a pinned total value, by the
// excess transform: one max-flow on an auxiliary network.
void solve_bounded(Probe& probe) {
  const BuiltNetwork& b = probe.built;
  const FlowNetwork& net = b.net;
  FlowNetwork aux;  // node 0 = super source, node 1 = super sink
  std::vector<int> mirror(net.node_count());
  for (int v = 0; v < net.node_count(); ++v)
    mirror[v] = aux.add_node(net.nodes()[v].kind == NodeKind::Source ||
                                     net.nodes()[v].kind == NodeKind::Sink
                                 ? NodeKind::Security  // kind is irrelevant here
                                 : net.nodes()[v].kind,
                             net.nodes()[v].ref);

  std::vector<Rational> excess(net.node_count(), Rational(0));
  std::vector<int> aux_arc(net.arc_count(), -1);
  for (int a = 0; a < net.arc_count(); ++a) {
    const Arc& arc = net.arcs()[a];
    const Rational& low = b.lower[a];
    std::optional<Rational> residual_cap = arc.cap;
    if (residual_cap) {
      internal_check(*residual_cap >= low, "arc capacity below its lower bound");
      residual_cap = *residual_cap - low;
    }
    if (!residual_cap || !residual_cap->is_zero())
      aux_arc[a] = aux.add_arc(mirror[arc.from], mirror[arc.to], residual_cap);
    if (!low.is_zero()) {
      excess[arc.to] += low;
      excess[arc.from] -= low;
    }
  }
  // pinned total circulation: a fixed sink -> source return arc
  excess[net.source()] += b.value_pin;
  excess[net.sink()] -= b.value_pin;

  Rational required = 0;
  for (int v = 0; v < net.node_count(); ++v) {
    if (excess[v] > Rational(0)) {
      aux.add_arc(aux.source(), mirror[v], excess[v]);
      required += excess[v];
    } else if (excess[v] < Rational(0)) {
      aux.add_arc(mirror[v], aux.sink(), -excess[v]);
    }
  }

  auto aux_flow = max_flow(aux);
  probe.feasible = aux_flow.value == required;
  probe.flow.arc_flow.assign(net.arc_count(), Rational(0));
  probe.flow.value = 0;
  for (int a = 0; a < net.arc_count(); ++a) {
    probe.flow.arc_flow[a] = b.lower[a];
    if (aux_arc[a] >= 0) probe.flow.arc_flow[a] += aux_flow.arc_flow[aux_arc[a]];
    if (net.arcs()[a].from == net.source()) probe.flow.value += probe.flow.arc_flow[a];
  }
}

Probe solve_feasibility(const PhaseProblem& p, const Rational& lambda) {
  Probe probe;
  probe.built = build_network(p, lambda);
  if (probe.built.bounded) {
    solve_bounded(probe);
    return probe;
  }
  probe.flow = max_flow(probe.built.net);
  probe.feasible = probe.flow.value == probe.built.target;
  return probe;
}

// Tight sets for the pinned-circulation mode. The value budget is constant,
// so an account's inflow rises only by taking overshoot from another sink
// along a residual cycle through the sink node. A live account is tight
// exactly when it sits on its floor and no such cycle exists; accounts held
// above their floor (forced absorption) or already at their exposure stay
// live and settle at their own critical level later.
ResidualCut bounded_tight_sets(const BuiltNetwork& b, const MaxFlowResult& flow,
                               const PhaseProblem& p, const Rational& lambda) {
  const FlowNetwork& net = b.net;
  std::vector<std::vector<std::pair<int, int>>> adj(net.node_count());
  for (int a = 0; a < net.arc_count(); ++a) {
    adj[net.arcs()[a].from].push_back({net.arcs()[a].to, a});
    adj[net.arcs()[a].to].push_back({net.arcs()[a].from, ~a});
  }
  auto has_residual = [&](int slot) {
    if (slot >= 0) {
      const Arc& arc = net.arcs()[slot];
      return !arc.cap || flow.arc_flow[slot] < *arc.cap;
    }
    return flow.arc_flow[~slot] > b.lower[~slot];
  };
  // Can account j's sink flow increase along a residual cycle that avoids
  // its own sink arc?
  auto can_rise = [&](int j, int node_j) {
    int own_sink = b.sink_arc[j];
    const Arc& sink = net.arcs()[own_sink];
    if (sink.cap && flow.arc_flow[own_sink] >= *sink.cap) return false;  // no headroom
    std::vector<char> seen(net.node_count(), 0);
    std::vector<int> queue = {net.sink()};
    seen[net.sink()] = 1;
    while (!queue.empty()) {
      int u = queue.back();
      queue.pop_back();
      if (u == node_j) return true;
      for (auto [v, slot] : adj[u]) {
        if (seen[v] || slot == own_sink || ~slot == own_sink || !has_residual(slot)) continue;
        seen[v] = 1;
        queue.push_back(v);
      }
    }
    return false;
  };

  ResidualCut cut;
  std::vector<char> tight_acct(p.inst->account_count(), 0);
  for (int v = 0; v < net.node_count(); ++v) {
    if (net.nodes()[v].kind != NodeKind::Account) continue;
    int j = net.nodes()[v].ref;
    if (!p.acct_live[j]) continue;
    if (p.base_inflow[j] > lambda * Rational(p.inst->accounts()[j].exposure))
      continue;  // committed above this coverage level; settles later
    int arc = b.sink_arc[j];
    if (flow.arc_flow[arc] != b.lower[arc]) continue;  // held above its floor
    const Arc& sink = net.arcs()[arc];
    if (sink.cap && flow.arc_flow[arc] >= *sink.cap) continue;  // fully covered
    if (can_rise(j, v)) continue;
    tight_acct[j] = 1;
    cut.unreachable_accounts.push_back(j);
  }
  // Securities retire once everything they can still reach is tight or their
  // availability (after this phase's locks) is exhausted.
  for (int v = 0; v < net.node_count(); ++v) {
    if (net.nodes()[v].kind != NodeKind::Security) continue;
    int i = net.nodes()[v].ref;
    Rational remaining = p.avail[i];
    bool all_tight = true;
    for (int e = 0; e < p.inst->edge_count(); ++e) {
      if (!p.edge_on[e] || b.middle_arc[e] < 0 || p.inst->edges()[e].security != i) continue;
      if (tight_acct[p.inst->edges()[e].account])
        remaining -= flow.arc_flow[b.middle_arc[e]];
      else
        all_tight = false;
    }
    if (all_tight || remaining.is_zero()) cut.unreachable_securities.push_back(i);
  }
  std::sort(cut.unreachable_securities.begin(), cut.unreachable_securities.end());
  std::sort(cut.unreachable_accounts.begin(), cut.unreachable_accounts.end());
  return cut;
}

struct PhaseEngine {
  PhaseProblem p;
  LambdaQueryBudget& budget;
  std::vector<PhaseRecord> phases;

  PhaseEngine(PhaseProblem problem, LambdaQueryBudget& b) : p(std::move(problem)), budget(b) {}

  Rational exposure(int j) const { return Rational(p.inst->accounts()[j].exposure); }

  struct Located {
    Rational lambda;
    Probe probe;
    ResidualCut cut;
  };

  // Bounded-fraction search for the critical coverage level of the current
  // sub-problem, plus the confirming run at the answer.
  Located locate_lambda() {
    const BigInt bound = p.search_bound();
    budget.bound_n = bound;
    std::map<Rational, bool> cache;
    auto feasible_at = [&](const Rational& lambda) {
      auto it = cache.find(lambda);
      if (it != cache.end()) return it->second;
      budget.count_query();
      bool ok = solve_feasibility(p, lambda).feasible;
      cache.emplace(lambda, ok);
      return ok;
    };

    Rational lambda_star;
    std::optional<Rational> next_larger;
    if (p.mode == BalanceMode::Standard) {
      auto sr = find_min_rational(
          bound, [&](const Rational& x) { return feasible_at(Rational(1) - x); });
      lambda_star = Rational(1) - sr.value;
      if (sr.neighbor) next_larger = Rational(1) - *sr.neighbor;
    } else {
      auto sr = find_max_rational(
          bound, [&](const Rational& y) { return feasible_at(Rational(1) + y); });
      lambda_star = Rational(1) + sr.value;
      if (sr.neighbor) next_larger = Rational(1) + *sr.neighbor;
    }

    // Confirm at lambda* (this run's flow and cut seed the tight sets) and
    // check the recorded answer at the adjacent representable fraction.
    budget.count_query();
    Probe confirm = solve_feasibility(p, lambda_star);
    internal_check(confirm.feasible, "confirming feasibility check failed at lambda = " +
                                         lambda_star.to_fraction_string());
    if (next_larger) {
      auto it = cache.find(*next_larger);
      internal_check(it != cache.end() && !it->second,
                     "adjacent fraction above lambda* was not proven infeasible");
    }
    ResidualCut cut = confirm.built.bounded
                          ? bounded_tight_sets(confirm.built, confirm.flow, p, lambda_star)
                          : residual_unreachable(confirm.built.net, confirm.flow);
    return Located{lambda_star, std::move(confirm), std::move(cut)};
  }

  void lock_edges_into(const std::vector<char>& tight_acct, const std::vector<char>& tight_sec,
                       const Probe& probe) {
    const Instance& inst = *p.inst;
    for (int e = 0; e < inst.edge_count(); ++e) {
      if (!p.edge_on[e] || probe.built.middle_arc[e] < 0) continue;
      const auto& edge = inst.edges()[e];
      const Rational& f = probe.flow.arc_flow[probe.built.middle_arc[e]];
      if (tight_acct[edge.account]) {
        p.locked_flow[e] = f;
        p.edge_on[e] = 0;
        if (p.use_value_pin) p.value_pin -= f;
        if (!tight_sec[edge.security]) p.avail[edge.security] -= f;
      } else if (tight_sec[edge.security]) {
        if (p.acct_pinned[edge.account]) {
          p.locked_flow[e] = f;
          if (p.use_value_pin) p.value_pin -= f;
          p.pinned_req[edge.account] -= f;
          internal_check(!p.pinned_req[edge.account].is_negative(),
                         "pinned requirement went negative");
        } else if (probe.built.bounded && !f.is_zero()) {
          // a retiring security's shipment into a surviving account becomes
          // a commitment; the account settles at its own level later
          p.locked_flow[e] = f;
          p.base_inflow[edge.account] += f;
          if (p.use_value_pin) p.value_pin -= f;
        } else {
          internal_check(f.is_zero(), "tight security sends flow to a surviving account");
        }
        p.edge_on[e] = 0;
      }
    }
  }

  // Live accounts left without supply settle at the coverage their
  // commitments already give them; equal levels join one phase.
  void settle_committed_accounts() {
    std::map<Rational, std::vector<int>> groups;
    for (int j = 0; j < p.inst->account_count(); ++j)
      if (p.acct_live[j]) {
        groups[p.base_inflow[j] / exposure(j)].push_back(j);
        p.acct_live[j] = 0;
      }
    for (auto& [level, accounts] : groups) {
      if (!phases.empty() && phases.back().lambda == level) {
        auto& back = phases.back();
        back.tight_accounts.insert(back.tight_accounts.end(), accounts.begin(), accounts.end());
        std::sort(back.tight_accounts.begin(), back.tight_accounts.end());
      } else {
        record_phase(level, {}, std::move(accounts));
      }
    }
  }

  void record_phase(const Rational& lambda, std::vector<int> tight_securities,
                    std::vector<int> tight_accounts) {
    if (!phases.empty())
      internal_check(phases.back().lambda < lambda,
                     "critical coverage levels must strictly increase");
    PhaseRecord rec;
    rec.index = static_cast<int>(phases.size()) + 1;
    rec.lambda = lambda;
    rec.tight_securities = std::move(tight_securities);
    rec.tight_accounts = std::move(tight_accounts);
    std::sort(rec.tight_securities.begin(), rec.tight_securities.end());
    std::sort(rec.tight_accounts.begin(), rec.tight_accounts.end());
    phases.push_back(std::move(rec));
  }

  // The peeled ratio matches the closed form sum(avail)/sum(exposure) when
  // no claim limits or commitments are in play.
  void cross_check_lambda(const Rational& lambda, const std::vector<int>& tight_securities,
                          const std::vector<int>& tight_accounts) const {
    if (p.inst->has_caps() || p.use_value_pin) return;
    for (int j = 0; j < p.inst->account_count(); ++j)
      if (p.acct_pinned[j] || !p.base_inflow[j].is_zero()) return;
    for (int i = 0; i < p.inst->security_count(); ++i)
      if (p.sec_forced[i]) return;
    Rational value_sum = 0;
    for (int i : tight_securities) value_sum += p.avail[i];
    Rational exposure_sum = 0;
    for (int j : tight_accounts) exposure_sum += exposure(j);
    if (exposure_sum.is_zero()) return;
    internal_check(lambda == value_sum / exposure_sum,
                   "peeled lambda disagrees with the tight-set closed form");
  }

  PhaseRunResult run() {
    const Instance& inst = *p.inst;

    while (p.any_live_securities() && p.any_live_accounts()) {
      budget.begin_phase();
      Located located = locate_lambda();

      if (p.mode == BalanceMode::Standard && located.lambda == Rational(1)) {
        // Everything left is fully covered; one final phase takes it all.
        std::vector<char> tight_acct(inst.account_count(), 0);
        std::vector<char> tight_sec(inst.security_count(), 0);
        std::vector<int> tight_accounts;
        std::vector<int> tight_securities;
        for (int j = 0; j < inst.account_count(); ++j)
          if (p.acct_live[j] || p.acct_pinned[j]) {
            tight_acct[j] = 1;
            tight_accounts.push_back(j);
          }
        for (int i = 0; i < inst.security_count(); ++i)
          if (p.sec_live[i]) {
            tight_sec[i] = 1;
            tight_securities.push_back(i);
          }
        lock_edges_into(tight_acct, tight_sec, located.probe);
        record_phase(located.lambda, std::move(tight_securities), std::move(tight_accounts));
        std::fill(p.acct_live.begin(), p.acct_live.end(), 0);
        std::fill(p.acct_pinned.begin(), p.acct_pinned.end(), 0);
        std::fill(p.sec_live.begin(), p.sec_live.end(), 0);
        break;
      }

      std::vector<char> tight_sec(inst.security_count(), 0);
      std::vector<char> tight_acct(inst.account_count(), 0);
      std::vector<int> tight_securities;
      std::vector<int> tight_accounts;
      for (int i : located.cut.unreachable_securities) {
        tight_sec[i] = 1;
        tight_securities.push_back(i);
      }
      for (int j : located.cut.unreachable_accounts) {
        if (!p.acct_live[j]) continue;  // pinned accounts stay until the end
        if (p.base_inflow[j] > located.lambda * exposure(j))
          continue;  // committed above this level; settles at its own phase
        tight_acct[j] = 1;
        tight_accounts.push_back(j);
        if (located.probe.built.bounded) {
          // a tight account must sit exactly at the critical coverage; a
          // forced overshoot would falsify its recorded ratio
          int arc = located.probe.built.sink_arc[j];
          internal_check(located.probe.flow.arc_flow[arc] == located.probe.built.lower[arc],
                         "tight account absorbs beyond the critical coverage level");
        }
      }
      internal_check(!tight_accounts.empty(),
                     "no account is tight at the critical coverage level");
      cross_check_lambda(located.lambda, tight_securities, tight_accounts);

      lock_edges_into(tight_acct, tight_sec, located.probe);
      for (int i : tight_securities) p.sec_live[i] = 0;
      for (int j : tight_accounts) p.acct_live[j] = 0;
      record_phase(located.lambda, std::move(tight_securities), std::move(tight_accounts));
    }

    // Stragglers have no live supply left; they keep what was committed.
    if (p.any_live_accounts()) {
      internal_check(!p.any_live_securities(), "live accounts and securities both remain");
      settle_committed_accounts();
    }

    // Accounts pinned to full coverage finish in a last lambda = 1 phase.
    bool any_pinned = std::any_of(p.acct_pinned.begin(), p.acct_pinned.end(),
                                  [](char c) { return c != 0; });
    if (any_pinned) {
      budget.begin_phase();
      budget.count_query();
      Probe probe = solve_feasibility(p, Rational(1));
      internal_check(probe.feasible, "pinned accounts cannot be fully covered");
      std::vector<char> tight_acct(inst.account_count(), 0);
      std::vector<char> tight_sec(inst.security_count(), 0);
      std::vector<int> tight_accounts;
      std::vector<int> tight_securities;
      for (int j = 0; j < inst.account_count(); ++j)
        if (p.acct_pinned[j]) {
          tight_acct[j] = 1;
          tight_accounts.push_back(j);
          p.acct_pinned[j] = 0;
        }
      for (int i = 0; i < inst.security_count(); ++i)
        if (p.sec_live[i]) {
          tight_sec[i] = 1;
          tight_securities.push_back(i);
          p.sec_live[i] = 0;
        }
      lock_edges_into(tight_acct, tight_sec, probe);
      if (!phases.empty() && phases.back().lambda == Rational(1)) {
        auto& back = phases.back();
        back.tight_accounts.insert(back.tight_accounts.end(), tight_accounts.begin(),
                                   tight_accounts.end());
        back.tight_securities.insert(back.tight_securities.end(), tight_securities.begin(),
                                     tight_securities.end());
        std::sort(back.tight_accounts.begin(), back.tight_accounts.end());
        std::sort(back.tight_securities.begin(), back.tight_securities.end());
      } else {
        record_phase(Rational(1), std::move(tight_securities), std::move(tight_accounts));
      }
    }

    internal_check(!p.any_live_accounts(), "accounts left unassigned after the phase loop");

    PhaseRunResult result;
    result.phases = std::move(phases);
    result.flow.edge_flow = std::move(p.locked_flow);
    result.flow.over_coverage = p.mode == BalanceMode::OverCoverage;
    return result;
  }
};

}  // namespace

PhaseRunResult run_phase_loop(PhaseProblem problem, LambdaQueryBudget& budget) {
  PhaseEngine engine(std::move(problem), budget);
  return engine.run();
}

}  // namespace detail

FlowNetwork build_p_lambda(const Instance& inst, const Rational& lambda, BalanceMode mode) {
  if (mode == BalanceMode::Standard && (lambda.is_negative() || lambda > Rational(1)))
    fail(ErrorCode::LambdaOutOfRange,
         "lambda " + lambda.to_fraction_string() + " outside [0,1]");
  if (mode == BalanceMode::OverCoverage && lambda < Rational(1))
    fail(ErrorCode::LambdaOutOfRange,
         "lambda " + lambda.to_fraction_string() + " below 1 in over-coverage mode");
  auto problem = detail::PhaseProblem::standard(inst);
  problem.mode = mode;
  return detail::build_network(problem, lambda).net;
}

FeasibilityResult is_feasible(const Instance& inst, const Rational& lambda, BalanceMode mode) {
  if (mode == BalanceMode::Standard && (lambda.is_negative() || lambda > Rational(1)))
    fail(ErrorCode::LambdaOutOfRange,
         "lambda " + lambda.to_fraction_string() + " outside [0,1]");
  if (mode == BalanceMode::OverCoverage && lambda < Rational(1))
    fail(ErrorCode::LambdaOutOfRange,
         "lambda " + lambda.to_fraction_string() + " below 1 in over-coverage mode");
  auto problem = detail::PhaseProblem::standard(inst);
  problem.mode = mode;
  auto probe = detail::solve_feasibility(problem, lambda);
  FeasibilityResult result;
  result.feasible = probe.feasible;
  result.cut = residual_unreachable(probe.built.net, probe.flow);
  result.net = std::move(probe.built.net);
  result.flow = std::move(probe.flow);
  return result;
}

LambdaResult find_lambda(const Instance& inst, BalanceMode mode, LambdaQueryBudget& budget) {
  if (inst.security_count() == 0 || inst.account_count() == 0)
    fail(ErrorCode::InvalidInput, "find_lambda needs at least one security and one account");
  auto problem = detail::PhaseProblem::standard(inst);
  problem.mode = mode;
  detail::PhaseEngine engine(std::move(problem), budget);
  budget.begin_phase();
  auto located = engine.locate_lambda();
  LambdaResult result;
  result.lambda = located.lambda;
  result.cut = std::move(located.cut);
  result.net = std::move(located.probe.built.net);
  result.flow = std::move(located.probe.flow);
  return result;
}

namespace {

BalanceReport finish_report(const Instance& inst, detail::PhaseRunResult run) {
  BalanceReport report;
  report.flow = std::move(run.flow);
  report.phases = std::move(run.phases);
  report.surplus = surplus_vector(inst, report.flow);
  report.risk_ratio = risk_vector(inst, report.flow);
  report.objective = mwsr_objective(inst, report.flow);
  return report;
}

}  // namespace

BalanceReport phase_decompose(const Instance& inst) { return phase_decompose(inst, nullptr); }

BalanceReport phase_decompose(const Instance& inst, LambdaQueryBudget* budget_out) {
  if (inst.has_priorities())
    fail(ErrorCode::InvalidInput,
         "instance carries priorities; use balance_with_priorities");
  LambdaQueryBudget budget;
  auto run = detail::run_phase_loop(detail::PhaseProblem::standard(inst), budget);
  if (budget_out) *budget_out = budget;
  return finish_report(inst, std::move(run));
}

BalanceReport over_coverage_pass(const Instance& inst, BalanceReport report) {
  std::vector<char> fully(inst.account_count(), 0);
  bool any = false;
  for (int j = 0; j < inst.account_count(); ++j)
    if (report.risk_ratio[j].is_zero()) {
      fully[j] = 1;
      any = true;
    }
  if (!any) return report;  // benign: nothing is fully covered

  // Available value for the covered group: residual plus what the base flow
  // already commits into it.
  std::vector<Rational> outside(inst.security_count(), Rational(0));
  for (int e = 0; e < inst.edge_count(); ++e)
    if (!fully[inst.edges()[e].account]) outside[inst.edges()[e].security] += report.flow.edge_flow[e];

  detail::PhaseProblem problem;
  problem.inst = &inst;
  problem.mode = BalanceMode::OverCoverage;
  problem.sec_live.assign(inst.security_count(), 0);
  problem.acct_live = fully;
  problem.acct_pinned.assign(inst.account_count(), 0);
  problem.avail.assign(inst.security_count(), Rational(0));
  problem.pinned_req.assign(inst.account_count(), Rational(0));
  problem.base_inflow.assign(inst.account_count(), Rational(0));
  problem.edge_on.assign(inst.edge_count(), 0);
  problem.locked_flow.assign(inst.edge_count(), Rational(0));
  problem.sec_forced.assign(inst.security_count(), 0);

  std::vector<char> sec_adjacent(inst.security_count(), 0);
  for (int e = 0; e < inst.edge_count(); ++e)
    if (fully[inst.edges()[e].account]) sec_adjacent[inst.edges()[e].security] = 1;
  for (int i = 0; i < inst.security_count(); ++i) {
    Rational avail = Rational(inst.securities()[i].value) - outside[i];
    if (sec_adjacent[i] && !avail.is_zero()) {
      internal_check(!avail.is_negative(), "security outflow exceeds its value");
      problem.sec_live[i] = 1;
      problem.avail[i] = avail;
    }
  }
  for (int e = 0; e < inst.edge_count(); ++e) {
    const auto& edge = inst.edges()[e];
    if (problem.sec_live[edge.security] && fully[edge.account]) problem.edge_on[e] = 1;
  }

  LambdaQueryBudget budget;
  auto run = detail::run_phase_loop(std::move(problem), budget);

  OverCoverageResult oc;
  oc.flow = report.flow;
  oc.flow.over_coverage = true;
  for (int e = 0; e < inst.edge_count(); ++e)
    if (fully[inst.edges()[e].account]) oc.flow.edge_flow[e] = run.flow.edge_flow[e];
  check_flow(inst, oc.flow);
  oc.phases = std::move(run.phases);
  report.over_coverage = std::move(oc);
  return report;
}

}  // namespace colflow
