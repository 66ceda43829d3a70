#include "colflow/flow_network.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "colflow/errors.hpp"

namespace colflow {

FlowNetwork::FlowNetwork() {
  nodes_.push_back({NodeKind::Source, -1});
  nodes_.push_back({NodeKind::Sink, -1});
}

int FlowNetwork::add_node(NodeKind kind, int ref) {
  nodes_.push_back({kind, ref});
  return node_count() - 1;
}

int FlowNetwork::add_arc(int from, int to, std::optional<Rational> cap, BigInt cost) {
  internal_check(from >= 0 && from < node_count() && to >= 0 && to < node_count(),
                 "arc endpoint out of range");
  if (cap && cap->is_negative()) fail(ErrorCode::InvalidInput, "negative arc capacity");
  arcs_.push_back({from, to, std::move(cap), std::move(cost)});
  return arc_count() - 1;
}

namespace {

/// Residual arc store: each network arc becomes a forward/backward pair.
/// Slot 2a is the forward arc (residual = cap - flow, infinite if uncapped),
/// slot 2a+1 the backward arc (residual = flow).
struct Residual {
  const FlowNetwork& net;
  std::vector<Rational> flow;  // by arc
  std::vector<std::vector<int>> adj;  // node -> residual slot ids

  explicit Residual(const FlowNetwork& n, std::vector<Rational> initial)
      : net(n), flow(std::move(initial)), adj(n.node_count()) {
    if (flow.empty()) flow.assign(net.arc_count(), Rational(0));
    internal_check(static_cast<int>(flow.size()) == net.arc_count(),
                   "initial flow length mismatch");
    for (int a = 0; a < net.arc_count(); ++a) {
      adj[net.arcs()[a].from].push_back(2 * a);
      adj[net.arcs()[a].to].push_back(2 * a + 1);
    }
  }

  int head(int slot) const {
    const Arc& a = net.arcs()[slot / 2];
    return (slot % 2 == 0) ? a.to : a.from;
  }

  bool has_residual(int slot) const {
    const Arc& a = net.arcs()[slot / 2];
    if (slot % 2 == 0) return !a.cap || flow[slot / 2] < *a.cap;
    return flow[slot / 2] > Rational(0);
  }

  // Finite residual amount; only valid when has_residual and capped.
  std::optional<Rational> residual_amount(int slot) const {
    const Arc& a = net.arcs()[slot / 2];
    if (slot % 2 == 0) {
      if (!a.cap) return std::nullopt;
      return *a.cap - flow[slot / 2];
    }
    return flow[slot / 2];
  }

  void push(int slot, const Rational& amount) {
    if (slot % 2 == 0)
      flow[slot / 2] += amount;
    else
      flow[slot / 2] -= amount;
  }
};

class Dinic {
 public:
  explicit Dinic(Residual& r) : r_(r), level_(r.net.node_count()), it_(r.net.node_count()) {}

  void run() {
    while (bfs()) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        auto pushed = dfs(r_.net.source(), std::nullopt);
        if (!pushed) break;
      }
    }
  }

 private:
  bool bfs() {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[r_.net.source()] = 0;
    q.push(r_.net.source());
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int slot : r_.adj[u]) {
        int v = r_.head(slot);
        if (level_[v] < 0 && r_.has_residual(slot)) {
          level_[v] = level_[u] + 1;
          q.push(v);
        }
      }
    }
    return level_[r_.net.sink()] >= 0;
  }

  // Sends one augmenting path within the level graph; limit is the running
  // bottleneck (absent = unbounded so far).
  std::optional<Rational> dfs(int u, std::optional<Rational> limit) {
    if (u == r_.net.sink()) {
      internal_check(limit.has_value(), "unbounded augmenting path");
      return limit;
    }
    for (int& i = it_[u]; i < static_cast<int>(r_.adj[u].size()); ++i) {
      int slot = r_.adj[u][i];
      int v = r_.head(slot);
      if (level_[v] != level_[u] + 1 || !r_.has_residual(slot)) continue;
      auto amount = r_.residual_amount(slot);
      std::optional<Rational> next_limit = limit;
      if (amount && (!next_limit || *amount < *next_limit)) next_limit = amount;
      auto pushed = dfs(v, next_limit);
      if (pushed) {
        r_.push(slot, *pushed);
        return pushed;
      }
    }
    level_[u] = -1;
    return std::nullopt;
  }

  Residual& r_;
  std::vector<int> level_;
  std::vector<int> it_;
};

MaxFlowResult collect(const FlowNetwork& net, const Residual& r) {
  MaxFlowResult res;
  res.arc_flow = r.flow;
  res.value = 0;
  for (int a = 0; a < net.arc_count(); ++a)
    if (net.arcs()[a].from == net.source()) res.value += r.flow[a];
  for (int a = 0; a < net.arc_count(); ++a)
    if (net.arcs()[a].to == net.source()) res.value -= r.flow[a];
  return res;
}

}  // namespace

MaxFlowResult max_flow(const FlowNetwork& net) { return max_flow_from(net, {}); }

MaxFlowResult max_flow_from(const FlowNetwork& net, std::vector<Rational> initial) {
  Residual r(net, std::move(initial));
  Dinic dinic(r);
  dinic.run();
  return collect(net, r);
}

ResidualCut residual_unreachable(const FlowNetwork& net, const MaxFlowResult& flow) {
  Residual r(net, flow.arc_flow);
  std::vector<char> reachable(net.node_count(), 0);
  std::queue<int> q;
  reachable[net.source()] = 1;
  q.push(net.source());
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int slot : r.adj[u]) {
      int v = r.head(slot);
      if (!reachable[v] && r.has_residual(slot)) {
        reachable[v] = 1;
        q.push(v);
      }
    }
  }
  if (reachable[net.sink()])
    fail(ErrorCode::NotMaximum, "augmenting path to the sink exists; flow is not maximum");

  ResidualCut cut;
  cut.reachable = std::move(reachable);
  for (int v = 0; v < net.node_count(); ++v) {
    if (cut.reachable[v]) continue;
    if (net.nodes()[v].kind == NodeKind::Security)
      cut.unreachable_securities.push_back(net.nodes()[v].ref);
    else if (net.nodes()[v].kind == NodeKind::Account)
      cut.unreachable_accounts.push_back(net.nodes()[v].ref);
  }
  std::sort(cut.unreachable_securities.begin(), cut.unreachable_securities.end());
  std::sort(cut.unreachable_accounts.begin(), cut.unreachable_accounts.end());
  return cut;
}

namespace {

struct SspState {
  const FlowNetwork& net;
  Residual r;
  std::vector<BigInt> pot;

  explicit SspState(const FlowNetwork& n) : net(n), r(n, {}), pot(n.node_count(), 0) {
    bellman_ford_init();
  }

  // Initial potentials: a dual-feasible labeling of the whole zero-flow
  // residual graph (every node seeded at 0, relaxed to fixpoint). Source
  // reachability is irrelevant here; only c + pot[u] - pot[v] >= 0 on every
  // positive-capacity arc matters for the Dijkstra rounds.
  void bellman_ford_init() {
    bool any = true;
    int rounds = 0;
    while (any) {
      if (++rounds > net.node_count() + 1)
        fail(ErrorCode::Internal, "negative-cost cycle in the flow network");
      any = false;
      for (const Arc& a : net.arcs()) {
        if (a.cap && a.cap->is_zero()) continue;
        BigInt cand = pot[a.from] + a.cost;
        if (cand < pot[a.to]) {
          pot[a.to] = cand;
          any = true;
        }
      }
    }
  }

  BigInt reduced_cost(int slot) const {
    const Arc& a = net.arcs()[slot / 2];
    BigInt c = (slot % 2 == 0) ? a.cost : -a.cost;
    int u = (slot % 2 == 0) ? a.from : a.to;
    int v = (slot % 2 == 0) ? a.to : a.from;
    return c + pot[u] - pot[v];
  }

  // One Dijkstra round over reduced costs. Returns parent slots and reduced
  // distances; nodes left unreached keep reached[v] == 0.
  void dijkstra(std::vector<BigInt>& dist, std::vector<int>& parent,
                std::vector<char>& reached) {
    int n = net.node_count();
    dist.assign(n, BigInt(0));
    parent.assign(n, -1);
    reached.assign(n, 0);
    std::vector<char> done(n, 0);
    reached[net.source()] = 1;
    for (;;) {
      int best = -1;
      for (int v = 0; v < n; ++v)
        if (reached[v] && !done[v] && (best < 0 || dist[v] < dist[best])) best = v;
      if (best < 0) break;
      done[best] = 1;
      for (int slot : r.adj[best]) {
        if (!r.has_residual(slot)) continue;
        int v = r.head(slot);
        BigInt cand = dist[best] + reduced_cost(slot);
        if (!reached[v] || cand < dist[v]) {
          reached[v] = 1;
          dist[v] = cand;
          parent[v] = slot;
        }
      }
    }
  }

  // Augments along the cheapest path. Returns false when the sink is
  // unreachable, or (profitable_only) the path cost is nonnegative.
  bool augment(bool profitable_only) {
    std::vector<BigInt> dist;
    std::vector<int> parent;
    std::vector<char> reached;
    dijkstra(dist, parent, reached);
    if (!reached[net.sink()]) return false;
    BigInt true_cost = dist[net.sink()] + pot[net.sink()] - pot[net.source()];
    if (profitable_only && true_cost >= 0) return false;

    std::optional<Rational> bottleneck;
    for (int v = net.sink(); v != net.source();) {
      int slot = parent[v];
      auto amount = r.residual_amount(slot);
      if (amount && (!bottleneck || *amount < *bottleneck)) bottleneck = amount;
      v = (slot % 2 == 0) ? net.arcs()[slot / 2].from : net.arcs()[slot / 2].to;
    }
    internal_check(bottleneck.has_value() && !bottleneck->is_zero(),
                   "degenerate augmenting path");
    for (int v = net.sink(); v != net.source();) {
      int slot = parent[v];
      r.push(slot, *bottleneck);
      v = (slot % 2 == 0) ? net.arcs()[slot / 2].from : net.arcs()[slot / 2].to;
    }
    // Keep reduced costs nonnegative for the next round.
    const BigInt& cap_dist = dist[net.sink()];
    for (int v = 0; v < net.node_count(); ++v)
      pot[v] += reached[v] && dist[v] < cap_dist ? dist[v] : cap_dist;
    return true;
  }

  MinCostFlowResult finish() {
    MinCostFlowResult res;
    res.arc_flow = r.flow;
    res.value = 0;
    res.cost = 0;
    for (int a = 0; a < net.arc_count(); ++a) {
      if (net.arcs()[a].from == net.source()) res.value += r.flow[a];
      if (net.arcs()[a].to == net.source()) res.value -= r.flow[a];
      res.cost += r.flow[a] * Rational(net.arcs()[a].cost);
    }
    res.potential = pot;
    return res;
  }
};

}  // namespace

MinCostFlowResult min_cost_max_flow(const FlowNetwork& net) {
  SspState state(net);
  while (state.augment(/*profitable_only=*/false)) {
  }
  return state.finish();
}

MinCostFlowResult min_cost_flow_profitable(const FlowNetwork& net) {
  SspState state(net);
  while (state.augment(/*profitable_only=*/true)) {
  }
  return state.finish();
}

}  // namespace colflow
