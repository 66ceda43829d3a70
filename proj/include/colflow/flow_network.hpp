#pragma once

#include <optional>
#include <vector>

#include "colflow/rational.hpp"

namespace colflow {

enum class NodeKind { Source, Sink, Security, Account };

struct NetNode {
  NodeKind kind;
  int ref = -1;  // instance index for Security/Account nodes
};

/// +infinity capacities are represented by an absent cap, never by a large
/// number; residual logic treats them symbolically.
struct Arc {
  int from = -1;
  int to = -1;
  std::optional<Rational> cap;
  BigInt cost = 0;
};

/// Auxiliary s-t network over the bipartite instance: source, sink, one node
/// per security and account. Node 0 is the source, node 1 the sink.
class FlowNetwork {
 public:
  FlowNetwork();

  int add_node(NodeKind kind, int ref);
  int add_arc(int from, int to, std::optional<Rational> cap, BigInt cost = 0);

  int source() const { return 0; }
  int sink() const { return 1; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<NetNode>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  std::vector<NetNode> nodes_;
  std::vector<Arc> arcs_;
};

struct MaxFlowResult {
  Rational value;
  std::vector<Rational> arc_flow;  // aligned with FlowNetwork::arcs()
};

/// Maximum s-t flow by blocking flows (phase style), so the number of
/// augmentations is independent of capacity magnitudes and exact rational
/// capacities cannot cause long augmentation chains.
MaxFlowResult max_flow(const FlowNetwork& net);

/// Continues from a feasible starting flow (conservation assumed) and
/// augments to a maximum flow.
MaxFlowResult max_flow_from(const FlowNetwork& net, std::vector<Rational> initial);

/// Nodes with no residual path from the source at a maximum flow.
struct ResidualCut {
  std::vector<int> unreachable_securities;  // sorted instance indices
  std::vector<int> unreachable_accounts;
  std::vector<char> reachable;  // by node
};

/// Throws Error(NotMaximum) if an augmenting path to the sink exists.
ResidualCut residual_unreachable(const FlowNetwork& net, const MaxFlowResult& flow);

struct MinCostFlowResult {
  Rational value;
  Rational cost;
  std::vector<Rational> arc_flow;
  std::vector<BigInt> potential;  // by node; certifies optimality
};

/// Among maximum flows, one of minimum total cost, by successive shortest
/// paths with potentials. Costs are arbitrary-precision integers; no
/// negative-cost cycle may exist at the zero flow.
MinCostFlowResult min_cost_max_flow(const FlowNetwork& net);

/// Augments only while the cheapest path has strictly negative cost, giving
/// the global (value-free) cost minimum.
MinCostFlowResult min_cost_flow_profitable(const FlowNetwork& net);

}  // namespace colflow
