#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "secidx/graph.hpp"
#include "secidx/rational.hpp"

namespace secidx {

struct CostlyEdge {
  NodeId from;
  NodeId to;
  Rational cost;
};

/// Minimum cut with costly nodes: a directed graph with edge costs, per-node
/// charges, a source and a sink.
///
/// A node is charged when it is the tail (on the source side) or the head (on
/// the sink side) of at least one cut edge. The two-sided variant charges a
/// tail `out_cost` and a head `in_cost`; the ordinary problem has both equal.
class CostlyCutInstance {
 public:
  CostlyCutInstance(std::size_t node_count, std::vector<CostlyEdge> edges,
                    std::vector<Rational> node_costs, NodeId source, NodeId sink);

  static CostlyCutInstance two_sided(std::size_t node_count, std::vector<CostlyEdge> edges,
                                     std::vector<Rational> out_costs,
                                     std::vector<Rational> in_costs, NodeId source, NodeId sink);

  std::size_t node_count() const { return out_costs_.size(); }
  const std::vector<CostlyEdge>& edges() const { return edges_; }
  NodeId source() const { return source_; }
  NodeId sink() const { return sink_; }

  // Charge for a node on the tail side of a cut edge.
  const Rational& out_cost(NodeId v) const { return out_costs_.at(v); }
  // Charge for a node on the head side of a cut edge.
  const Rational& in_cost(NodeId v) const { return in_costs_.at(v); }
  const std::vector<Rational>& out_costs() const { return out_costs_; }
  const std::vector<Rational>& in_costs() const { return in_costs_; }

  bool is_two_sided() const { return two_sided_; }
  // Every edge (i, j, c) has a distinct mirror (j, i, c).
  bool is_symmetric() const { return symmetric_; }

  CostlyCutInstance with_terminals(NodeId source, NodeId sink) const;

 private:
  CostlyCutInstance(std::size_t node_count, std::vector<CostlyEdge> edges,
                    std::vector<Rational> out_costs, std::vector<Rational> in_costs,
                    NodeId source, NodeId sink, bool two_sided);

  std::vector<CostlyEdge> edges_;
  std::vector<Rational> out_costs_;
  std::vector<Rational> in_costs_;
  NodeId source_;
  NodeId sink_;
  bool two_sided_;
  bool symmetric_;
};

struct CostlyCutSolution {
  std::vector<NodeId> source_side;   // sorted
  std::vector<NodeId> sink_side;     // sorted
  Rational objective;
  std::vector<std::size_t> cut_edges;  // indices into instance.edges()
  std::vector<NodeId> charged_nodes;   // sorted, each at most once
};

/// Cost of the partition given by `on_source_side` (indexed by node).
CostlyCutSolution evaluate_partition(const CostlyCutInstance& instance,
                                     const std::vector<char>& on_source_side);

enum class AuxEdgeKind { InCharge, OutCharge, Original, ToHeadGuard, FromTailGuard };

/// The standard min-cut graph whose optimum equals the costly-node optimum.
///
/// Node i of the instance becomes three nodes: v(i) = i, w(i) = n + i and
/// z(i) = 2n + i. Edges per node: w(i)->v(i) with the in-charge and
/// v(i)->z(i) with the out-charge. Edges per original edge (i, j):
/// v(i)->v(j) with the edge cost, and guard edges v(i)->w(j), z(i)->v(j)
/// with cost `guard_cost`, which exceeds every node charge.
struct AuxiliaryGraph {
  DiGraph graph;
  std::vector<AuxEdgeKind> kinds;  // parallel to graph.edges()
  std::vector<NodeId> v_node, w_node, z_node;
  std::int64_t scale;      // integer capacities are costs times scale
  Capacity guard_cost;     // largest scaled node charge plus one
};

AuxiliaryGraph build_auxiliary(const CostlyCutInstance& instance);

/// Exact solution through one standard min cut on the auxiliary graph.
/// Instance node i is on the source side iff v(i) is.
CostlyCutSolution solve(const CostlyCutInstance& instance);

/// Exhaustive search over all 2^(n-2) partitions, n <= 22. Among minimizers
/// returns the lexicographically smallest membership vector.
CostlyCutSolution solve_brute_force(const CostlyCutInstance& instance);

inline constexpr std::size_t kBruteForceMaxNodes = 22;

/// Two-sided charges: tail pays `out_costs`, head pays `in_costs`.
CostlyCutSolution two_sided_node_costs(std::size_t node_count, std::vector<CostlyEdge> edges,
                                       std::vector<Rational> out_costs,
                                       std::vector<Rational> in_costs, NodeId source, NodeId sink);

void write_auxiliary_text(std::ostream& out, const AuxiliaryGraph& aux);

}  // namespace secidx
