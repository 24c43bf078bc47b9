#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace secidx {

using NodeId = std::int32_t;
using EdgeId = std::size_t;
using Capacity = std::int64_t;

struct Edge {
  NodeId from;
  NodeId to;
  Capacity capacity;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed multigraph with nonnegative integer capacities.
///
/// Immutable once built. Construction rejects out-of-range ids, self-loops,
/// negative capacities, and graphs whose total capacity overflows 64 bits, so
/// any flow value computed on it is representable.
class DiGraph {
 public:
  DiGraph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_.at(id); }
  Capacity total_capacity() const { return total_capacity_; }

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  Capacity total_capacity_ = 0;
};

struct CutSolution {
  std::vector<NodeId> source_side;  // sorted
  std::vector<NodeId> sink_side;    // sorted
  Capacity value = 0;
  std::vector<EdgeId> cut_edges;    // ascending edge index
};

/// Minimum s-t cut via Dinic's max-flow.
///
/// The source side is the set of nodes reachable from `source` in the
/// residual network of the maximum flow, i.e. the unique inclusion-minimal
/// minimum cut. Every optimal flow yields this same set, so the result does
/// not depend on augmentation order.
CutSolution min_cut(const DiGraph& graph, NodeId source, NodeId sink);

/// Total capacity of edges leaving `source_side`.
Capacity cut_value(const DiGraph& graph, std::span<const NodeId> source_side);

/// Line-oriented dump: node count, then one "from to capacity" line per edge
/// (0-based ids).
void write_graph_text(std::ostream& out, const DiGraph& graph);

}  // namespace secidx
