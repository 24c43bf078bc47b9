#include "secidx/graph.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>
#include <string>

#include "secidx/errors.hpp"
#include "secidx/rational.hpp"

namespace secidx {

DiGraph::DiGraph(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ == 0) throw InputError("graph must have at least one node");
  if (node_count_ > static_cast<std::size_t>(std::numeric_limits<NodeId>::max())) {
    throw InputError("too many nodes");
  }
  const auto n = static_cast<NodeId>(node_count_);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw InputError("edge " + std::to_string(i) + " references a node outside [0, " +
                       std::to_string(n) + ")");
    }
    if (e.from == e.to) throw InputError("edge " + std::to_string(i) + " is a self-loop");
    if (e.capacity < 0) throw InputError("edge " + std::to_string(i) + " has negative capacity");
    total_capacity_ = checked_add(total_capacity_, e.capacity);
  }
}

namespace {

// Residual network with paired arcs: arc 2e is edge e forward, 2e+1 its
// reverse.
class Dinic {
 public:
  explicit Dinic(const DiGraph& graph)
      : head_(graph.node_count(), -1), level_(graph.node_count()), next_arc_(graph.node_count()) {
    const auto& edges = graph.edges();
    to_.resize(2 * edges.size());
    residual_.resize(2 * edges.size());
    link_.resize(2 * edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      add_arc(2 * e, edges[e].from, edges[e].to, edges[e].capacity);
      add_arc(2 * e + 1, edges[e].to, edges[e].from, 0);
    }
  }

  Capacity max_flow(NodeId source, NodeId sink) {
    Capacity flow = 0;
    while (build_levels(source, sink)) {
      for (std::size_t v = 0; v < head_.size(); ++v) next_arc_[v] = head_[v];
      while (Capacity pushed = augment(source, sink, std::numeric_limits<Capacity>::max())) {
        flow = checked_add(flow, pushed);
      }
    }
    return flow;
  }

  std::vector<char> reachable_from(NodeId source) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<NodeId> stack{source};
    seen[source] = 1;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (std::ptrdiff_t a = head_[v]; a >= 0; a = link_[a]) {
        if (residual_[a] > 0 && !seen[to_[a]]) {
          seen[to_[a]] = 1;
          stack.push_back(to_[a]);
        }
      }
    }
    return seen;
  }

 private:
  void add_arc(std::size_t arc, NodeId from, NodeId to, Capacity cap) {
    to_[arc] = to;
    residual_[arc] = cap;
    link_[arc] = head_[from];
    head_[from] = static_cast<std::ptrdiff_t>(arc);
  }

  bool build_levels(NodeId source, NodeId sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<NodeId> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop();
      for (std::ptrdiff_t a = head_[v]; a >= 0; a = link_[a]) {
        if (residual_[a] > 0 && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[v] + 1;
          queue.push(to_[a]);
        }
      }
    }
    return level_[sink] >= 0;
  }

  Capacity augment(NodeId v, NodeId sink, Capacity limit) {
    if (v == sink) return limit;
    for (std::ptrdiff_t& a = next_arc_[v]; a >= 0; a = link_[a]) {
      const NodeId w = to_[a];
      if (residual_[a] <= 0 || level_[w] != level_[v] + 1) continue;
      if (Capacity pushed = augment(w, sink, std::min(limit, residual_[a]))) {
        residual_[a] -= pushed;
        residual_[a ^ 1] += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::ptrdiff_t> head_;
  std::vector<NodeId> to_;
  std::vector<Capacity> residual_;
  std::vector<std::ptrdiff_t> link_;
  std::vector<int> level_;
  std::vector<std::ptrdiff_t> next_arc_;
};

void check_node(const DiGraph& graph, NodeId v, const char* what) {
  if (v < 0 || static_cast<std::size_t>(v) >= graph.node_count()) {
    throw InputError(std::string(what) + " node " + std::to_string(v) + " is out of range");
  }
}

}  // namespace

CutSolution min_cut(const DiGraph& graph, NodeId source, NodeId sink) {
  check_node(graph, source, "source");
  check_node(graph, sink, "sink");
  if (source == sink) throw InputError("source and sink must differ");

  Dinic solver(graph);
  const Capacity flow = solver.max_flow(source, sink);
  const std::vector<char> on_source_side = solver.reachable_from(source);
  if (on_source_side[sink]) throw InvariantError("sink reachable in residual network after max flow");

  CutSolution cut;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    (on_source_side[v] ? cut.source_side : cut.sink_side).push_back(static_cast<NodeId>(v));
  }
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    if (on_source_side[edge.from] && !on_source_side[edge.to]) {
      cut.cut_edges.push_back(e);
      cut.value += edge.capacity;
    }
  }
  if (cut.value != flow) {
    throw InvariantError("cut value " + std::to_string(cut.value) + " differs from flow value " +
                         std::to_string(flow));
  }
  return cut;
}

Capacity cut_value(const DiGraph& graph, std::span<const NodeId> source_side) {
  std::vector<char> inside(graph.node_count(), 0);
  for (NodeId v : source_side) {
    check_node(graph, v, "source-side");
    inside[v] = 1;
  }
  Capacity total = 0;
  for (const Edge& e : graph.edges()) {
    if (inside[e.from] && !inside[e.to]) total += e.capacity;
  }
  return total;
}

void write_graph_text(std::ostream& out, const DiGraph& graph) {
  out << graph.node_count() << '\n';
  for (const Edge& e : graph.edges()) out << e.from << ' ' << e.to << ' ' << e.capacity << '\n';
}

}  // namespace secidx
