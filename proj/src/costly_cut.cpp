#include "secidx/costly_cut.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

#include "secidx/errors.hpp"

namespace secidx {

namespace {

bool mirrored(const std::vector<CostlyEdge>& edges) {
  std::map<std::tuple<NodeId, NodeId, Rational>, long> balance;
  for (const CostlyEdge& e : edges) {
    ++balance[{e.from, e.to, e.cost}];
    --balance[{e.to, e.from, e.cost}];
  }
  return std::all_of(balance.begin(), balance.end(), [](const auto& kv) { return kv.second == 0; });
}

}  // namespace

CostlyCutInstance::CostlyCutInstance(std::size_t node_count, std::vector<CostlyEdge> edges,
                                     std::vector<Rational> node_costs, NodeId source, NodeId sink)
    : CostlyCutInstance(node_count, std::move(edges), node_costs, node_costs, source, sink, false) {}

CostlyCutInstance CostlyCutInstance::two_sided(std::size_t node_count,
                                               std::vector<CostlyEdge> edges,
                                               std::vector<Rational> out_costs,
                                               std::vector<Rational> in_costs, NodeId source,
                                               NodeId sink) {
  return CostlyCutInstance(node_count, std::move(edges), std::move(out_costs), std::move(in_costs),
                           source, sink, true);
}

CostlyCutInstance::CostlyCutInstance(std::size_t node_count, std::vector<CostlyEdge> edges,
                                     std::vector<Rational> out_costs,
                                     std::vector<Rational> in_costs, NodeId source, NodeId sink,
                                     bool two_sided)
    : edges_(std::move(edges)),
      out_costs_(std::move(out_costs)),
      in_costs_(std::move(in_costs)),
      source_(source),
      sink_(sink),
      two_sided_(two_sided) {
  if (node_count < 2) throw InputError("costly cut instance needs at least two nodes");
  if (out_costs_.size() != node_count || in_costs_.size() != node_count) {
    throw InputError("node cost vector length must equal the node count");
  }
  const auto n = static_cast<NodeId>(node_count);
  auto in_range = [n](NodeId v) { return v >= 0 && v < n; };
  if (!in_range(source_) || !in_range(sink_)) throw InputError("terminal out of range");
  if (source_ == sink_) throw InputError("source and sink must differ");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const CostlyEdge& e = edges_[i];
    if (!in_range(e.from) || !in_range(e.to)) {
      throw InputError("edge " + std::to_string(i) + " references a node out of range");
    }
    if (e.from == e.to) throw InputError("edge " + std::to_string(i) + " is a self-loop");
    if (e.cost < 0) throw InputError("edge " + std::to_string(i) + " has negative cost");
  }
  for (std::size_t v = 0; v < node_count; ++v) {
    if (out_costs_[v] < 0 || in_costs_[v] < 0) {
      throw InputError("node " + std::to_string(v) + " has negative cost");
    }
  }
  symmetric_ = mirrored(edges_);
}

CostlyCutInstance CostlyCutInstance::with_terminals(NodeId source, NodeId sink) const {
  return CostlyCutInstance(node_count(), edges_, out_costs_, in_costs_, source, sink, two_sided_);
}

CostlyCutSolution evaluate_partition(const CostlyCutInstance& instance,
                                     const std::vector<char>& on_source_side) {
  const std::size_t n = instance.node_count();
  if (on_source_side.size() != n) throw InputError("partition size does not match node count");
  if (!on_source_side[instance.source()] || on_source_side[instance.sink()]) {
    throw InputError("partition must place the source on the source side and the sink opposite");
  }

  CostlyCutSolution sol;
  std::vector<char> tail_charged(n, 0), head_charged(n, 0);
  for (std::size_t i = 0; i < instance.edges().size(); ++i) {
    const CostlyEdge& e = instance.edges()[i];
    if (on_source_side[e.from] && !on_source_side[e.to]) {
      sol.cut_edges.push_back(i);
      sol.objective += e.cost;
      tail_charged[e.from] = 1;
      head_charged[e.to] = 1;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    const auto id = static_cast<NodeId>(v);
    (on_source_side[v] ? sol.source_side : sol.sink_side).push_back(id);
    // A source-side node can only be a tail, a sink-side node only a head.
    if (tail_charged[v]) {
      sol.objective += instance.out_cost(id);
      sol.charged_nodes.push_back(id);
    } else if (head_charged[v]) {
      sol.objective += instance.in_cost(id);
      sol.charged_nodes.push_back(id);
    }
  }
  return sol;
}

AuxiliaryGraph build_auxiliary(const CostlyCutInstance& instance) {
  const std::size_t n = instance.node_count();
  std::vector<Rational> all_costs;
  all_costs.reserve(instance.edges().size() + 2 * n);
  for (const CostlyEdge& e : instance.edges()) all_costs.push_back(e.cost);
  all_costs.insert(all_costs.end(), instance.out_costs().begin(), instance.out_costs().end());
  all_costs.insert(all_costs.end(), instance.in_costs().begin(), instance.in_costs().end());
  const std::int64_t scale = common_denominator(all_costs);

  Capacity max_charge = 0;
  std::vector<Capacity> out_cap(n), in_cap(n);
  for (std::size_t v = 0; v < n; ++v) {
    out_cap[v] = scale_to_integer(instance.out_costs()[v], scale);
    in_cap[v] = scale_to_integer(instance.in_costs()[v], scale);
    max_charge = std::max({max_charge, out_cap[v], in_cap[v]});
  }
  const Capacity guard = checked_add(max_charge, 1);

  const auto nn = static_cast<NodeId>(n);
  std::vector<NodeId> v_node(n), w_node(n), z_node(n);
  for (NodeId i = 0; i < nn; ++i) {
    v_node[i] = i;
    w_node[i] = nn + i;
    z_node[i] = 2 * nn + i;
  }

  std::vector<Edge> edges;
  std::vector<AuxEdgeKind> kinds;
  edges.reserve(2 * n + 3 * instance.edges().size());
  for (NodeId i = 0; i < nn; ++i) {
    edges.push_back({w_node[i], v_node[i], in_cap[i]});
    kinds.push_back(AuxEdgeKind::InCharge);
    edges.push_back({v_node[i], z_node[i], out_cap[i]});
    kinds.push_back(AuxEdgeKind::OutCharge);
  }
  for (const CostlyEdge& e : instance.edges()) {
    edges.push_back({v_node[e.from], v_node[e.to], scale_to_integer(e.cost, scale)});
    kinds.push_back(AuxEdgeKind::Original);
    edges.push_back({v_node[e.from], w_node[e.to], guard});
    kinds.push_back(AuxEdgeKind::ToHeadGuard);
    edges.push_back({z_node[e.from], v_node[e.to], guard});
    kinds.push_back(AuxEdgeKind::FromTailGuard);
  }

  return AuxiliaryGraph{DiGraph(3 * n, std::move(edges)), std::move(kinds), std::move(v_node),
                        std::move(w_node), std::move(z_node), scale, guard};
}

CostlyCutSolution solve(const CostlyCutInstance& instance) {
  const AuxiliaryGraph aux = build_auxiliary(instance);
  const CutSolution cut =
      min_cut(aux.graph, aux.v_node[instance.source()], aux.v_node[instance.sink()]);

  for (EdgeId e : cut.cut_edges) {
    if (aux.kinds[e] == AuxEdgeKind::ToHeadGuard || aux.kinds[e] == AuxEdgeKind::FromTailGuard) {
      throw InvariantError("guard edge " + std::to_string(e) + " appears in the auxiliary min cut");
    }
  }

  std::vector<char> in_aux_source(aux.graph.node_count(), 0);
  for (NodeId v : cut.source_side) in_aux_source[v] = 1;
  std::vector<char> on_source_side(instance.node_count(), 0);
  for (std::size_t i = 0; i < instance.node_count(); ++i) {
    on_source_side[i] = in_aux_source[aux.v_node[i]];
  }

  CostlyCutSolution sol = evaluate_partition(instance, on_source_side);
  if (sol.objective != Rational(cut.value, aux.scale)) {
    throw InvariantError("partition cost " + to_string(sol.objective) +
                         " differs from auxiliary cut value " +
                         to_string(Rational(cut.value, aux.scale)));
  }
  return sol;
}

CostlyCutSolution solve_brute_force(const CostlyCutInstance& instance) {
  const std::size_t n = instance.node_count();
  if (n > kBruteForceMaxNodes) {
    throw InputError("brute force limited to " + std::to_string(kBruteForceMaxNodes) + " nodes");
  }
  std::vector<NodeId> free_nodes;
  for (std::size_t v = 0; v < n; ++v) {
    const auto id = static_cast<NodeId>(v);
    if (id != instance.source() && id != instance.sink()) free_nodes.push_back(id);
  }

  std::vector<char> membership(n, 0);
  membership[instance.source()] = 1;
  std::vector<char> best_membership;
  CostlyCutSolution best;
  const std::uint64_t combos = std::uint64_t{1} << free_nodes.size();
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    for (std::size_t b = 0; b < free_nodes.size(); ++b) membership[free_nodes[b]] = (mask >> b) & 1;
    CostlyCutSolution candidate = evaluate_partition(instance, membership);
    if (best_membership.empty() || candidate.objective < best.objective ||
        (candidate.objective == best.objective && membership < best_membership)) {
      best = std::move(candidate);
      best_membership = membership;
    }
  }
  return best;
}

CostlyCutSolution two_sided_node_costs(std::size_t node_count, std::vector<CostlyEdge> edges,
                                       std::vector<Rational> out_costs,
                                       std::vector<Rational> in_costs, NodeId source,
                                       NodeId sink) {
  return solve(CostlyCutInstance::two_sided(node_count, std::move(edges), std::move(out_costs),
                                            std::move(in_costs), source, sink));
}

void write_auxiliary_text(std::ostream& out, const AuxiliaryGraph& aux) {
  write_graph_text(out, aux.graph);
}

}  // namespace secidx
