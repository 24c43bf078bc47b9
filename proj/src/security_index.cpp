#include "secidx/security_index.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "secidx/errors.hpp"

namespace secidx {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::IgnoreNodes: return "ignore-nodes";
    case Method::FoldNodes: return "fold-nodes";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "exact") return Method::Exact;
  if (text == "ignore-nodes") return Method::IgnoreNodes;
  if (text == "fold-nodes") return Method::FoldNodes;
  throw InputError("unknown method '" + std::string(text) + "' (exact, ignore-nodes, fold-nodes)");
}

Exactness exactness_condition(const PowerNetwork& net, const MeasurementPlacement& meas,
                              const WeightAssignment& weights) {
  weights.validate(net);
  if (meas.is_full(net) && weights == WeightAssignment::from_placement(net, meas)) {
    return {true, ExactnessClause::FullMeasurement, "full measurement"};
  }
  const bool lines_metered = std::all_of(weights.line_costs.begin(), weights.line_costs.end(),
                                         [](const Rational& c) { return c >= 1; });
  const bool unit_nodes = std::all_of(weights.bus_costs.begin(), weights.bus_costs.end(),
                                      [](const Rational& p) { return p <= 1; });
  if (lines_metered && unit_nodes) {
    return {true, ExactnessClause::EdgesMeteredUnitNodes,
            "every line metered, at most one meter per bus"};
  }
  for (BusId b = 0; b < net.bus_count(); ++b) {
    for (LineId l : net.incident_lines(b)) {
      if (weights.bus_costs[b] > weights.line_costs[l]) {
        return {false, ExactnessClause::None,
                "bus " + std::to_string(b + 1) + " costs more than incident line " +
                    std::to_string(l + 1)};
      }
    }
  }
  return {true, ExactnessClause::NodeCostDominated, "every bus costs at most its incident lines"};
}

Rational theorem2_bound(const PowerNetwork& net, const WeightAssignment& weights) {
  weights.validate(net);
  Rational total = 0;
  for (BusId b = 0; b < net.bus_count(); ++b) {
    Rational worst = 0;
    for (LineId l : net.incident_lines(b)) worst = std::max(worst, weights.bus_costs[b] - weights.line_costs[l]);
    total += worst;
  }
  return total;
}

CostlyCutInstance line_instance(const PowerNetwork& net, const WeightAssignment& weights,
                                LineId line, BusId source_bus) {
  weights.validate(net);
  const BusId sink_bus = net.other_end(line, source_bus);
  std::vector<CostlyEdge> edges;
  edges.reserve(2 * net.line_count());
  for (LineId id = 0; id < net.line_count(); ++id) {
    const Line& l = net.line(id);
    edges.push_back({static_cast<NodeId>(l.from), static_cast<NodeId>(l.to), weights.line_costs[id]});
    edges.push_back({static_cast<NodeId>(l.to), static_cast<NodeId>(l.from), weights.line_costs[id]});
  }
  return CostlyCutInstance(net.bus_count(), std::move(edges), weights.bus_costs,
                           static_cast<NodeId>(source_bus), static_cast<NodeId>(sink_bus));
}

namespace {

// Plain min cut where edge i gets capacity edge_cost(i), then the partition
// is re-priced under the costly-node objective.
template <typename EdgeCost>
CostlyCutSolution plain_cut_baseline(const CostlyCutInstance& instance, EdgeCost edge_cost) {
  std::vector<Rational> costs;
  costs.reserve(instance.edges().size());
  for (std::size_t i = 0; i < instance.edges().size(); ++i) costs.push_back(edge_cost(instance.edges()[i]));
  const std::int64_t scale = common_denominator(costs);
  std::vector<Edge> edges;
  edges.reserve(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const CostlyEdge& e = instance.edges()[i];
    edges.push_back({e.from, e.to, scale_to_integer(costs[i], scale)});
  }
  const DiGraph graph(instance.node_count(), std::move(edges));
  const CutSolution cut = min_cut(graph, instance.source(), instance.sink());
  std::vector<char> membership(instance.node_count(), 0);
  for (NodeId v : cut.source_side) membership[v] = 1;
  return evaluate_partition(instance, membership);
}

}  // namespace

CostlyCutSolution baseline_ignore_nodes(const CostlyCutInstance& instance) {
  return plain_cut_baseline(instance, [](const CostlyEdge& e) { return e.cost; });
}

CostlyCutSolution baseline_fold_nodes(const CostlyCutInstance& instance) {
  return plain_cut_baseline(instance, [&](const CostlyEdge& e) {
    return e.cost + instance.out_cost(e.from) + instance.in_cost(e.to);
  });
}

CostlyCutSolution solve_with(const CostlyCutInstance& instance, Method method) {
  switch (method) {
    case Method::Exact: return solve(instance);
    case Method::IgnoreNodes: return baseline_ignore_nodes(instance);
    case Method::FoldNodes: return baseline_fold_nodes(instance);
  }
  throw InputError("unknown method");
}

namespace {

// Shared, read-only state for all measurements of one system.
struct IndexContext {
  const PowerNetwork& net;
  const MeasurementPlacement& meas;
  const WeightAssignment& weights;
  AttackEvaluator evaluator;
  Exactness exactness;
  Rational bound;

  IndexContext(const PowerNetwork& n, const MeasurementPlacement& m, const WeightAssignment& w)
      : net(n),
        meas(m),
        weights(w),
        evaluator(build_h(n, m)),
        exactness(exactness_condition(n, m, w)),
        bound(theorem2_bound(n, w)) {}
};

IndexEntry finish_entry(const IndexContext& ctx, std::size_t measurement, Method method,
                        LineId line, const CostlyCutSolution& sol) {
  IndexEntry entry;
  entry.measurement = measurement;
  entry.target = ctx.meas.at(measurement);
  entry.index = sol.objective;
  entry.method = method;
  entry.cut_line = line;
  entry.source_side.assign(ctx.net.bus_count(), 0);
  for (NodeId v : sol.source_side) entry.source_side[static_cast<std::size_t>(v)] = 1;

  Eigen::VectorXd angles(static_cast<Eigen::Index>(ctx.net.bus_count()));
  for (std::size_t b = 0; b < ctx.net.bus_count(); ++b) angles(static_cast<Eigen::Index>(b)) = entry.source_side[b];
  entry.attack = ctx.evaluator(angles);

  if (!std::binary_search(entry.attack.support.begin(), entry.attack.support.end(), measurement)) {
    throw InvariantError("attack for measurement " + std::to_string(measurement + 1) +
                         " does not alter the target");
  }
  const Rational cost = weighted_attack_cost(ctx.net, ctx.weights, angles);
  if (cost != sol.objective) {
    throw InvariantError("attack cost " + to_string(cost) + " differs from cut objective " +
                         to_string(sol.objective));
  }

  entry.exact = method == Method::Exact && ctx.exactness.exact;
  if (entry.exact) {
    entry.error_bound = Rational(0);
  } else if (method == Method::Exact) {
    entry.error_bound = ctx.bound;
  }
  return entry;
}

IndexEntry edge_target(const IndexContext& ctx, LineId line, MeasurementKind end, Method method) {
  if (end == MeasurementKind::Injection) throw InputError("edge target needs a flow measurement");
  if (line >= ctx.net.line_count()) throw InputError("line " + std::to_string(line + 1) + " does not exist");
  const auto measurement = ctx.meas.find({end, line});
  if (!measurement) {
    throw InputError("line " + std::to_string(line + 1) + " has no " + std::string(to_string(end)) +
                     " meter");
  }
  const CostlyCutInstance instance = line_instance(ctx.net, ctx.weights, line, ctx.net.line(line).from);
  return finish_entry(ctx, *measurement, method, line, solve_with(instance, method));
}

IndexEntry node_target(const IndexContext& ctx, BusId bus, Method method) {
  if (bus >= ctx.net.bus_count()) throw InputError("bus " + std::to_string(bus + 1) + " does not exist");
  const auto measurement = ctx.meas.find({MeasurementKind::Injection, bus});
  if (!measurement) throw InputError("bus " + std::to_string(bus + 1) + " has no injection meter");
  const auto& incident = ctx.net.incident_lines(bus);
  if (incident.empty()) throw InputError("bus " + std::to_string(bus + 1) + " has no incident line");

  // A 0/1 partition separating the ends of an incident line always changes
  // the injection at `bus`, so each line subproblem is feasible for the
  // injection target as well.
  std::optional<CostlyCutSolution> best;
  LineId best_line = incident.front();
  for (LineId line : incident) {
    CostlyCutSolution sol = solve_with(line_instance(ctx.net, ctx.weights, line, bus), method);
    if (!best || sol.objective < best->objective) {
      best = std::move(sol);
      best_line = line;
    }
  }
  return finish_entry(ctx, *measurement, method, best_line, *best);
}

IndexEntry measurement_entry(const IndexContext& ctx, std::size_t measurement, Method method) {
  if (measurement >= ctx.meas.size()) {
    throw InputError("measurement " + std::to_string(measurement + 1) + " does not exist");
  }
  const Measurement& m = ctx.meas.at(measurement);
  if (m.kind == MeasurementKind::Injection) return node_target(ctx, m.element, method);
  return edge_target(ctx, m.element, m.kind, method);
}

}  // namespace

IndexEntry index_edge_target(const PowerNetwork& net, const MeasurementPlacement& meas,
                             const WeightAssignment& weights, LineId line, MeasurementKind end,
                             Method method) {
  const IndexContext ctx(net, meas, weights);
  return edge_target(ctx, line, end, method);
}

IndexEntry index_node_target(const PowerNetwork& net, const MeasurementPlacement& meas,
                             const WeightAssignment& weights, BusId bus, Method method) {
  const IndexContext ctx(net, meas, weights);
  return node_target(ctx, bus, method);
}

IndexEntry index_measurement(const PowerNetwork& net, const MeasurementPlacement& meas,
                             const WeightAssignment& weights, std::size_t measurement,
                             Method method) {
  const IndexContext ctx(net, meas, weights);
  return measurement_entry(ctx, measurement, method);
}

IndexReport index_all(const PowerNetwork& net, const MeasurementPlacement& meas,
                      const WeightAssignment& weights, Method method, unsigned threads) {
  IndexReport report;
  if (meas.size() == 0) return report;
  const IndexContext ctx(net, meas, weights);
  report.entries.resize(meas.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, meas.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < meas.size(); k = next++) {
      try {
        report.entries[k] = measurement_entry(ctx, k, method);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = meas.size();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace secidx
