#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secidx/costly_cut.hpp"
#include "secidx/power_model.hpp"
#include "secidx/rational.hpp"
#include "secidx/weights.hpp"

namespace secidx {

enum class Method {
  Exact,        // costly-node min cut on the auxiliary graph
  IgnoreNodes,  // plain min cut on edge costs, node charges ignored
  FoldNodes,    // plain min cut with node charges folded into edge costs
};

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

enum class ExactnessClause {
  None,
  FullMeasurement,      // every flow end and injection metered, meter-count weights
  EdgesMeteredUnitNodes,  // each line metered at least once, node costs <= 1
  NodeCostDominated,    // p_i <= c_ij for every line incident to bus i
};

struct Exactness {
  bool exact = false;
  ExactnessClause clause = ExactnessClause::None;
  std::string reason;
};

/// Conditions under which the 0/1 restriction loses nothing, so the cut-based
/// index equals the true minimum.
Exactness exactness_condition(const PowerNetwork& net, const MeasurementPlacement& meas,
                              const WeightAssignment& weights);

/// Sum over buses of max(0, max over incident lines of p_i - c_line): an upper
/// bound on how far the 0/1 optimum can exceed the real-valued optimum.
Rational theorem2_bound(const PowerNetwork& net, const WeightAssignment& weights);

struct IndexEntry {
  std::size_t measurement = 0;
  Measurement target{};
  Rational index;
  AttackVector attack;
  bool exact = false;
  std::optional<Rational> error_bound;  // nullopt: no guarantee (baselines)
  Method method = Method::Exact;
  LineId cut_line = 0;  // line whose ends the returned partition separates
  std::vector<char> source_side;  // per bus; delta_theta of the attack
};

struct IndexReport {
  std::vector<IndexEntry> entries;
};

/// Symmetric costly-cut instance on the power graph: both directions of every
/// line carry its cost, buses carry their cost, terminals are the ends of
/// `line` oriented away from `source_bus`.
CostlyCutInstance line_instance(const PowerNetwork& net, const WeightAssignment& weights,
                                LineId line, BusId source_bus);

/// Plain min cut on edge costs; the returned objective is the true costly-node
/// cost of the partition found.
CostlyCutSolution baseline_ignore_nodes(const CostlyCutInstance& instance);

/// Plain min cut with cost c_ij + p_out_i + p_in_j on every edge; objective is
/// the true costly-node cost of the partition found.
CostlyCutSolution baseline_fold_nodes(const CostlyCutInstance& instance);

CostlyCutSolution solve_with(const CostlyCutInstance& instance, Method method);

/// Index of the flow measurement of `line` at the given end.
IndexEntry index_edge_target(const PowerNetwork& net, const MeasurementPlacement& meas,
                             const WeightAssignment& weights, LineId line, MeasurementKind end,
                             Method method = Method::Exact);

/// Index of the injection measurement at `bus`: the cheapest of the line
/// subproblems over its incident lines, smallest line id on ties.
IndexEntry index_node_target(const PowerNetwork& net, const MeasurementPlacement& meas,
                             const WeightAssignment& weights, BusId bus,
                             Method method = Method::Exact);

IndexEntry index_measurement(const PowerNetwork& net, const MeasurementPlacement& meas,
                             const WeightAssignment& weights, std::size_t measurement,
                             Method method = Method::Exact);

/// One entry per measurement, in measurement order. Work is split across
/// `threads` workers (0 = hardware concurrency); the output does not depend
/// on the split.
IndexReport index_all(const PowerNetwork& net, const MeasurementPlacement& meas,
                      const WeightAssignment& weights, Method method = Method::Exact,
                      unsigned threads = 0);

}  // namespace secidx
