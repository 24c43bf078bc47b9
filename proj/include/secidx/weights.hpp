#pragma once

#include <vector>

#include "secidx/power_model.hpp"
#include "secidx/rational.hpp"

namespace secidx {

/// Attack cost per line (both flow meters together) and per bus (injection).
struct WeightAssignment {
  std::vector<Rational> line_costs;
  std::vector<Rational> bus_costs;

  /// Meter counts: line cost = number of metered flow ends (0, 1 or 2), bus
  /// cost = 1 if the injection is metered. With these weights the weighted
  /// objective is the cardinality of the attack.
  static WeightAssignment from_placement(const PowerNetwork& net, const MeasurementPlacement& meas);

  void validate(const PowerNetwork& net) const;

  friend bool operator==(const WeightAssignment&, const WeightAssignment&) = default;
};

/// Weighted attack cost of an angle perturbation: sum of line costs over
/// lines with nonzero flow plus bus costs over buses with nonzero injection.
Rational weighted_attack_cost(const PowerNetwork& net, const WeightAssignment& weights,
                              const Eigen::VectorXd& delta_theta);

}  // namespace secidx
