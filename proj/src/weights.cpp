#include "secidx/weights.hpp"

#include <cmath>
#include <string>

#include "secidx/errors.hpp"

namespace secidx {

WeightAssignment WeightAssignment::from_placement(const PowerNetwork& net,
                                                  const MeasurementPlacement& meas) {
  WeightAssignment w;
  w.line_costs.assign(net.line_count(), Rational(0));
  w.bus_costs.assign(net.bus_count(), Rational(0));
  for (LineId l : meas.flow_from()) w.line_costs[l] += 1;
  for (LineId l : meas.flow_to()) w.line_costs[l] += 1;
  for (BusId b : meas.injection()) w.bus_costs[b] = 1;
  return w;
}

void WeightAssignment::validate(const PowerNetwork& net) const {
  if (line_costs.size() != net.line_count() || bus_costs.size() != net.bus_count()) {
    throw InputError("weight assignment does not match network dimensions");
  }
  for (std::size_t i = 0; i < line_costs.size(); ++i) {
    if (line_costs[i] < 0) throw InputError("line " + std::to_string(i + 1) + " has negative cost");
  }
  for (std::size_t i = 0; i < bus_costs.size(); ++i) {
    if (bus_costs[i] < 0) throw InputError("bus " + std::to_string(i + 1) + " has negative cost");
  }
}

Rational weighted_attack_cost(const PowerNetwork& net, const WeightAssignment& weights,
                              const Eigen::VectorXd& delta_theta) {
  if (delta_theta.size() != static_cast<Eigen::Index>(net.bus_count())) {
    throw InputError("angle vector length must equal bus count");
  }
  Eigen::VectorXd injection = Eigen::VectorXd::Zero(delta_theta.size());
  Rational cost = 0;
  for (LineId id = 0; id < net.line_count(); ++id) {
    const Line& l = net.line(id);
    const auto from = static_cast<Eigen::Index>(l.from);
    const auto to = static_cast<Eigen::Index>(l.to);
    const double flow = (delta_theta(from) - delta_theta(to)) / l.reactance;
    injection(from) += flow;
    injection(to) -= flow;
    if (std::abs(flow) > kZeroTolerance) cost += weights.line_costs[id];
  }
  for (BusId b = 0; b < net.bus_count(); ++b) {
    if (std::abs(injection(static_cast<Eigen::Index>(b))) > kZeroTolerance) cost += weights.bus_costs[b];
  }
  return cost;
}

}  // namespace secidx
