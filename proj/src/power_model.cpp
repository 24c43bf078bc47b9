#include "secidx/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "secidx/errors.hpp"

namespace secidx {

namespace {

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> ids, std::size_t limit,
                                       const char* what) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.back() >= limit) {
    throw InputError(std::string(what) + " id " + std::to_string(ids.back()) + " out of range");
  }
  return ids;
}

bool is_connected(std::size_t bus_count, const std::vector<std::vector<LineId>>& incident,
                  const std::vector<Line>& lines) {
  std::vector<char> seen(bus_count, 0);
  std::vector<BusId> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const BusId b = stack.back();
    stack.pop_back();
    for (LineId l : incident[b]) {
      const BusId other = lines[l].from == b ? lines[l].to : lines[l].from;
      if (!seen[other]) {
        seen[other] = 1;
        ++visited;
        stack.push_back(other);
      }
    }
  }
  return visited == bus_count;
}

}  // namespace

PowerNetwork::PowerNetwork(std::size_t bus_count, std::vector<Line> lines)
    : bus_count_(bus_count), lines_(std::move(lines)), incident_(bus_count) {
  if (bus_count_ == 0) throw InputError("network needs at least one bus");
  for (LineId id = 0; id < lines_.size(); ++id) {
    const Line& l = lines_[id];
    if (l.from >= bus_count_ || l.to >= bus_count_) {
      throw InputError("line " + std::to_string(id + 1) + " references a missing bus");
    }
    if (l.from == l.to) throw InputError("line " + std::to_string(id + 1) + " is a self-loop");
    if (!(l.reactance > 0.0) || !std::isfinite(l.reactance)) {
      throw InputError("line " + std::to_string(id + 1) + " has nonpositive reactance");
    }
    incident_[l.from].push_back(id);
    incident_[l.to].push_back(id);
  }
  if (!is_connected(bus_count_, incident_, lines_)) throw InputError("network is not connected");
}

BusId PowerNetwork::other_end(LineId line, BusId bus) const {
  const Line& l = lines_.at(line);
  if (l.from == bus) return l.to;
  if (l.to == bus) return l.from;
  throw InputError("bus " + std::to_string(bus + 1) + " is not an end of line " +
                   std::to_string(line + 1));
}

PowerNetwork PowerNetwork::with_scaled_reactances(double factor) const {
  std::vector<Line> scaled = lines_;
  for (Line& l : scaled) l.reactance *= factor;
  return PowerNetwork(bus_count_, std::move(scaled));
}

std::string_view to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::FlowFrom: return "flow_from";
    case MeasurementKind::FlowTo: return "flow_to";
    case MeasurementKind::Injection: return "injection";
  }
  return "?";
}

MeasurementPlacement::MeasurementPlacement(const PowerNetwork& net, std::vector<LineId> flow_from,
                                           std::vector<LineId> flow_to,
                                           std::vector<BusId> injection)
    : flow_from_(sorted_unique(std::move(flow_from), net.line_count(), "flow_from line")),
      flow_to_(sorted_unique(std::move(flow_to), net.line_count(), "flow_to line")),
      injection_(sorted_unique(std::move(injection), net.bus_count(), "injection bus")) {
  order_.reserve(flow_from_.size() + flow_to_.size() + injection_.size());
  for (LineId l : flow_from_) order_.push_back({MeasurementKind::FlowFrom, l});
  for (LineId l : flow_to_) order_.push_back({MeasurementKind::FlowTo, l});
  for (BusId b : injection_) order_.push_back({MeasurementKind::Injection, b});
}

MeasurementPlacement MeasurementPlacement::full(const PowerNetwork& net) {
  std::vector<LineId> lines(net.line_count());
  std::iota(lines.begin(), lines.end(), LineId{0});
  std::vector<BusId> buses(net.bus_count());
  std::iota(buses.begin(), buses.end(), BusId{0});
  return MeasurementPlacement(net, lines, lines, buses);
}

MeasurementPlacement MeasurementPlacement::empty(const PowerNetwork& net) {
  return MeasurementPlacement(net, {}, {}, {});
}

std::optional<std::size_t> MeasurementPlacement::find(Measurement m) const {
  auto it = std::lower_bound(order_.begin(), order_.end(), m, [](const Measurement& a,
                                                                  const Measurement& b) {
    return std::pair(static_cast<int>(a.kind), a.element) <
           std::pair(static_cast<int>(b.kind), b.element);
  });
  if (it == order_.end() || *it != m) return std::nullopt;
  return static_cast<std::size_t>(it - order_.begin());
}

bool MeasurementPlacement::is_full(const PowerNetwork& net) const {
  return flow_from_.size() == net.line_count() && flow_to_.size() == net.line_count() &&
         injection_.size() == net.bus_count();
}

MeasurementPlacement MeasurementPlacement::with_added(const PowerNetwork& net,
                                                      Measurement m) const {
  auto from = flow_from_;
  auto to = flow_to_;
  auto inj = injection_;
  switch (m.kind) {
    case MeasurementKind::FlowFrom: from.push_back(m.element); break;
    case MeasurementKind::FlowTo: to.push_back(m.element); break;
    case MeasurementKind::Injection: inj.push_back(m.element); break;
  }
  return MeasurementPlacement(net, std::move(from), std::move(to), std::move(inj));
}

ModelMatrix build_h(const PowerNetwork& net, const MeasurementPlacement& meas) {
  ModelMatrix out;
  out.labels = meas.measurements();
  out.h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(meas.size()),
                                static_cast<Eigen::Index>(net.bus_count()));
  for (std::size_t k = 0; k < meas.size(); ++k) {
    const Measurement& m = meas.at(k);
    const auto row = static_cast<Eigen::Index>(k);
    switch (m.kind) {
      case MeasurementKind::FlowFrom:
      case MeasurementKind::FlowTo: {
        const Line& l = net.line(m.element);
        const double sign = m.kind == MeasurementKind::FlowFrom ? 1.0 : -1.0;
        out.h(row, static_cast<Eigen::Index>(l.from)) = sign / l.reactance;
        out.h(row, static_cast<Eigen::Index>(l.to)) = -sign / l.reactance;
        break;
      }
      case MeasurementKind::Injection:
        for (LineId id : net.incident_lines(m.element)) {
          const Line& l = net.line(id);
          const double y = 1.0 / l.reactance;
          const BusId other = l.from == m.element ? l.to : l.from;
          out.h(row, static_cast<Eigen::Index>(m.element)) += y;
          out.h(row, static_cast<Eigen::Index>(other)) -= y;
        }
        break;
    }
  }
  if (out.h.rows() > 0) {
    const double scale = std::max(1.0, out.h.cwiseAbs().maxCoeff() * static_cast<double>(out.h.cols()));
    if (out.h.rowwise().sum().cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvariantError("columns of H do not sum to zero");
    }
  }
  return out;
}

Eigen::Index numeric_rank(const Eigen::MatrixXd& m, double tolerance) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(tolerance);
  return lu.rank();
}

bool is_observable(const ModelMatrix& h) {
  if (h.rows() == 0) throw InputError("observability needs a nonempty measurement matrix");
  const Eigen::Index cols = h.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    Eigen::MatrixXd reduced(h.rows(), cols - 1);
    reduced << h.h.leftCols(j), h.h.rightCols(cols - j - 1);
    if (numeric_rank(reduced) != cols - 1) return false;
  }
  return true;
}

namespace {

Eigen::VectorXd weight_diagonal(const ModelMatrix& h, const Eigen::VectorXd& weights) {
  if (weights.size() == 0) return Eigen::VectorXd::Ones(h.rows());
  if (weights.size() != h.rows()) throw InputError("weight vector length must equal measurement count");
  if ((weights.array() <= 0.0).any()) throw InputError("weights must be positive");
  return weights;
}

Eigen::MatrixXd normal_inverse(const Eigen::MatrixXd& h2, const Eigen::VectorXd& w) {
  const Eigen::Index rank = numeric_rank(h2);
  if (rank != h2.cols()) {
    throw NumericalError("normal equations are singular: reduced H has rank " +
                         std::to_string(rank) + ", need " + std::to_string(h2.cols()));
  }
  const Eigen::MatrixXd gram = h2.transpose() * w.asDiagonal() * h2;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("normal equation factorization failed");
  }
  return ldlt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

}  // namespace

Estimate estimate(const ModelMatrix& h, const Eigen::VectorXd& z, const Eigen::VectorXd& weights) {
  if (z.size() != h.rows()) throw InputError("measurement vector length must equal row count");
  const Eigen::VectorXd w = weight_diagonal(h, weights);
  const Eigen::MatrixXd h2 = h.reduced();
  const Eigen::MatrixXd inv = normal_inverse(h2, w);
  Estimate out;
  out.theta = Eigen::VectorXd::Zero(h.cols());
  out.theta.tail(h.cols() - 1) = inv * (h2.transpose() * w.asDiagonal() * z);
  out.residual = z - h2 * out.theta.tail(h.cols() - 1);
  return out;
}

Eigen::MatrixXd hat_matrix(const ModelMatrix& h, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd w = weight_diagonal(h, weights);
  const Eigen::MatrixXd h2 = h.reduced();
  return h2 * normal_inverse(h2, w) * h2.transpose() * w.asDiagonal();
}

Eigen::VectorXd bdd_residual(const ModelMatrix& h, const Eigen::VectorXd& z) {
  if (z.size() != h.rows()) throw InputError("measurement vector length must equal row count");
  const Eigen::MatrixXd h2 = h.reduced();
  if (h2.cols() == 0 || h2.rows() == 0) return z;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(h2);
  return z - h2 * cod.solve(z);
}

AttackEvaluator::AttackEvaluator(ModelMatrix h) : h_(std::move(h)), reduced_(h_.reduced()) {
  if (reduced_.rows() > 0 && reduced_.cols() > 0) {
    cod_.setThreshold(kRankTolerance);
    cod_.compute(reduced_);
  }
}

AttackVector AttackEvaluator::operator()(const Eigen::VectorXd& delta_theta) const {
  if (delta_theta.size() != h_.cols()) throw InputError("angle vector length must equal bus count");
  AttackVector out;
  out.delta_theta = delta_theta;
  out.delta_z = h_.h * delta_theta;
  for (Eigen::Index k = 0; k < out.delta_z.size(); ++k) {
    if (std::abs(out.delta_z(k)) > kZeroTolerance) out.support.push_back(static_cast<std::size_t>(k));
  }
  Eigen::VectorXd residual = out.delta_z;
  if (reduced_.rows() > 0 && reduced_.cols() > 0) residual -= reduced_ * cod_.solve(out.delta_z);
  out.residual_norm = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
  if (out.residual_norm > kResidualTolerance) {
    throw InvariantError("attack residual " + std::to_string(out.residual_norm) +
                         " exceeds tolerance; attack is detectable");
  }
  return out;
}

AttackVector attack_vector(const ModelMatrix& h, const Eigen::VectorXd& delta_theta) {
  return AttackEvaluator(h)(delta_theta);
}

AttackVector attack_from_partition(const PowerNetwork& net, const MeasurementPlacement& meas,
                                   const std::vector<char>& delta_theta) {
  if (delta_theta.size() != net.bus_count()) throw InputError("partition size must equal bus count");
  Eigen::VectorXd angles(static_cast<Eigen::Index>(net.bus_count()));
  for (std::size_t b = 0; b < net.bus_count(); ++b) angles(static_cast<Eigen::Index>(b)) = delta_theta[b] ? 1.0 : 0.0;
  return attack_vector(build_h(net, meas), angles);
}

SatGadget build_3sat_gadget(const std::vector<Clause>& clauses, std::size_t n_vars) {
  if (n_vars == 0) throw InputError("gadget needs at least one variable");
  for (std::size_t j = 0; j < clauses.size(); ++j) {
    for (std::size_t var : clauses[j]) {
      if (var < 1 || var > n_vars) {
        throw InputError("clause " + std::to_string(j + 1) + " references variable " +
                         std::to_string(var) + " outside 1.." + std::to_string(n_vars));
      }
    }
  }

  const std::size_t m = clauses.size();
  const BusId one = 0, zero = 1;
  const BusId two_thirds = 2 + n_vars, one_third = 3 + n_vars;
  std::vector<BusId> variable(n_vars), clause(m);
  for (std::size_t i = 0; i < n_vars; ++i) variable[i] = 2 + i;
  for (std::size_t j = 0; j < m; ++j) clause[j] = 4 + n_vars + j;

  std::vector<Line> lines;
  std::vector<LineId> metered;
  auto add = [&](BusId a, BusId b, bool measured) {
    if (measured) metered.push_back(lines.size());
    lines.push_back({a, b, 1.0});
  };
  add(one, zero, true);
  for (std::size_t i = 0; i < n_vars; ++i) {
    add(one, variable[i], true);
    add(zero, variable[i], true);
  }
  add(one, two_thirds, false);
  add(two_thirds, one_third, false);
  add(one_third, zero, false);
  for (std::size_t j = 0; j < m; ++j) add(one_third, clause[j], true);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t var : clauses[j]) add(clause[j], variable[var - 1], false);
  }

  std::vector<BusId> injections{two_thirds, one_third};
  injections.insert(injections.end(), clause.begin(), clause.end());

  PowerNetwork net(4 + n_vars + m, std::move(lines));
  MeasurementPlacement meas(net, metered, {}, injections);
  const std::size_t target = *meas.find({MeasurementKind::FlowFrom, 0});
  return SatGadget{std::move(net), std::move(meas), target, n_vars, m, one, zero,
                   two_thirds, one_third, std::move(variable), std::move(clause)};
}

Eigen::VectorXd gadget_assignment_angles(const SatGadget& gadget,
                                         const std::vector<char>& assignment) {
  if (assignment.size() != gadget.n_vars) throw InputError("assignment length must equal n_vars");
  Eigen::VectorXd angles = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gadget.net.bus_count()));
  auto at = [&](BusId b) -> double& { return angles(static_cast<Eigen::Index>(b)); };
  at(gadget.one) = 1.0;
  at(gadget.zero) = 0.0;
  at(gadget.two_thirds) = 2.0 / 3.0;
  at(gadget.one_third) = 1.0 / 3.0;
  for (BusId c : gadget.clause) at(c) = 1.0 / 3.0;
  for (std::size_t i = 0; i < gadget.n_vars; ++i) at(gadget.variable[i]) = assignment[i] ? 1.0 : 0.0;
  return angles;
}

}  // namespace secidx
