#include "secidx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "secidx/errors.hpp"

namespace secidx {

namespace {

// Removes the span of Q's orthonormal columns from v (two Gram-Schmidt passes).
Eigen::VectorXd project_out(const Eigen::MatrixXd& q, Eigen::VectorXd v) {
  if (q.cols() == 0) return v;
  v -= q * (q.transpose() * v);
  v -= q * (q.transpose() * v);
  return v;
}

bool in_span(const Eigen::MatrixXd& q, const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (norm == 0.0) return true;
  return project_out(q, v).norm() <= kSpanTolerance * norm;
}

Eigen::MatrixXd append_direction(const Eigen::MatrixXd& q, const Eigen::VectorXd& v) {
  Eigen::VectorXd residual = project_out(q, v);
  Eigen::MatrixXd out(v.size(), q.cols() + 1);
  out << q, residual / residual.norm();
  return out;
}

class SupportSearch {
 public:
  SupportSearch(const Eigen::MatrixXd& rows, std::span<const Rational> weights,
                const std::vector<Eigen::VectorXd>& nonzero)
      : rows_(rows), weights_(weights), nonzero_(nonzero) {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      if (weights_[static_cast<std::size_t>(r)] > 0) active_.push_back(static_cast<std::size_t>(r));
    }
  }

  void run() {
    const Eigen::MatrixXd empty(rows_.cols(), 0);
    for (const auto& v : nonzero_) {
      if (in_span(empty, v)) return;  // a zero constraint vector is never satisfiable
    }
    descend(0, empty, Rational(0));
  }

  const std::optional<Rational>& best_cost() const { return best_cost_; }
  const std::vector<std::size_t>& best_support() const { return best_support_; }
  const std::vector<std::size_t>& best_zero() const { return best_zero_; }
  std::size_t nodes() const { return nodes_; }

 private:
  Eigen::VectorXd row(std::size_t r) const { return rows_.row(static_cast<Eigen::Index>(r)).transpose(); }

  void descend(std::size_t pos, const Eigen::MatrixXd& q, const Rational& cost) {
    ++nodes_;
    while (pos < active_.size() && in_span(q, row(active_[pos]))) ++pos;
    if (pos == active_.size()) {
      record_leaf(cost);
      return;
    }
    const std::size_t r = active_[pos];

    const Eigen::MatrixXd widened = append_direction(q, row(r));
    const bool keeps_constraints = std::none_of(
        nonzero_.begin(), nonzero_.end(), [&](const Eigen::VectorXd& v) { return in_span(widened, v); });
    // A paid row falling into span(Z) makes this branch strictly worse than
    // the one that zeroed that row.
    const bool keeps_support_closed = std::none_of(
        support_.begin(), support_.end(), [&](std::size_t s) { return in_span(widened, row(s)); });
    if (keeps_constraints && keeps_support_closed) {
      zero_.push_back(r);
      descend(pos + 1, widened, cost);
      zero_.pop_back();
    }

    const Rational paid = cost + weights_[r];
    support_.push_back(r);
    if (!dominated(paid)) descend(pos + 1, q, paid);
    support_.pop_back();
  }

  // True when no completion of the current branch can beat the incumbent.
  // Supports grow in ascending row order, so a prefix that already compares
  // greater than the incumbent stays greater.
  bool dominated(const Rational& cost) const {
    if (!best_cost_) return false;
    if (cost != *best_cost_) return cost > *best_cost_;
    const std::size_t common = std::min(support_.size(), best_support_.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (support_[i] != best_support_[i]) return support_[i] > best_support_[i];
    }
    return support_.size() > best_support_.size();
  }

  void record_leaf(const Rational& cost) {
    if (best_cost_ && (cost > *best_cost_ || (cost == *best_cost_ && support_ >= best_support_))) {
      return;
    }
    best_cost_ = cost;
    best_support_ = support_;
    best_zero_ = zero_;
  }

  const Eigen::MatrixXd& rows_;
  std::span<const Rational> weights_;
  const std::vector<Eigen::VectorXd>& nonzero_;
  std::vector<std::size_t> active_;

  std::vector<std::size_t> support_;
  std::vector<std::size_t> zero_;
  std::optional<Rational> best_cost_;
  std::vector<std::size_t> best_support_;
  std::vector<std::size_t> best_zero_;
  std::size_t nodes_ = 0;
};

// A generic point of null(rows[zero]) scaled so the first constraint is 1.
Eigen::VectorXd generic_witness(const Eigen::MatrixXd& rows, std::span<const Rational> weights,
                                const std::vector<std::size_t>& zero,
                                const std::vector<std::size_t>& support,
                                const std::vector<Eigen::VectorXd>& nonzero) {
  Eigen::MatrixXd q(rows.cols(), 0);
  for (std::size_t r : zero) q = append_direction(q, rows.row(static_cast<Eigen::Index>(r)).transpose());

  std::mt19937_64 rng(0x5ec1d);
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::VectorXd x(rows.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
    x = project_out(q, x);
    const double lead = nonzero.front().dot(x);
    if (std::abs(lead) < 1e-6) continue;
    x /= lead;

    const Eigen::VectorXd values = rows * x;
    bool ok = std::all_of(nonzero.begin(), nonzero.end(),
                          [&](const Eigen::VectorXd& v) { return std::abs(v.dot(x)) > kZeroTolerance; });
    for (Eigen::Index r = 0; ok && r < values.size(); ++r) {
      if (!(weights[static_cast<std::size_t>(r)] > 0)) continue;
      const bool expected = std::binary_search(support.begin(), support.end(), static_cast<std::size_t>(r));
      ok = expected == (std::abs(values(r)) > kZeroTolerance);
    }
    if (ok) return x;
  }
  throw NumericalError("could not realize a witness for the optimal support");
}

}  // namespace

OracleResult oracle_min_support(const Eigen::MatrixXd& rows, std::span<const Rational> weights,
                                const std::vector<Eigen::VectorXd>& nonzero) {
  if (rows.rows() > static_cast<Eigen::Index>(kOracleMaxRows)) {
    throw InputError("oracle limited to " + std::to_string(kOracleMaxRows) + " rows, got " +
                     std::to_string(rows.rows()));
  }
  if (weights.size() != static_cast<std::size_t>(rows.rows())) {
    throw InputError("one weight per row required");
  }
  if (nonzero.empty()) throw InputError("oracle needs at least one nonzero constraint");
  for (const auto& v : nonzero) {
    if (v.size() != rows.cols()) throw InputError("constraint vector has wrong dimension");
  }
  for (const Rational& w : weights) {
    if (w < 0) throw InputError("oracle weights must be nonnegative");
  }

  SupportSearch search(rows, weights, nonzero);
  search.run();

  OracleResult result;
  result.search_nodes = search.nodes();
  if (!search.best_cost()) return result;

  result.witness = generic_witness(rows, weights, search.best_zero(), search.best_support(), nonzero);
  const Eigen::VectorXd values = rows * result.witness;
  Rational realized = 0;
  for (Eigen::Index r = 0; r < values.size(); ++r) {
    if (std::abs(values(r)) > kZeroTolerance) {
      result.verified_support.push_back(static_cast<std::size_t>(r));
      realized += weights[static_cast<std::size_t>(r)];
    }
  }
  if (realized != *search.best_cost()) {
    throw InvariantError("oracle witness cost " + to_string(realized) + " differs from optimum " +
                         to_string(*search.best_cost()));
  }
  result.optimum = realized;
  return result;
}

OracleResult oracle_continuous(const ModelMatrix& h, RowConstraint constraint,
                               std::span<const Rational> weights,
                               const std::vector<Eigen::VectorXd>& extra_nonzero) {
  if (constraint.row >= static_cast<std::size_t>(h.rows())) {
    throw InputError("constraint row " + std::to_string(constraint.row) + " out of range");
  }
  std::vector<Rational> unit;
  if (weights.empty()) {
    unit.assign(static_cast<std::size_t>(h.rows()), Rational(1));
    weights = unit;
  }
  std::vector<Eigen::VectorXd> nonzero{h.h.row(static_cast<Eigen::Index>(constraint.row)).transpose()};
  nonzero.insert(nonzero.end(), extra_nonzero.begin(), extra_nonzero.end());
  // The witness is already normalized so that the constraint row equals 1,
  // which covers both relations.
  return oracle_min_support(h.h, weights, nonzero);
}

Eigen::VectorXd incidence_column(const PowerNetwork& net, LineId line) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.bus_count()));
  const Line& l = net.line(line);
  a(static_cast<Eigen::Index>(l.from)) = 1.0;
  a(static_cast<Eigen::Index>(l.to)) = -1.0;
  return a;
}

namespace {

// Rows D A^T (one per line) then A D A^T (one per bus), with matching weights.
Eigen::MatrixXd line_and_bus_rows(const PowerNetwork& net) {
  const auto lines = static_cast<Eigen::Index>(net.line_count());
  const auto buses = static_cast<Eigen::Index>(net.bus_count());
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(lines + buses, buses);
  for (LineId id = 0; id < net.line_count(); ++id) {
    const Line& l = net.line(id);
    const auto from = static_cast<Eigen::Index>(l.from);
    const auto to = static_cast<Eigen::Index>(l.to);
    const double y = 1.0 / l.reactance;
    const auto r = static_cast<Eigen::Index>(id);
    rows(r, from) = y;
    rows(r, to) = -y;
    rows(lines + from, from) += y;
    rows(lines + from, to) -= y;
    rows(lines + to, to) += y;
    rows(lines + to, from) -= y;
  }
  return rows;
}

std::vector<Rational> line_and_bus_weights(const PowerNetwork& net, const WeightAssignment& weights) {
  weights.validate(net);
  std::vector<Rational> out = weights.line_costs;
  out.insert(out.end(), weights.bus_costs.begin(), weights.bus_costs.end());
  return out;
}

}  // namespace

OracleResult oracle_continuous_line(const PowerNetwork& net, const WeightAssignment& weights,
                                    LineId line) {
  if (line >= net.line_count()) throw InputError("line out of range");
  const auto w = line_and_bus_weights(net, weights);
  return oracle_min_support(line_and_bus_rows(net), w, {incidence_column(net, line)});
}

OracleResult oracle_continuous_bus(const PowerNetwork& net, const WeightAssignment& weights,
                                   BusId bus) {
  if (bus >= net.bus_count()) throw InputError("bus out of range");
  const auto w = line_and_bus_weights(net, weights);
  const Eigen::MatrixXd rows = line_and_bus_rows(net);
  const Eigen::VectorXd injection =
      rows.row(static_cast<Eigen::Index>(net.line_count() + bus)).transpose();
  return oracle_min_support(rows, w, {injection});
}

namespace {

template <typename Accept>
OracleResult enumerate_binary(const PowerNetwork& net, const WeightAssignment& weights,
                              BusId fixed_one, std::optional<BusId> fixed_zero, Accept accept) {
  weights.validate(net);
  const std::size_t n = net.bus_count();
  if (n > kBinaryOracleMaxBuses) {
    throw InputError("binary oracle limited to " + std::to_string(kBinaryOracleMaxBuses) + " buses");
  }
  std::vector<BusId> free;
  for (BusId b = 0; b < n; ++b) {
    if (b != fixed_one && (!fixed_zero || b != *fixed_zero)) free.push_back(b);
  }

  OracleResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  x(static_cast<Eigen::Index>(fixed_one)) = 1.0;
  const std::uint64_t combos = std::uint64_t{1} << free.size();
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    for (std::size_t i = 0; i < free.size(); ++i) {
      x(static_cast<Eigen::Index>(free[i])) = static_cast<double>((mask >> i) & 1);
    }
    ++result.search_nodes;
    if (!accept(x)) continue;
    const Rational cost = weighted_attack_cost(net, weights, x);
    if (!result.optimum || cost < *result.optimum) {
      result.optimum = cost;
      result.witness = x;
    }
  }
  if (result.optimum) {
    const Eigen::VectorXd values = line_and_bus_rows(net) * result.witness;
    for (Eigen::Index r = 0; r < values.size(); ++r) {
      if (std::abs(values(r)) > kZeroTolerance) result.verified_support.push_back(static_cast<std::size_t>(r));
    }
  }
  return result;
}

}  // namespace

OracleResult oracle_binary(const PowerNetwork& net, const WeightAssignment& weights, LineId line) {
  if (line >= net.line_count()) throw InputError("line out of range");
  const Line& l = net.line(line);
  // Complementing every entry leaves all supports unchanged, so fixing the
  // from end at 1 loses nothing.
  return enumerate_binary(net, weights, l.from, l.to, [](const Eigen::VectorXd&) { return true; });
}

OracleResult oracle_binary_bus(const PowerNetwork& net, const WeightAssignment& weights, BusId bus) {
  if (bus >= net.bus_count()) throw InputError("bus out of range");
  return enumerate_binary(net, weights, bus, std::nullopt, [&](const Eigen::VectorXd& x) {
    double injection = 0.0;
    for (LineId id : net.incident_lines(bus)) {
      const Line& l = net.line(id);
      const double diff = x(static_cast<Eigen::Index>(l.from)) - x(static_cast<Eigen::Index>(l.to));
      injection += (l.from == bus ? diff : -diff) / l.reactance;
    }
    return std::abs(injection) > kZeroTolerance;
  });
}

}  // namespace secidx
