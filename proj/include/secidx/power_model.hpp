#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace secidx {

using BusId = std::size_t;
using LineId = std::size_t;

inline constexpr double kZeroTolerance = 1e-9;
inline constexpr double kResidualTolerance = 1e-9;
inline constexpr double kRankTolerance = 1e-9;

struct Line {
  BusId from;
  BusId to;
  double reactance;

  friend bool operator==(const Line&, const Line&) = default;
};

/// Buses and transmission lines of a DC power-flow model. Lines are oriented
/// from -> to; the orientation only fixes signs. Must be connected.
class PowerNetwork {
 public:
  PowerNetwork(std::size_t bus_count, std::vector<Line> lines);

  std::size_t bus_count() const { return bus_count_; }
  std::size_t line_count() const { return lines_.size(); }
  const std::vector<Line>& lines() const { return lines_; }
  const Line& line(LineId id) const { return lines_.at(id); }
  // Incident line ids of a bus, ascending.
  const std::vector<LineId>& incident_lines(BusId bus) const { return incident_.at(bus); }
  BusId other_end(LineId line, BusId bus) const;

  PowerNetwork with_scaled_reactances(double factor) const;

  friend bool operator==(const PowerNetwork& a, const PowerNetwork& b) {
    return a.bus_count_ == b.bus_count_ && a.lines_ == b.lines_;
  }

 private:
  std::size_t bus_count_;
  std::vector<Line> lines_;
  std::vector<std::vector<LineId>> incident_;
};

enum class MeasurementKind { FlowFrom, FlowTo, Injection };

std::string_view to_string(MeasurementKind kind);

struct Measurement {
  MeasurementKind kind;
  std::size_t element;  // line id for flows, bus id for injections

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Which flows and injections are metered. Also fixes the global measurement
/// order: flow_from by line id, then flow_to by line id, then injections by
/// bus id. A measurement's position in that order is its index everywhere.
class MeasurementPlacement {
 public:
  MeasurementPlacement(const PowerNetwork& net, std::vector<LineId> flow_from,
                       std::vector<LineId> flow_to, std::vector<BusId> injection);

  static MeasurementPlacement full(const PowerNetwork& net);
  static MeasurementPlacement empty(const PowerNetwork& net);

  const std::vector<LineId>& flow_from() const { return flow_from_; }
  const std::vector<LineId>& flow_to() const { return flow_to_; }
  const std::vector<BusId>& injection() const { return injection_; }

  std::size_t size() const { return order_.size(); }
  const std::vector<Measurement>& measurements() const { return order_; }
  const Measurement& at(std::size_t index) const { return order_.at(index); }
  std::optional<std::size_t> find(Measurement m) const;

  bool is_full(const PowerNetwork& net) const;

  // Copy with one more meter; no-op if already present.
  MeasurementPlacement with_added(const PowerNetwork& net, Measurement m) const;

  friend bool operator==(const MeasurementPlacement& a, const MeasurementPlacement& b) {
    return a.order_ == b.order_;
  }

 private:
  std::vector<LineId> flow_from_;
  std::vector<LineId> flow_to_;
  std::vector<BusId> injection_;
  std::vector<Measurement> order_;
};

struct ModelMatrix {
  Eigen::MatrixXd h;                // measurements x buses
  std::vector<Measurement> labels;  // one per row

  Eigen::Index rows() const { return h.rows(); }
  Eigen::Index cols() const { return h.cols(); }
  // H without the reference (first) column.
  Eigen::MatrixXd reduced() const { return h.rightCols(h.cols() - 1); }
};

/// Stacks P1 D A^T, -P2 D A^T and P3 A D A^T in the global order.
ModelMatrix build_h(const PowerNetwork& net, const MeasurementPlacement& meas);

/// Numeric rank; pivots below `tolerance` times the largest pivot count as zero.
Eigen::Index numeric_rank(const Eigen::MatrixXd& m, double tolerance = kRankTolerance);

/// True when deleting any single column leaves rank n (= columns - 1).
bool is_observable(const ModelMatrix& h);

struct Estimate {
  Eigen::VectorXd theta;     // reference entry is zero
  Eigen::VectorXd residual;  // z - H theta
};

/// Weighted least squares with theta(0) = 0. `weights` is the diagonal of W;
/// empty means identity.
Estimate estimate(const ModelMatrix& h, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& weights = {});

/// K = H2 (H2^T W H2)^-1 H2^T W with H2 the reduced matrix.
Eigen::MatrixXd hat_matrix(const ModelMatrix& h, const Eigen::VectorXd& weights = {});

/// Residual of least-squares fit of `z` onto the column space of H (W = I).
/// Works for rank-deficient H as well.
Eigen::VectorXd bdd_residual(const ModelMatrix& h, const Eigen::VectorXd& z);

struct AttackVector {
  Eigen::VectorXd delta_theta;
  Eigen::VectorXd delta_z;
  std::vector<std::size_t> support;  // measurement indices, ascending
  double residual_norm = 0.0;        // infinity norm of the BDD residual
};

/// delta_z = H delta_theta together with its support and BDD residual.
/// Throws InvariantError if the residual exceeds kResidualTolerance.
AttackVector attack_vector(const ModelMatrix& h, const Eigen::VectorXd& delta_theta);

/// attack_vector with the least-squares factorization of H computed once, for
/// evaluating many attacks against the same measurement system.
class AttackEvaluator {
 public:
  explicit AttackEvaluator(ModelMatrix h);

  AttackVector operator()(const Eigen::VectorXd& delta_theta) const;
  const ModelMatrix& model() const { return h_; }

 private:
  ModelMatrix h_;
  Eigen::MatrixXd reduced_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
};

/// Attack from a 0/1 assignment of buses, i.e. a partition.
AttackVector attack_from_partition(const PowerNetwork& net, const MeasurementPlacement& meas,
                                   const std::vector<char>& delta_theta);

using Clause = std::array<std::size_t, 3>;  // 1-based variable indices

/// Network built from a positive one-in-three 3SAT instance. Its target
/// measurement has minimum attack cardinality n_vars + 1 iff the instance is
/// satisfiable.
struct SatGadget {
  PowerNetwork net;
  MeasurementPlacement meas;
  std::size_t target;  // measurement index of the (1, 0) flow

  std::size_t n_vars;
  std::size_t n_clauses;
  // Bus ids of the construction's named nodes.
  BusId one;
  BusId zero;
  BusId two_thirds;
  BusId one_third;
  std::vector<BusId> variable;  // per variable, 0-based
  std::vector<BusId> clause;    // per clause
};

SatGadget build_3sat_gadget(const std::vector<Clause>& clauses, std::size_t n_vars);

/// Reference angles for a satisfying assignment: x_i, 1/3 at clause nodes and
/// the 1/3 node, 2/3 at the 2/3 node, 1 and 0 at the anchors.
Eigen::VectorXd gadget_assignment_angles(const SatGadget& gadget,
                                         const std::vector<char>& assignment);

}  // namespace secidx
