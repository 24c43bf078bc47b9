#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "secidx/power_model.hpp"
#include "secidx/rational.hpp"
#include "secidx/weights.hpp"

// Brute-force reference solvers. They know nothing about cuts: the continuous
// oracle works on the rows of a matrix only, the binary oracle enumerates
// angle vectors and evaluates flows and injections numerically.

namespace secidx {

inline constexpr std::size_t kOracleMaxRows = 40;
inline constexpr std::size_t kBinaryOracleMaxBuses = 22;
inline constexpr double kSpanTolerance = 1e-8;

struct OracleResult {
  std::optional<Rational> optimum;            // nullopt when infeasible
  Eigen::VectorXd witness;                    // angle perturbation attaining optimum
  std::vector<std::size_t> verified_support;  // rows nonzero at the witness
  std::size_t search_nodes = 0;

  bool feasible() const { return optimum.has_value(); }
};

/// Minimizes the total weight of nonzero entries of `rows * x` over real x,
/// subject to `v . x != 0` for every v in `nonzero`.
///
/// Exhaustive branch and bound over zero sets: each row is either forced to
/// zero (joins the zero set Z) or paid for; rows already in span(Z) are zero
/// for free; a branch dies once a constraint vector falls into span(Z). Every
/// achievable support is reachable, so the result is the exact minimum. Ties
/// go to the lexicographically smallest support. Zero-weight rows are free and
/// never constrain. Span tests use kSpanTolerance relative to the row norm.
OracleResult oracle_min_support(const Eigen::MatrixXd& rows, std::span<const Rational> weights,
                                const std::vector<Eigen::VectorXd>& nonzero);

enum class Relation { NonZero, EqualsOne };

struct RowConstraint {
  std::size_t row;
  Relation relation = Relation::EqualsOne;
};

/// Security index by enumeration: minimum weighted support of H dtheta with
/// H(row,:) dtheta != 0 (or == 1; the same for support costs, the witness is
/// scaled to hit 1). `weights` per measurement row; empty means unit weights.
/// `extra_nonzero` adds constraints such as A(:,e)^T dtheta != 0.
/// At most kOracleMaxRows rows.
OracleResult oracle_continuous(const ModelMatrix& h, RowConstraint constraint,
                               std::span<const Rational> weights = {},
                               const std::vector<Eigen::VectorXd>& extra_nonzero = {});

/// Weighted form on the network itself: one row per line (D A^T, cost c) and
/// one per bus (A D A^T, cost p); constraint on the flow of `line`.
OracleResult oracle_continuous_line(const PowerNetwork& net, const WeightAssignment& weights,
                                    LineId line);

/// Same, constraint on the injection at `bus`.
OracleResult oracle_continuous_bus(const PowerNetwork& net, const WeightAssignment& weights,
                                   BusId bus);

/// Exhaustive 0/1 angle search with the ends of `line` separated, evaluating
/// c . g(D A^T x) + p . g(A D A^T x) directly. At most kBinaryOracleMaxBuses.
OracleResult oracle_binary(const PowerNetwork& net, const WeightAssignment& weights, LineId line);

/// Exhaustive 0/1 angle search with nonzero injection at `bus`.
OracleResult oracle_binary_bus(const PowerNetwork& net, const WeightAssignment& weights, BusId bus);

/// A(:,line) as a vector over buses.
Eigen::VectorXd incidence_column(const PowerNetwork& net, LineId line);

}  // namespace secidx
