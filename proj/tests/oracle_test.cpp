#include <gtest/gtest.h>

#include <random>

#include "secidx/errors.hpp"
#include "secidx/oracle.hpp"
#include "secidx/verify.hpp"
#include "test_support.hpp"

namespace secidx {
namespace {

using test::four_bus_network;
using test::four_bus_placement;

TEST(FourBus, ContinuousOracleReproducesListedIndices) {
  const PowerNetwork net = four_bus_network();
  const ModelMatrix h = build_h(net, four_bus_placement(net));
  for (std::size_t k = 0; k < 5; ++k) {
    const OracleResult r = oracle_continuous(h, {test::kFourBusListedOrder[k]});
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(*r.optimum, Rational(test::kFourBusIndices[k])) << "listed measurement " << k + 1;
  }
}

TEST(FourBus, WitnessHitsTargetAndReportedSupport) {
  const PowerNetwork net = four_bus_network();
  const ModelMatrix h = build_h(net, four_bus_placement(net));
  for (std::size_t row = 0; row < 5; ++row) {
    const OracleResult r = oracle_continuous(h, {row});
    const Eigen::VectorXd dz = h.h * r.witness;
    EXPECT_NEAR(dz(static_cast<Eigen::Index>(row)), 1.0, 1e-9);
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < 5; ++i) {
      if (std::abs(dz(static_cast<Eigen::Index>(i))) > kZeroTolerance) support.push_back(i);
    }
    EXPECT_EQ(support, r.verified_support);
    EXPECT_EQ(Rational(static_cast<std::int64_t>(support.size())), *r.optimum);
  }
}

TEST(FourBus, NonZeroAndEqualsOneAgree) {
  const PowerNetwork net = four_bus_network();
  const ModelMatrix h = build_h(net, four_bus_placement(net));
  for (std::size_t row = 0; row < 5; ++row) {
    EXPECT_EQ(oracle_continuous(h, {row, Relation::NonZero}).optimum,
              oracle_continuous(h, {row, Relation::EqualsOne}).optimum);
  }
}

TEST(MinSupport, ZeroTargetIsInfeasible) {
  Eigen::MatrixXd rows(2, 2);
  rows << 1, 0,
          0, 1;
  const std::vector<Rational> w{1, 1};
  EXPECT_FALSE(oracle_min_support(rows, w, {Eigen::VectorXd::Zero(2)}).feasible());
}

TEST(MinSupport, WeightsSteerTheChoice) {
  // x1 != 0 always pays row 1, plus the cheaper of rows 0 and 2.
  Eigen::MatrixXd rows(3, 2);
  rows << 1, -1,
          1, 0,
          0, 1;
  Eigen::VectorXd target(2);
  target << 1, 0;
  EXPECT_EQ(*oracle_min_support(rows, std::vector<Rational>{5, 1, 1}, {target}).optimum, Rational(2));
  EXPECT_EQ(*oracle_min_support(rows, std::vector<Rational>{1, 1, 1}, {target}).optimum, Rational(2));
  EXPECT_EQ(*oracle_min_support(rows, std::vector<Rational>{5, 1, Rational(1, 2)}, {target}).optimum,
            Rational(3, 2));
}

TEST(MinSupport, TiesGoToLexicographicallySmallestSupport) {
  // x1 + x2 != 0: either single row suffices.
  Eigen::MatrixXd rows(2, 2);
  rows << 1, 0,
          0, 1;
  Eigen::VectorXd target(2);
  target << 1, 1;
  const OracleResult r = oracle_min_support(rows, std::vector<Rational>{1, 1}, {target});
  EXPECT_EQ(*r.optimum, Rational(1));
  EXPECT_EQ(r.verified_support, (std::vector<std::size_t>{0}));
}

TEST(MinSupport, RejectsBadArguments) {
  const Eigen::MatrixXd big = Eigen::MatrixXd::Identity(kOracleMaxRows + 1, 2);
  const std::vector<Rational> w(kOracleMaxRows + 1, Rational(1));
  EXPECT_THROW(oracle_min_support(big, w, {Eigen::VectorXd::Ones(2)}), InputError);
  const Eigen::MatrixXd small = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(oracle_min_support(small, std::vector<Rational>{1}, {Eigen::VectorXd::Ones(2)}), InputError);
  EXPECT_THROW(oracle_min_support(small, std::vector<Rational>{1, 1}, {}), InputError);
  EXPECT_THROW(oracle_min_support(small, std::vector<Rational>{1, 1}, {Eigen::VectorXd::Ones(3)}), InputError);
  EXPECT_THROW(oracle_min_support(small, std::vector<Rational>{1, -1}, {Eigen::VectorXd::Ones(2)}), InputError);
  const PowerNetwork net = four_bus_network();
  EXPECT_THROW(oracle_continuous(build_h(net, four_bus_placement(net)), {5}), InputError);
}

TEST(Binary, TwoBusFullMeasurement) {
  const PowerNetwork net(2, {{0, 1, 1.0}});
  const WeightAssignment w = WeightAssignment::from_placement(net, MeasurementPlacement::full(net));
  EXPECT_EQ(*oracle_binary(net, w, 0).optimum, Rational(4));
  EXPECT_EQ(*oracle_binary_bus(net, w, 0).optimum, Rational(4));
  EXPECT_EQ(*oracle_continuous_line(net, w, 0).optimum, Rational(4));
  EXPECT_EQ(*oracle_continuous(build_h(net, MeasurementPlacement::full(net)), {0}).optimum, Rational(4));
}

TEST(Binary, RejectsLargeNetworks) {
  std::vector<Line> lines;
  for (BusId b = 0; b + 1 < kBinaryOracleMaxBuses + 1; ++b) lines.push_back({b, b + 1, 1.0});
  const PowerNetwork net(kBinaryOracleMaxBuses + 1, lines);
  const WeightAssignment w = WeightAssignment::from_placement(net, MeasurementPlacement::full(net));
  EXPECT_THROW(oracle_binary(net, w, 0), InputError);
  EXPECT_THROW(oracle_binary(net, w, net.line_count()), InputError);
}

TEST(Relaxation, BinaryNeverBelowContinuous) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
    const PowerNetwork net = random_network(rng, n, n + 3);
    const MeasurementPlacement meas = random_placement(rng, net, 0.6, false);
    const WeightAssignment w = WeightAssignment::from_placement(net, meas);
    for (LineId line = 0; line < net.line_count(); ++line) {
      const OracleResult cont = oracle_continuous_line(net, w, line);
      const OracleResult bin = oracle_binary(net, w, line);
      ASSERT_TRUE(bin.feasible());
      ASSERT_TRUE(cont.feasible());
      ASSERT_GE(*bin.optimum, *cont.optimum) << "trial " << trial << " line " << line;
    }
  }
}

TEST(Relaxation, WeightedFormMatchesRowFormUnderFullMeasurement) {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const PowerNetwork net = random_network(rng, n, n + 2);
    const MeasurementPlacement meas = MeasurementPlacement::full(net);
    const WeightAssignment w = WeightAssignment::from_placement(net, meas);
    const ModelMatrix h = build_h(net, meas);
    for (LineId line = 0; line < net.line_count(); ++line) {
      ASSERT_EQ(oracle_continuous_line(net, w, line).optimum,
                oracle_continuous(h, {*meas.find({MeasurementKind::FlowFrom, line})}).optimum);
    }
  }
}

TEST(Oracle, Deterministic) {
  std::mt19937_64 rng(7);
  const PowerNetwork net = random_network(rng, 7, 10);
  const ModelMatrix h = build_h(net, MeasurementPlacement::full(net));
  const OracleResult a = oracle_continuous(h, {3});
  const OracleResult b = oracle_continuous(h, {3});
  EXPECT_EQ(a.optimum, b.optimum);
  EXPECT_EQ(a.verified_support, b.verified_support);
  EXPECT_EQ(a.search_nodes, b.search_nodes);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(Gadget, SatisfiableInstanceHasIndexNPlusOne) {
  const SatGadget g = build_3sat_gadget({{1, 2, 3}}, 3);
  const OracleResult r = oracle_continuous(build_h(g.net, g.meas), {g.target});
  EXPECT_EQ(*r.optimum, Rational(4));
}

TEST(Gadget, UnsatisfiableInstanceExceedsNPlusOne) {
  const SatGadget g = build_3sat_gadget(test::unsat_clauses(), 4);
  const OracleResult r = oracle_continuous(build_h(g.net, g.meas), {g.target});
  EXPECT_GT(*r.optimum, Rational(5));
}

}  // namespace
}  // namespace secidx
