#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

#include "secidx/errors.hpp"
#include "secidx/graph.hpp"

namespace secidx {
namespace {

// Minimum over all source-containing, sink-excluding subsets, and the
// intersection of all minimizing source sides.
struct BruteCut {
  Capacity value = std::numeric_limits<Capacity>::max();
  std::vector<NodeId> minimal_source_side;
};

BruteCut brute_min_cut(const DiGraph& g, NodeId s, NodeId t) {
  const auto n = static_cast<NodeId>(g.node_count());
  BruteCut best;
  std::uint32_t intersection = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask >> s & 1) || (mask >> t & 1)) continue;
    Capacity value = 0;
    for (const Edge& e : g.edges()) {
      if ((mask >> e.from & 1) && !(mask >> e.to & 1)) value += e.capacity;
    }
    if (value < best.value) {
      best.value = value;
      intersection = mask;
    } else if (value == best.value) {
      intersection &= mask;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (intersection >> v & 1) best.minimal_source_side.push_back(v);
  }
  return best;
}

TEST(MinCut, TextbookNetworkHasMaxFlow23) {
  // s=0, v1..v4 = 1..4, t=5.
  const DiGraph g(6, {{0, 1, 16}, {0, 2, 13}, {2, 1, 4}, {1, 3, 12}, {3, 2, 9},
                      {2, 4, 14}, {4, 3, 7}, {3, 5, 20}, {4, 5, 4}});
  const CutSolution cut = min_cut(g, 0, 5);
  EXPECT_EQ(cut.value, 23);
  EXPECT_EQ(cut.source_side, (std::vector<NodeId>{0, 1, 2, 4}));
  EXPECT_EQ(cut.sink_side, (std::vector<NodeId>{3, 5}));
  EXPECT_EQ(cut.cut_edges, (std::vector<EdgeId>{3, 6, 8}));
  EXPECT_EQ(cut_value(g, cut.source_side), 23);
}

TEST(MinCut, DisconnectedTerminalsGiveZeroCut) {
  const DiGraph g(4, {{0, 1, 5}, {2, 3, 5}});
  const CutSolution cut = min_cut(g, 0, 3);
  EXPECT_EQ(cut.value, 0);
  EXPECT_EQ(cut.source_side, (std::vector<NodeId>{0, 1}));
  EXPECT_TRUE(cut.cut_edges.empty());
}

TEST(MinCut, ParallelEdgesAddUp) {
  const DiGraph g(2, {{0, 1, 3}, {0, 1, 4}, {1, 0, 100}});
  const CutSolution cut = min_cut(g, 0, 1);
  EXPECT_EQ(cut.value, 7);
  EXPECT_EQ(cut.cut_edges, (std::vector<EdgeId>{0, 1}));
}

TEST(MinCut, TieResolvesToInclusionMinimalSourceSide) {
  // Path s -> a -> t with equal capacities: both {s} and {s, a} are optimal.
  const DiGraph g(3, {{0, 1, 2}, {1, 2, 2}});
  EXPECT_EQ(min_cut(g, 0, 2).source_side, (std::vector<NodeId>{0}));
}

TEST(MinCut, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 9)(rng);
    const int m = std::uniform_int_distribution<int>(0, 3 * n)(rng);
    std::uniform_int_distribution<NodeId> node(0, n - 1);
    std::uniform_int_distribution<Capacity> cap(0, 6);
    std::vector<Edge> edges;
    while (static_cast<int>(edges.size()) < m) {
      const NodeId a = node(rng), b = node(rng);
      if (a != b) edges.push_back({a, b, cap(rng)});
    }
    const DiGraph g(static_cast<std::size_t>(n), edges);
    const NodeId s = node(rng);
    NodeId t = node(rng);
    while (t == s) t = node(rng);

    const CutSolution cut = min_cut(g, s, t);
    const BruteCut brute = brute_min_cut(g, s, t);
    ASSERT_EQ(cut.value, brute.value) << "trial " << trial;
    ASSERT_EQ(cut.source_side, brute.minimal_source_side) << "trial " << trial;
    ASSERT_EQ(cut_value(g, cut.source_side), cut.value);
    ASSERT_EQ(cut.source_side.size() + cut.sink_side.size(), g.node_count());
  }
}

TEST(MinCut, LargeCapacitiesStayExact) {
  const Capacity big = Capacity{1} << 60;
  const DiGraph g(3, {{0, 1, big}, {1, 2, big - 1}, {0, 2, 1}});
  EXPECT_EQ(min_cut(g, 0, 2).value, big);
}

TEST(DiGraph, RejectsInvalidInput) {
  EXPECT_THROW(DiGraph(0, {}), InputError);
  EXPECT_THROW(DiGraph(2, {{0, 2, 1}}), InputError);
  EXPECT_THROW(DiGraph(2, {{1, 1, 1}}), InputError);
  EXPECT_THROW(DiGraph(2, {{0, 1, -1}}), InputError);
  const Capacity max = std::numeric_limits<Capacity>::max();
  EXPECT_THROW(DiGraph(2, {{0, 1, max}, {1, 0, 1}}), OverflowError);
}

TEST(MinCut, RejectsBadTerminals) {
  const DiGraph g(2, {{0, 1, 1}});
  EXPECT_THROW(min_cut(g, 0, 0), InputError);
  EXPECT_THROW(min_cut(g, 0, 5), InputError);
}

TEST(DiGraph, TextDump) {
  std::ostringstream out;
  write_graph_text(out, DiGraph(2, {{0, 1, 3}}));
  EXPECT_EQ(out.str(), "2\n0 1 3\n");
}

}  // namespace
}  // namespace secidx
