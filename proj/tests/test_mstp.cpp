#include <gtest/gtest.h>

#include <cmath>

#include "delin/graph_io.hpp"
#include "delin/instance_gen.hpp"
#include "delin/mstp.hpp"
#include "delin/solver.hpp"
#include "oracles.hpp"

using namespace delin;

TEST(Mstp, PathSubtreeCosts) {
  const auto g = oracle::make_graph(3, {{0, 1, 1.0}, {1, 2, -3.0}});
  const auto t = rooted_pruned_tree(g, g.weights());
  EXPECT_DOUBLE_EQ(t.subtree_cost[2], -3.0);
  EXPECT_DOUBLE_EQ(t.subtree_cost[1], -2.0);
  EXPECT_TRUE(std::isnan(t.subtree_cost[0]));
  const auto R = mst_prune(g);
  EXPECT_EQ(R.edges, (std::vector<EdgeId>{0, 1}));
  EXPECT_DOUBLE_EQ(R.cost, -2.0);
  EXPECT_DOUBLE_EQ(R.cost, oracle::best_cost(g, Mode::tree));
}

TEST(Mstp, PositiveLeafPruned) {
  const auto g = oracle::make_graph(2, {{0, 1, 1.0}});
  EXPECT_TRUE(mst_prune(g).empty());
}

TEST(Mstp, ZeroSubtreePruned) {
  const auto g = oracle::make_graph(3, {{0, 1, 2.0}, {1, 2, -2.0}});
  EXPECT_TRUE(mst_prune(g).empty());
}

TEST(Mstp, TriangleMissesLoop) {
  const auto g = oracle::make_graph(3, {{0, 1, -1.0}, {1, 2, -1.0}, {0, 2, -1.0}});
  const auto R = mst_prune(g);
  EXPECT_EQ(R.edges.size(), 2u);
  EXPECT_DOUBLE_EQ(R.cost, -2.0);
  EXPECT_DOUBLE_EQ(oracle::best_cost(g, Mode::subgraph), -3.0);
}

TEST(Mstp, IgnoresOtherComponents) {
  const auto g = oracle::make_graph(4, {{0, 1, -1.0}, {2, 3, -9.0}});
  EXPECT_EQ(mst_prune(g).edges, (std::vector<EdgeId>{0}));
}

TEST(Mstp, AlwaysValidAndNeverBetterThanOptimum) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto g = random_weight_graph(8, 12, seed);
    const auto R = mst_prune(g);
    EXPECT_TRUE(oracle::valid(g, R.edges, Mode::tree));
    EXPECT_DOUBLE_EQ(R.cost, oracle::sum(R.edges, g.weights()));
    EXPECT_GE(R.cost, oracle::best_cost(g, Mode::tree) - 1e-9);
    EXPECT_GE(R.cost, oracle::best_cost(g, Mode::subgraph) - 1e-9);
    EXPECT_LE(R.cost, 0.0);
  }
}

TEST(Mstp, WeightOverride) {
  const auto g = oracle::make_graph(2, {{0, 1, 1.0}});
  const std::vector<double> W = {-4.0};
  EXPECT_DOUBLE_EQ(mst_prune(g, W).cost, -4.0);
}

TEST(Mstp, LoopySample) {
  const auto g = load_graph(std::string(DELIN_SOURCE_DIR) + "/data/loopy.json");
  EXPECT_DOUBLE_EQ(mst_prune(g).cost, -2.0);
  EXPECT_DOUBLE_EQ(solve(g).reconstruction.cost, -3.0);
}
