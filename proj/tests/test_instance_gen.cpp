#include <gtest/gtest.h>

#include <cmath>

#include "delin/graph_io.hpp"
#include "delin/instance_gen.hpp"
#include "oracles.hpp"

using namespace delin;

TEST(Planted, CountsForceSpanningTree) {
  GenSpec s;
  s.n_vertices = 5;
  s.n_edges = 4;
  s.seed = 7;
  const auto g = planted_instance(s);
  EXPECT_EQ(g.n_vertices(), 5);
  ASSERT_EQ(g.n_edges(), 4);
  ASSERT_TRUE(g.has_gt());
  const auto gt = g.gt_edges();
  EXPECT_EQ(gt.size(), 4u);
  EXPECT_TRUE(oracle::valid(g, gt, Mode::tree));
}

TEST(Planted, GroundTruthIsValidReconstruction) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (Mode m : {Mode::tree, Mode::subgraph}) {
      GenSpec s;
      s.seed = seed;
      s.mode = m;
      s.gt_vertices = 12;
      const auto g = planted_instance(s);
      EXPECT_EQ(g.n_edges(), 60);
      EXPECT_TRUE(oracle::valid(g, g.gt_edges(), m)) << "seed " << seed;
    }
  }
}

TEST(Planted, Deterministic) {
  GenSpec s;
  s.seed = 42;
  EXPECT_EQ(dump_graph(planted_instance(s)), dump_graph(planted_instance(s)));
  GenSpec t = s;
  t.seed = 43;
  EXPECT_NE(dump_graph(planted_instance(s)), dump_graph(planted_instance(t)));
}

TEST(Planted, FeatureClassesSeparate) {
  GenSpec s;
  s.n_vertices = 30;
  s.n_edges = 60;
  s.seed = 1;
  const auto g = planted_instance(s);
  ASSERT_TRUE(g.has_features());
  std::vector<double> cp(2, 0.0), cn(2, 0.0);
  int np = 0, nn = 0;
  for (const auto& e : g.edges()) {
    auto& c = e.gt == GtLabel::positive ? cp : cn;
    (e.gt == GtLabel::positive ? np : nn) += 1;
    for (std::size_t k = 0; k < 2; ++k) c[k] += e.features[k];
  }
  ASSERT_GT(np, 0);
  ASSERT_GT(nn, 0);
  double d2 = 0.0;
  for (std::size_t k = 0; k < 2; ++k) d2 += std::pow(cp[k] / np - cn[k] / nn, 2);
  EXPECT_GT(std::sqrt(d2), s.noise_sigma);
}

TEST(Planted, FlipFractionFlipsWeightSigns) {
  GenSpec s;
  s.seed = 3;
  s.flip_fraction = 0.25;
  const auto g = planted_instance(s);
  int disagree = 0;
  for (const auto& e : g.edges()) disagree += (e.weight < 0) != (e.gt == GtLabel::positive);
  EXPECT_EQ(disagree, 15);
}

TEST(Planted, RejectsImpossibleSpecs) {
  GenSpec s;
  s.n_vertices = 5;
  s.n_edges = 3;
  EXPECT_THROW(planted_instance(s), Error);
  s.n_edges = 11;
  EXPECT_THROW(planted_instance(s), Error);
}

TEST(Ladder, CompareSizes) {
  const std::vector<int> want = {99, 132, 220, 330, 440, 660, 924, 1320, 1540};
  EXPECT_EQ(std::vector<int>(kCompareLadder.begin(), kCompareLadder.end()), want);
  for (int e : kCompareLadder) {
    const auto g = random_weight_graph(ladder_vertices(e), e, 1);
    EXPECT_EQ(g.n_edges(), e);
    EXPECT_EQ(g.n_vertices(), ladder_vertices(e));
  }
}

TEST(Ladder, ExtendedSizes) {
  const std::vector<int> want = {1760, 2420, 3520, 4400, 5720, 9900};
  EXPECT_EQ(std::vector<int>(kExtendedLadder.begin(), kExtendedLadder.end()), want);
  const auto g = random_weight_graph(ladder_vertices(1760), 1760, 1);
  EXPECT_EQ(g.n_edges(), 1760);
}

TEST(RandomGraph, SingleEdge) {
  const auto g = random_weight_graph(2, 1, 5);
  ASSERT_EQ(g.n_edges(), 1);
  EXPECT_EQ(g.n_vertices(), 2);
  EXPECT_NE(g.edge(0).u, g.edge(0).v);
}

TEST(RandomGraph, ConnectedAndDeterministic) {
  const auto g = random_weight_graph(40, 90, 8);
  std::vector<EdgeId> all(90);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_TRUE(oracle::valid(g, all, Mode::subgraph));
  EXPECT_EQ(g, random_weight_graph(40, 90, 8));
}

TEST(Steiner, BigM) {
  const auto g = oracle::make_graph(4, {{0, 1, 2.0}, {1, 2, 1.0}, {2, 3, 4.0}});
  EXPECT_DOUBLE_EQ(steiner_big_m(g), 8.0);
}

TEST(Steiner, SingleTerminal) {
  SteinerInstance inst{oracle::make_graph(3, {{0, 1, 2.0}, {1, 2, 3.0}}), {1}};
  const auto red = steiner_reduce(inst);
  EXPECT_EQ(red.n_vertices(), 4);
  EXPECT_EQ(red.n_edges(), 3);
  EXPECT_DOUBLE_EQ(oracle::best_cost(red, Mode::tree), -6.0);
}

TEST(Steiner, ReductionPreservesOptimum) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = random_steiner_instance(7, 9, 3, seed);
    const double stp = oracle::steiner_cost(inst.graph, inst.terminals);
    const auto red = steiner_reduce(inst);
    const double M = steiner_big_m(inst.graph);
    EXPECT_DOUBLE_EQ(oracle::best_cost(red, Mode::tree), stp - 3 * M) << "seed " << seed;
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(Steiner, RejectsNegativeWeights) {
  SteinerInstance inst{oracle::make_graph(2, {{0, 1, -1.0}}), {0}};
  EXPECT_THROW(steiner_reduce(inst), Error);
}
