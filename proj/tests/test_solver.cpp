#include <gtest/gtest.h>

#include <cmath>

#include "delin/instance_gen.hpp"
#include "delin/solver.hpp"
#include "oracles.hpp"

using namespace delin;

namespace {

Graph star() { return oracle::make_graph(4, {{0, 1, -5.0}, {0, 2, 2.0}, {0, 3, -1.0}}); }
Graph path() { return oracle::make_graph(3, {{0, 1, 1.0}, {1, 2, -3.0}}); }
Graph triangle() { return oracle::make_graph(3, {{0, 1, -1.0}, {1, 2, -1.0}, {0, 2, -1.0}}); }

void expect_consistent(const SolveResult& r, const Graph& g, Mode mode, double tol = 1e-6) {
  const auto& R = r.reconstruction;
  EXPECT_TRUE(oracle::valid(g, R.edges, mode));
  EXPECT_NEAR(R.cost, oracle::sum(R.edges, g.weights()), 1e-9);
  EXPECT_LE(r.best_bound, R.cost + tol);
  if (R.status == SolveStatus::optimal) EXPECT_NEAR(R.cost, r.best_bound, tol);
}

}  // namespace

TEST(Solve, Star) {
  const auto r = solve(star());
  EXPECT_EQ(r.reconstruction.edges, (std::vector<EdgeId>{0, 2}));
  EXPECT_DOUBLE_EQ(r.reconstruction.cost, -6.0);
  EXPECT_EQ(r.reconstruction.status, SolveStatus::optimal);
  expect_consistent(r, star(), Mode::tree);
}

TEST(Solve, PathThroughPositive) {
  const auto r = solve(path());
  EXPECT_EQ(r.reconstruction.edges, (std::vector<EdgeId>{0, 1}));
  EXPECT_DOUBLE_EQ(r.reconstruction.cost, -2.0);
}

TEST(Solve, TriangleModes) {
  EXPECT_DOUBLE_EQ(solve(triangle(), {}, Formulation::compact, Mode::tree).reconstruction.cost, -2.0);
  const auto s = solve(triangle(), {}, Formulation::compact, Mode::subgraph);
  EXPECT_DOUBLE_EQ(s.reconstruction.cost, -3.0);
  EXPECT_EQ(s.reconstruction.edges.size(), 3u);
}

TEST(Solve, AllPositiveIsEmpty) {
  const auto g = oracle::make_graph(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 0.5}});
  const auto r = solve(g);
  EXPECT_TRUE(r.reconstruction.empty());
  EXPECT_EQ(r.reconstruction.cost, 0.0);
}

TEST(BruteForce, MatchesHandExamples) {
  EXPECT_DOUBLE_EQ(brute_force(star(), Mode::tree).cost, -6.0);
  EXPECT_DOUBLE_EQ(brute_force(path(), Mode::tree).cost, -2.0);
  EXPECT_DOUBLE_EQ(brute_force(triangle(), Mode::tree).cost, -2.0);
  EXPECT_DOUBLE_EQ(brute_force(triangle(), Mode::subgraph).cost, -3.0);
}

TEST(BruteForce, NegativeEdgeBehindExpensivePositives) {
  const auto g = oracle::make_graph(4, {{0, 1, 3.0}, {1, 2, 4.0}, {2, 3, -5.0}});
  const auto R = brute_force(g, Mode::tree);
  EXPECT_TRUE(R.empty());
  EXPECT_TRUE(solve(g).reconstruction.empty());
}

TEST(BruteForce, TieBreakLexicographic) {
  // two equal-cost single edges; the smaller id wins
  const auto g = oracle::make_graph(3, {{0, 1, -1.0}, {0, 2, -1.0}, {1, 2, 5.0}});
  const auto R = brute_force(g, Mode::tree);
  EXPECT_EQ(R.edges, (std::vector<EdgeId>{0, 1}));
  const auto h = oracle::make_graph(3, {{0, 1, -1.0}, {0, 2, 1.0}, {1, 2, -1.0}});
  EXPECT_EQ(brute_force(h, Mode::tree).edges, (std::vector<EdgeId>{0, 2}));
}

TEST(BruteForce, SizeLimit) {
  const auto g = random_weight_graph(10, 21, 1);
  try {
    brute_force(g, Mode::tree);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::size_limit);
  }
}

TEST(Solve, MatchesOracleOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto g = random_weight_graph(7, 11, seed);
    for (Mode mode : {Mode::tree, Mode::subgraph}) {
      const auto r = solve(g, {}, Formulation::compact, mode);
      EXPECT_NEAR(r.reconstruction.cost, oracle::best_cost(g, mode), 1e-9) << "seed " << seed;
      expect_consistent(r, g, mode);
    }
  }
}

TEST(Solve, VariantsAgree) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto g = random_weight_graph(14, 30, seed);
    for (Mode mode : {Mode::tree, Mode::subgraph}) {
      const double ref = solve(g, {}, Formulation::compact, mode).reconstruction.cost;
      SolveOptions par;
      par.parallel_workers = 3;
      SolveOptions plain;
      plain.cuts = false;
      plain.heuristics = false;
      SolveOptions none;
      none.lp = LpBackend::none;
      EXPECT_NEAR(solve(g, par, Formulation::compact, mode).reconstruction.cost, ref, 1e-6);
      EXPECT_NEAR(solve(g, plain, Formulation::compact, mode).reconstruction.cost, ref, 1e-6);
      EXPECT_NEAR(solve(g, {}, Formulation::legacy, mode).reconstruction.cost, ref, 1e-6);
      if (g.n_edges() <= 20 || mode == Mode::tree) {
        const auto r = solve(g, none, Formulation::compact, mode);
        if (r.reconstruction.status == SolveStatus::optimal) EXPECT_NEAR(r.reconstruction.cost, ref, 1e-6);
      }
    }
  }
}

TEST(Solve, NoLpBackendStillExactOnSmallGraphs) {
  SolveOptions none;
  none.lp = LpBackend::none;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = random_weight_graph(6, 9, seed);
    const auto r = solve(g, none);
    ASSERT_EQ(r.reconstruction.status, SolveStatus::optimal);
    EXPECT_NEAR(r.reconstruction.cost, oracle::best_cost(g, Mode::tree), 1e-9);
  }
}

TEST(WarmStart, InfeasibleRejected) {
  SolveOptions opt;
  Reconstruction bad;
  bad.edges = {1};  // does not touch the root
  opt.warm_start = bad;
  try {
    solve(path(), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::warm_start_rejected);
  }
}

TEST(WarmStart, OptimalStartKeepsOptimum) {
  const auto g = random_weight_graph(20, 45, 4);
  const auto cold = solve(g);
  SolveOptions opt;
  opt.warm_start = cold.reconstruction;
  const auto warm = solve(g, opt);
  EXPECT_NEAR(warm.reconstruction.cost, cold.reconstruction.cost, 1e-9);
  EXPECT_LE(warm.nodes_explored, cold.nodes_explored);
}

TEST(Override, NonBindingOverrideKeepsSolution) {
  const auto g = random_weight_graph(20, 45, 6);
  const auto base = solve(g);
  // raise the weight of an edge already outside the optimum
  EdgeId e = -1;
  for (EdgeId i = 0; i < g.n_edges(); ++i)
    if (!base.reconstruction.contains(i)) e = i;
  ASSERT_GE(e, 0);
  const double w = g.edge(e).weight + 5.0;
  auto W = g.weights();
  W[static_cast<std::size_t>(e)] = w;
  const auto cold = solve(build_compact(g, Mode::tree, W));
  SolveOptions opt;
  opt.warm_start = base.reconstruction;
  const auto warm = resolve_with_weight_override(g, Mode::tree, e, w, opt);
  EXPECT_EQ(warm.reconstruction.edges, base.reconstruction.edges);
  EXPECT_NEAR(warm.reconstruction.cost, cold.reconstruction.cost, 1e-9);
  EXPECT_LE(warm.nodes_explored, cold.nodes_explored);
}

TEST(Override, HugeNegativeForcesEdge) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = random_weight_graph(7, 11, seed);
    const auto base = solve(g).reconstruction;
    double total = 0.0;
    for (double x : g.weights()) total += std::abs(x);
    for (EdgeId e = 0; e < g.n_edges(); ++e) {
      if (base.contains(e)) continue;
      const auto r = resolve_with_weight_override(g, Mode::tree, e, -10.0 * total);
      auto W = g.weights();
      W[static_cast<std::size_t>(e)] = -10.0 * total;
      EXPECT_TRUE(r.reconstruction.contains(e));
      EXPECT_NEAR(r.reconstruction.cost, oracle::best_cost(g, Mode::tree, W), 1e-6);
    }
  }
}

TEST(Override, IdentityOverrideEqualsSolve) {
  const auto g = random_weight_graph(15, 30, 2);
  const auto a = solve(g);
  const auto b = resolve_with_weight_override(g, Mode::tree, 3, g.edge(3).weight);
  EXPECT_EQ(a.reconstruction.edges, b.reconstruction.edges);
  EXPECT_EQ(a.reconstruction.cost, b.reconstruction.cost);
}

TEST(Override, UnknownEdge) {
  EXPECT_THROW(resolve_with_weight_override(path(), Mode::tree, 9, -1.0), Error);
}

TEST(Limits, NodeLimitReturnsValidIncumbent) {
  const auto g = random_weight_graph(ladder_vertices(220), 220, 3);
  SolveOptions opt;
  opt.node_limit = 1;
  opt.cuts = false;
  const auto lim = solve(build_legacy(g, Mode::tree), opt);
  expect_consistent(lim, g, Mode::tree);
}

TEST(Limits, TimeLimitReturnsValidIncumbent) {
  const auto g = random_weight_graph(ladder_vertices(440), 440, 3);
  SolveOptions opt;
  opt.time_limit = 0.5;
  const auto r = solve(build_legacy(g, Mode::tree), opt);
  EXPECT_LT(r.wall_time, 30.0);
  expect_consistent(r, g, Mode::tree);
  if (r.reconstruction.status != SolveStatus::optimal) EXPECT_LE(r.best_bound, r.reconstruction.cost);
}

TEST(Options, RejectsBadValues) {
  SolveOptions opt;
  opt.parallel_workers = 0;
  EXPECT_THROW(solve(path(), opt), Error);
  opt.parallel_workers = 1;
  opt.absolute_gap_tolerance = -1.0;
  EXPECT_THROW(solve(path(), opt), Error);
}
