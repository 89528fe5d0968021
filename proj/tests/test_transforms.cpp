#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "congestion/equilibrium.hpp"
#include "congestion/metric.hpp"
#include "congestion/transforms.hpp"
#include "support.hpp"

using namespace congestion;
using namespace congestion::testing;

TEST(CostNormalize, Identity) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    const Game g = random_game(rng, false);
    EXPECT_EQ(dist(g, cost_normalize(g, 1.0)).value, 0.0);
  }
}

TEST(CostNormalize, Pigou) {
  const Game g = cost_normalize(pigou(), 2.0);
  EXPECT_DOUBLE_EQ(g.cost(0)(0.8), 0.4);
  EXPECT_DOUBLE_EQ(g.cost(1)(0.8), 0.5);
  EXPECT_NEAR(poa(g), 4.0 / 3.0, 1e-9);
}

TEST(CostNormalize, ScalesSameDemandDistance) {
  const Game a = pigou(), b = shifted_pair(0.3);
  const double d = dist(a, b).value;
  for (double v : {0.5, 2.0, 10.0}) {
    EXPECT_NEAR(dist(cost_normalize(a, v), cost_normalize(b, v)).value, d / v, 1e-12 * d);
  }
}

TEST(DemandNormalize, TotalBecomesOne) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 20; ++i) {
    const Game g = random_game(rng, false);
    const Game n = demand_normalize(g, g.total_demand());
    EXPECT_NEAR(n.total_demand(), 1.0, 1e-15);
    EXPECT_EQ(dist(g, demand_normalize(g, 1.0)).value, 0.0);
  }
}

TEST(DemandNormalize, FlowCorrespondence) {
  // f is a WE of g iff f / v is a WE of the normalized game.
  std::mt19937_64 rng(43);
  for (int i = 0; i < 20; ++i) {
    const Game g = random_game(rng, true);
    for (double v : {0.5, 3.0}) {
      const Game n = demand_normalize(g, v);
      const SolveReport r = solve_we(g);
      PathFlow scaled = r.flow;
      for (double& x : scaled) x /= v;
      EXPECT_NEAR(approximation_threshold(n, scaled), approximation_threshold(g, r.flow) / v, 1e-12);
      EXPECT_NEAR(total_cost(n, scaled), r.total_cost / v, 1e-12 * (1 + r.total_cost));
    }
  }
}

TEST(Transforms, PoaInvariant) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 20; ++i) {
    const Game g = random_game(rng, true);
    const double r = poa(g);
    for (double v : {0.5, 2.0, 10.0}) {
      EXPECT_NEAR(poa(cost_normalize(g, v)), r, 1e-6);
      EXPECT_NEAR(poa(demand_normalize(g, v)), r, 1e-6);
    }
  }
}

TEST(TruncateExtend, ShorterDemandKeepsCosts) {
  const Game g(parallel2(), {CostFunction::polynomial({0.1, 0.0, 1.0}), CostFunction::constant(1.0)},
               {1.0});
  const Game h = truncate_extend(g, 0.6);
  EXPECT_NEAR(h.total_demand(), 0.6, 1e-15);
  EXPECT_TRUE(games_equivalent(h, g.with_demands({0.6})));
}

TEST(TruncateExtend, ConstantAndTangentExtensions) {
  const Game g(parallel2(), {CostFunction::polynomial({0.1, 0.0, 1.0}), CostFunction::constant(1.0)},
               {1.0});
  const Game c = truncate_extend(g, 2.0, ExtensionMode::kConstant);
  EXPECT_DOUBLE_EQ(c.cost(0)(2.0), g.cost(0)(1.0));
  const Game t = truncate_extend(g, 2.0, ExtensionMode::kTangent);
  EXPECT_DOUBLE_EQ(t.cost(0)(1.5), 0.1 + 1.0 + 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(t.cost(0)(0.5), g.cost(0)(0.5));
}
