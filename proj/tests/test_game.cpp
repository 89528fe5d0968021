#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "congestion/error.hpp"
#include "congestion/game.hpp"
#include "support.hpp"

using namespace congestion;
using namespace congestion::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvariant;
}

}  // namespace

TEST(Structure, PathIndexing) {
  const auto st = shared_arc();
  EXPECT_EQ(st->num_paths(), 4u);
  EXPECT_EQ(st->first_path(1), 2u);
  EXPECT_EQ(st->paths_of(0), 2u);
  EXPECT_EQ(st->od_of_path(3), 1u);
  EXPECT_EQ(*st->arc_index("c"), 2u);
  EXPECT_FALSE(st->arc_index("zz"));
}

TEST(Structure, RejectsBadStructure) {
  EXPECT_EQ(code_of([] { make_structure({"a", "b"}, {"st"}, {{{"a"}}}); }), ErrorCode::kBadStructure);
  EXPECT_EQ(code_of([] { make_structure({"a", "b", "c"}, {"st"}, {{{"a"}, {"b"}}}); }),
            ErrorCode::kBadStructure);
  EXPECT_EQ(code_of([] { make_structure({"a", "b"}, {"st"}, {{{"a"}, {"q"}}}); }), ErrorCode::kSchema);
}

TEST(Game, RejectsDegenerate) {
  EXPECT_EQ(code_of([] {
              Game(parallel2(), {CostFunction::affine(1, 0), CostFunction::constant(1)}, {0.0});
            }),
            ErrorCode::kDegenerate);
  EXPECT_EQ(code_of([] {
              Game(parallel2(), {CostFunction::constant(0), CostFunction::constant(1)}, {1.0});
            }),
            ErrorCode::kDegenerate);
}

TEST(Game, ArcFlows) {
  const Game g = pigou();
  EXPECT_EQ(arc_flows(g, {1.0, 0.0}), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(arc_flows(g, {0.5, 0.5}), (std::vector<double>{0.5, 0.5}));
  // Paths {b, c} of k1 and {c} of k2 share arc c.
  const Game s(shared_arc(), std::vector<CostFunction>(4, CostFunction::constant(1.0)), {0.3, 1.0});
  const auto fa = arc_flows(s, {0.0, 0.3, 0.4, 0.6});
  EXPECT_DOUBLE_EQ(fa[2], 0.7);
}

TEST(Game, PathCosts) {
  const Game g = pigou();
  EXPECT_DOUBLE_EQ(path_cost(g, {1.0, 0.0}, 0), 1.0);
  EXPECT_DOUBLE_EQ(path_cost(g, {1.0, 0.0}, 1), 1.0);
  EXPECT_DOUBLE_EQ(path_cost(g, {0.5, 0.5}, 0), 0.5);
  EXPECT_EQ(code_of([&] { path_cost(g, {1.0, 0.0}, 2); }), ErrorCode::kUnknownPath);
}

TEST(Game, TotalCost) {
  const Game g = pigou();
  EXPECT_DOUBLE_EQ(total_cost(g, {1.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(total_cost(g, {0.5, 0.5}), 0.75);
  const Game c(parallel3(), std::vector<CostFunction>(3, CostFunction::constant(2.0)), {1.5});
  EXPECT_DOUBLE_EQ(total_cost(c, {0.5, 0.25, 0.75}), 1.5 * 2.0);
}

TEST(Game, Feasibility) {
  const Game g = pigou();
  EXPECT_NO_THROW(check_feasible(g, {0.3, 0.7}));
  EXPECT_EQ(code_of([&] { check_feasible(g, {0.3, 0.6}); }), ErrorCode::kInfeasibleFlow);
  EXPECT_EQ(code_of([&] { check_feasible(g, {-0.1, 1.1}); }), ErrorCode::kInfeasibleFlow);
  EXPECT_EQ(code_of([&] { check_feasible(g, {1.0}); }), ErrorCode::kInfeasibleFlow);
}

TEST(Game, PotentialMatchesIntegrals) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Game g = random_game(rng, false);
    const PathFlow f = uniform_flow(g);
    const auto fa = arc_flows(g, f);
    double oracle = 0.0;
    for (std::size_t a = 0; a < fa.size(); ++a) {
      oracle += simpson([&](double x) { return g.cost(a)(x); }, 0.0, fa[a]);
    }
    // Simpson loses its order at piecewise-linear kinks.
    EXPECT_NEAR(potential(g, f), oracle, 1e-7 * (1 + oracle));
  }
}

TEST(Game, UserCosts) {
  const Game g = pigou();
  EXPECT_DOUBLE_EQ(user_costs(g, {0.5, 0.5})[0], 0.5);
  EXPECT_DOUBLE_EQ(user_costs(g, {1.0, 0.0})[0], 1.0);
}

TEST(Game, Equivalence) {
  const Game g = pigou();
  EXPECT_TRUE(games_equivalent(g, g));
  // Costs that agree on [0, 1] and differ beyond it.
  const auto bent = CostFunction::piecewise_linear({0.0, 1.0, 2.0}, {0.0, 1.0, 50.0});
  const Game h(parallel2(), {bent, CostFunction::constant(1.0)}, {1.0});
  EXPECT_TRUE(games_equivalent(g, h));
  EXPECT_FALSE(games_equivalent(g, g.with_demands({0.9})));
  EXPECT_FALSE(games_equivalent(g, shifted_pair(0.01)));
}

TEST(Game, StructureMismatch) {
  EXPECT_EQ(code_of([] { require_same_structure(pigou(), Game(parallel3(),
                                                               std::vector<CostFunction>(
                                                                   3, CostFunction::constant(1)),
                                                               {1.0})); }),
            ErrorCode::kStructureMismatch);
  // Equal structures built separately still match.
  EXPECT_NO_THROW(require_same_structure(pigou(), shifted_pair(0.1)));
}
