#include <cmath>

#include <gtest/gtest.h>

#include "congestion/convergence.hpp"
#include "congestion/error.hpp"
#include "congestion/regression.hpp"
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

std::vector<RatePoint> synthetic(const std::vector<double>& totals,
                                 const std::function<double(double)>& gap) {
  std::vector<RatePoint> out;
  for (double t : totals) {
    RatePoint p;
    p.total = t;
    p.poa_minus_one = gap(t);
    out.push_back(p);
  }
  return out;
}

const std::vector<double> kLight{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

}  // namespace

TEST(Regression, LineAndLogLog) {
  const LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  const LineFit g = fit_loglog({1, 10, 100}, {2, 20, 200});
  EXPECT_NEAR(g.slope, 1.0, 1e-14);
  EXPECT_NEAR(std::exp(g.intercept), 2.0, 1e-12);
  EXPECT_THROW(fit_line({1, 1}, {0, 1}), Error);
}

TEST(FitRate, SyntheticDown) {
  const RateFit f = fit_rate(synthetic(kLight, [](double t) { return t; }), RateDirection::kDown, 1e-16);
  ASSERT_FALSE(f.degenerate);
  EXPECT_NEAR(f.fit.slope, 1.0, 1e-12);
  const RateFit q = fit_rate(synthetic(kLight, [](double t) { return 5 * t * t; }), RateDirection::kDown, 1e-16);
  EXPECT_NEAR(q.fit.slope, 2.0, 1e-12);
}

TEST(FitRate, SyntheticUp) {
  const std::vector<double> heavy{1e1, 1e2, 1e3, 1e4, 1e5};
  const RateFit f = fit_rate(synthetic(heavy, [](double t) { return 1 / std::log(t + 1); }),
                             RateDirection::kUp, 1e-16);
  ASSERT_FALSE(f.degenerate);
  EXPECT_NEAR(f.fit.slope, 1.0, 1e-12);
}

TEST(FitRate, DegenerateWhenFlat) {
  EXPECT_TRUE(fit_rate(synthetic(kLight, [](double) { return 0.0; }), RateDirection::kDown, 1e-13).degenerate);
}

TEST(Schedule, FixedAndDrifting) {
  const Game g(shared_arc(), std::vector<CostFunction>(4, CostFunction::constant(1.0)), {1.0, 3.0});
  const DemandSchedule s = schedule_for(g, {2.0, 8.0});
  EXPECT_NEAR(s.demands_at(0)[0], 0.5, 1e-15);
  EXPECT_NEAR(s.demands_at(1)[1], 6.0, 1e-15);
  const DemandSchedule d = schedule_for(g, {2.0, 8.0, 20.0}, DemandPattern::kDriftingRatio);
  for (std::size_t n = 0; n < 3; ++n) {
    const auto v = d.demands_at(n);
    EXPECT_NEAR(v[0] + v[1], d.totals[n], 1e-12);
    EXPECT_GT(v[0], 0.0);
    EXPECT_GT(v[1], 0.0);
  }
  EXPECT_EQ(code_of([&] { schedule_for(g, {1.0, -1.0}); }), ErrorCode::kDomain);
}

TEST(ConvergeDown, ConstantCostsGiveZero) {
  const Game g(parallel2(), {CostFunction::constant(1.0), CostFunction::constant(2.0)}, {1.0});
  for (const auto& p : converge_down(g, schedule_for(g, kLight))) {
    EXPECT_NEAR(p.poa_minus_one, 0.0, 1e-12);
    EXPECT_EQ(*p.reduction_dist, 0.0);
  }
}

TEST(ConvergeDown, BprBoundsHold) {
  const Game g(parallel2(), {CostFunction::bpr(1.0, 1.0, 1.0), CostFunction::constant(2.0)}, {1.0});
  const auto pts = converge_down(g, schedule_for(g, {1e-1, 1e-2, 1e-3, 1e-4}));
  for (const auto& p : pts) {
    ASSERT_TRUE(p.bound);
    EXPECT_LE(p.poa_minus_one, *p.bound);
    EXPECT_LE(*p.reduction_dist, *p.reduction_bound + 1e-15);
    EXPECT_NEAR(p.poa_direct, p.poa_minus_one + 1, 1e-9);
  }
}

TEST(ConvergeDown, LinearRateOnCurvedCosts) {
  const Game g(parallel2(), {CostFunction::affine(1.0, 1.0), CostFunction::polynomial({1.0, 0.0, 1.0})}, {1.0});
  const auto pts = converge_down(g, schedule_for(g, kLight));
  const RateFit f = fit_rate(pts, RateDirection::kDown, 1e-13);
  ASSERT_FALSE(f.degenerate);
  EXPECT_GE(f.fit.slope, 0.9);
  for (const auto& p : pts) EXPECT_LE(p.poa_minus_one, *p.bound);
  EXPECT_TRUE(pts.back().within_radius);
}

TEST(ConvergeDown, CorollaryConstant) {
  const Game g(parallel2(), {CostFunction::affine(2.0, 1.0), CostFunction::constant(0.5)}, {1.0});
  EXPECT_DOUBLE_EQ(light_traffic_constant(g, 1.0), 8.0 * 2 * 2 / 0.5 * 2.0);
  EXPECT_EQ(code_of([] { light_traffic_constant(pigou(), 1.0); }), ErrorCode::kPrecondition);
  EXPECT_EQ(code_of([] {
              const Game r(parallel2(), {CostFunction::bpr(1.0, 0.5, 1.0), CostFunction::constant(1.0)}, {1.0});
              light_traffic_constant(r, 1.0);
            }),
            ErrorCode::kPrecondition);
}

TEST(ConvergeUp, EqualDegreeMonomials) {
  const Game g(parallel2(), {CostFunction::bpr(1.0, 2.0, 0.0), CostFunction::bpr(3.0, 2.0, 0.0)}, {1.0});
  for (const auto& p : converge_up(g, schedule_for(g, {1.0, 10.0, 100.0}))) {
    EXPECT_NEAR(p.poa_minus_one, 0.0, 1e-9);
    ASSERT_TRUE(p.w);
    EXPECT_NEAR(*p.w, 0.0, 1e-12);
  }
}

TEST(ConvergeUp, BprDecreasingAndBounded) {
  const Game g(parallel2(), {CostFunction::bpr(1.0, 1.0, 1.0), CostFunction::bpr(2.0, 1.0, 0.5)}, {1.0});
  const HeavyTrafficSetup s = heavy_traffic_setup(g);
  EXPECT_DOUBLE_EQ(s.beta, 1.0);
  const auto pts = converge_up(g, schedule_for(g, {1.0, 1e1, 1e2, 1e3, 1e4}));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_LE(pts[i].poa_minus_one, pts[i - 1].poa_minus_one + 1e-10);
  }
  for (const auto& p : pts) {
    if (p.bound) EXPECT_LE(p.poa_minus_one, *p.bound);
  }
  EXPECT_TRUE(pts.back().bound);
}

TEST(ConvergeUp, MonomialLogClosedBound) {
  const Game g(parallel2(), {CostFunction::monomial_log(1.0, 1.0, 1.0),
                             CostFunction::monomial_log(2.0, 1.0, 1.0)},
               {1.0});
  const HeavyTrafficSetup s = heavy_traffic_setup(g);
  EXPECT_TRUE(s.monomial_log);
  double maxl = 0.0;
  for (double l : s.lambda) maxl = std::max(maxl, l);
  for (const auto& p : converge_up(g, schedule_for(g, {1e1, 1e2, 1e3, 1e4}))) {
    ASSERT_TRUE(p.w && p.w_closed);
    const double closed = 1.0 * p.total / (p.total + 1) / std::log(p.total + 1) * maxl;
    EXPECT_NEAR(*p.w_closed, closed, 1e-12 * closed);
    EXPECT_LE(*p.w, closed + p.w_error);
    EXPECT_LE(p.poa_minus_one, s.constant * std::sqrt(1 / std::log(p.total + 1)));
  }
}

TEST(ConvergeUp, MixedIndicesRejected) {
  const Game g(parallel2(), {CostFunction::bpr(1.0, 1.0, 0.0), CostFunction::bpr(1.0, 2.0, 0.0)}, {1.0});
  EXPECT_EQ(code_of([&] { heavy_traffic_setup(g); }), ErrorCode::kPrecondition);
}
