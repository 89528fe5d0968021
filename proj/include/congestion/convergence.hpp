#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "congestion/game.hpp"
#include "congestion/regression.hpp"

namespace congestion {

enum class DemandPattern {
  kFixedRatio,     // d_k / T constant along the schedule
  kDriftingRatio,  // ratios oscillate but stay bounded away from 0
};

struct DemandSchedule {
  std::vector<double> direction;  // positive per-O/D weights
  std::vector<double> totals;
  DemandPattern pattern = DemandPattern::kFixedRatio;

  // Demand vector with total totals[n].
  std::vector<double> demands_at(std::size_t n) const;
};

// Fixed-ratio schedule along the demand direction of g.
DemandSchedule schedule_for(const Game& g, std::vector<double> totals,
                            DemandPattern pattern = DemandPattern::kFixedRatio);

struct RatePoint {
  double total = 0.0;
  double poa_minus_one = 0.0;
  std::optional<double> bound;
  // Growing demand: sup distance of the normalized game to its monomial limit.
  std::optional<double> w;
  double w_error = 0.0;
  // Growing demand with MonomialLog costs: closed-form bound on w and the
  // resulting rate bound.
  std::optional<double> w_closed;
  std::optional<double> ln_bound;
  // Shrinking demand: distance of the normalized game to its constant-cost
  // limit, and the Lipschitz bound M T it must respect.
  std::optional<double> reduction_dist;
  std::optional<double> reduction_bound;
  // Shrinking demand: whether the reduction distance lies inside the radius of
  // the exponent-1 certificate at the constant-cost limit.
  bool within_radius = false;
  // PoA of the unnormalized game, for the invariance check.
  double poa_direct = 1.0;
};

// Constant K of the light-traffic bound rho <= 1 + K T. Error(kPrecondition)
// unless every cost is positive at 0 and Lipschitz on [0, b].
double light_traffic_constant(const Game& g0, double b);

std::vector<RatePoint> converge_down(const Game& g0, const DemandSchedule& schedule,
                                     double tol = 1e-13);

// Regular-variation data for growing demands: common index beta, common log
// power alpha, reference arc and the limits lambda_{a,b}.
struct HeavyTrafficSetup {
  double beta = 0.0;
  double alpha = 0.0;
  std::size_t reference = 0;
  std::vector<double> lambda;
  bool monomial_log = false;
  double constant = 0.0;  // C in |rho - 1| <= C sqrt(w)
  double c_star_limit = 0.0;
  double radius = 0.0;    // w must not exceed C*(limit) / (2 |A|)
};

HeavyTrafficSetup heavy_traffic_setup(const Game& g0, double tol = 1e-12);

std::vector<RatePoint> converge_up(const Game& g0, const DemandSchedule& schedule,
                                   double tol = 1e-12);

enum class RateDirection { kDown, kUp };

struct RateFit {
  LineFit fit;
  bool degenerate = false;
};

// Log-log fit of poa - 1 against T (down) or against 1 / ln(T + 1) (up), over
// points with poa - 1 > 10 tol. Degenerate with fewer than 4 such points.
RateFit fit_rate(const std::vector<RatePoint>& points, RateDirection direction,
                 double tol);

}  // namespace congestion
