#include "congestion/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "congestion/error.hpp"

namespace congestion {
namespace {

void require_factor(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kDomain, "normalization factor must be positive");
  }
}

}  // namespace

Game cost_normalize(const Game& g, double v) {
  require_factor(v);
  std::vector<CostFunction> costs;
  costs.reserve(g.costs().size());
  for (const auto& c : g.costs()) costs.push_back(c.scaled(1.0 / v));
  return g.with_costs(std::move(costs));
}

Game demand_normalize(const Game& g, double v) {
  require_factor(v);
  std::vector<CostFunction> costs;
  costs.reserve(g.costs().size());
  for (const auto& c : g.costs()) costs.push_back(c.argument_scaled(v));
  std::vector<double> demands = g.demands();
  for (double& d : demands) d /= v;
  return Game(g.structure_ptr(), std::move(costs), std::move(demands));
}

Game truncate_extend(const Game& g, double t_new, ExtensionMode mode) {
  require_factor(t_new);
  const double t_min = std::min(g.total_demand(), t_new);
  std::vector<CostFunction> costs;
  costs.reserve(g.costs().size());
  for (const auto& c : g.costs()) costs.push_back(CostFunction::extended(c, t_min, mode));
  std::vector<double> demands = g.demands();
  const double ratio = t_new / g.total_demand();
  for (double& d : demands) d *= ratio;
  return Game(g.structure_ptr(), std::move(costs), std::move(demands));
}

}  // namespace congestion
