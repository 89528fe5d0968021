#include "congestion/metric.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "congestion/error.hpp"

namespace congestion {
namespace {

double demand_distance(const Game& a, const Game& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.demands().size(); ++k) {
    d = std::max(d, std::abs(a.demands()[k] - b.demands()[k]));
  }
  return d;
}

void finish(MetricValue& m) {
  m.cost_part = std::max(m.sup_part, m.endpoint_part);
  m.value = std::max(m.demand_part, m.cost_part);
}

}  // namespace

MetricValue dist(const Game& a, const Game& b, std::size_t grid_n) {
  require_same_structure(a, b);
  MetricValue m;
  m.demand_part = demand_distance(a, b);
  const double ta = a.total_demand();
  const double tb = b.total_demand();
  const double t = std::min(ta, tb);
  for (std::size_t i = 0; i < a.costs().size(); ++i) {
    const SupDistance s = sup_distance(a.cost(i), b.cost(i), t, grid_n);
    m.sup_part = std::max(m.sup_part, s.estimate);
    m.error_bound = std::max(m.error_bound, s.error_bound);
    m.endpoint_part = std::max(m.endpoint_part, std::abs(a.cost(i)(ta) - b.cost(i)(tb)));
  }
  finish(m);
  return m;
}

MetricValue naive_dist(const Game& a, const Game& b, std::size_t grid_n) {
  require_same_structure(a, b);
  MetricValue m;
  m.demand_part = demand_distance(a, b);
  const double t = std::max(a.total_demand(), b.total_demand());
  for (std::size_t i = 0; i < a.costs().size(); ++i) {
    const SupDistance s = sup_distance(a.cost(i), b.cost(i), t, grid_n);
    m.sup_part = std::max(m.sup_part, s.estimate);
    m.error_bound = std::max(m.error_bound, s.error_bound);
  }
  finish(m);
  return m;
}

AxiomReport check_metric_axioms(const Game& g1, const Game& g2, const Game& g3) {
  const MetricValue d12 = dist(g1, g2), d21 = dist(g2, g1);
  const MetricValue d13 = dist(g1, g3), d31 = dist(g3, g1);
  const MetricValue d32 = dist(g3, g2), d23 = dist(g2, g3);
  AxiomReport r;
  r.symmetric = d12.value == d21.value && d13.value == d31.value &&
                d32.value == d23.value;
  r.nonnegative = d12.value >= 0.0 && d13.value >= 0.0 && d32.value >= 0.0;
  auto zero = [](const MetricValue& m) { return m.value <= 1e-12; };
  r.identity = games_equivalent(g1, g2) == zero(d12) &&
               games_equivalent(g1, g3) == zero(d13) &&
               games_equivalent(g3, g2) == zero(d32);
  const double rhs = d13.value + d32.value;
  r.triangle_excess = d12.value - rhs;
  r.triangle_slack = d13.error_bound + d32.error_bound + 1e-12 * (1.0 + rhs);
  r.triangle = r.triangle_excess <= r.triangle_slack;
  return r;
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kDemand: return "demand";
    case PerturbationKind::kCost: return "cost";
    case PerturbationKind::kJoint: return "joint";
  }
  return "unknown";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  if (s == "demand") return PerturbationKind::kDemand;
  if (s == "cost") return PerturbationKind::kCost;
  if (s == "joint") return PerturbationKind::kJoint;
  throw Error(ErrorCode::kSchema, "unknown perturbation kind '" + s + "'");
}

Perturbation sample_ball(const Game& base, double radius, PerturbationKind kind,
                         std::uint64_t seed) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kDomain, "ball radius must be finite and >= 0");
  }
  Perturbation out{kind, radius, seed, base, MetricValue{}, false};
  if (radius == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t na = base.structure().num_arcs();
  const std::size_t nk = base.structure().num_od();
  std::vector<double> u(nk), shift(na), tilt(na);
  for (auto& v : u) v = sym(rng);
  for (auto& v : shift) v = sym(rng);
  for (auto& v : tilt) v = unit(rng);
  const bool move_demand = kind != PerturbationKind::kCost;
  const bool move_cost = kind != PerturbationKind::kDemand;
  const double t = base.total_demand();

  struct Candidate {
    Game game;
    MetricValue d;
  };
  auto realize = [&](double s) -> std::optional<Candidate> {
    std::vector<double> demands = base.demands();
    if (move_demand) {
      double total = 0.0;
      for (std::size_t k = 0; k < nk; ++k) {
        demands[k] = std::max(0.0, demands[k] + s * u[k]);
        total += demands[k];
      }
      if (total <= 1e-6) return std::nullopt;
    }
    std::vector<CostFunction> costs = base.costs();
    if (move_cost) {
      for (std::size_t a = 0; a < na; ++a) {
        const double floor = -0.5 * costs[a](0.0);
        costs[a] = costs[a].shifted(std::max(s * shift[a], floor), s * tilt[a] / t);
      }
    }
    try {
      Game g(base.structure_ptr(), std::move(costs), std::move(demands));
      MetricValue d = dist(base, g);
      return Candidate{std::move(g), d};
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto inside = [&](const std::optional<Candidate>& c) {
    return c && c->d.value + c->d.error_bound <= radius;
  };
  auto good = [&](const std::optional<Candidate>& c) {
    return inside(c) && c->d.value >= 0.5 * radius;
  };
  auto accept = [&](Candidate c, bool shrunk) {
    out.game = std::move(c.game);
    out.distance = c.d;
    out.shrunk = shrunk;
    return out;
  };

  double lo = 0.0;
  std::optional<Candidate> lo_c;
  double hi = radius;
  std::optional<Candidate> c = realize(hi);
  for (int i = 0; i < 60 && inside(c) && !good(c); ++i) {
    lo = hi;
    lo_c = std::move(c);
    hi *= 2.0;
    c = realize(hi);
  }
  if (good(c)) return accept(std::move(*c), false);
  if (inside(c)) return accept(std::move(*c), true);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    c = realize(mid);
    if (good(c)) return accept(std::move(*c), false);
    if (inside(c)) {
      lo = mid;
      lo_c = std::move(c);
    } else {
      hi = mid;
    }
  }
  if (lo_c) return accept(std::move(*lo_c), true);
  out.shrunk = true;
  return out;
}

}  // namespace congestion
