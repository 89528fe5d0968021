#include "congestion/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "congestion/equilibrium.hpp"
#include "congestion/error.hpp"
#include "congestion/metric.hpp"
#include "congestion/transforms.hpp"
#include "parallel.hpp"

namespace congestion {

std::vector<double> DemandSchedule::demands_at(std::size_t n) const {
  const double t = totals.at(n);
  std::vector<double> w = direction;
  if (pattern == DemandPattern::kDriftingRatio) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] *= 1.0 + 0.5 * std::sin(static_cast<double>(n + 3 * k));
    }
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v *= t / sum;
  return w;
}

DemandSchedule schedule_for(const Game& g, std::vector<double> totals,
                            DemandPattern pattern) {
  DemandSchedule s;
  s.direction = g.demands();
  for (double& d : s.direction) d /= g.total_demand();
  s.totals = std::move(totals);
  s.pattern = pattern;
  for (double t : s.totals) {
    if (!(t > 0.0)) throw Error(ErrorCode::kDomain, "schedule totals must be positive");
  }
  return s;
}

double light_traffic_constant(const Game& g0, double b) {
  double tau0 = INFINITY, m = 0.0;
  for (const auto& c : g0.costs()) {
    tau0 = std::min(tau0, c(0.0));
    m = std::max(m, c.lipschitz_on(b));
  }
  if (!(tau0 > 0.0)) {
    throw Error(ErrorCode::kPrecondition, "light-traffic bound needs every cost positive at 0");
  }
  if (!std::isfinite(m)) {
    throw Error(ErrorCode::kPrecondition, "light-traffic bound needs Lipschitz costs");
  }
  const double na = static_cast<double>(g0.structure().num_arcs());
  const double nk = static_cast<double>(g0.structure().num_od());
  return 8.0 * na * (nk + 1.0) / tau0 * m;
}

std::vector<RatePoint> converge_down(const Game& g0, const DemandSchedule& schedule,
                                     double tol) {
  if (schedule.totals.empty()) return {};
  const double b = *std::max_element(schedule.totals.begin(), schedule.totals.end());
  const double k = light_traffic_constant(g0, b);
  double m = 0.0;
  for (const auto& c : g0.costs()) m = std::max(m, c.lipschitz_on(b));
  const double na = static_cast<double>(g0.structure().num_arcs());
  const double nk = static_cast<double>(g0.structure().num_od());

  std::vector<RatePoint> out(schedule.totals.size());
  detail::parallel_for(out.size(), 0, [&](std::size_t n) {
    RatePoint& p = out[n];
    p.total = schedule.totals[n];
    const Game g = g0.with_demands(schedule.demands_at(n));
    const Game unit = demand_normalize(g, p.total);
    p.poa_minus_one = poa(unit, tol) - 1.0;
    p.poa_direct = poa(g, tol * p.total);

    std::vector<CostFunction> frozen;
    for (const auto& c : g.costs()) frozen.push_back(CostFunction::constant(c(0.0)));
    const Game limit = unit.with_costs(std::move(frozen));
    const MetricValue d = dist(unit, limit);
    p.reduction_dist = d.value;
    p.reduction_bound = m * p.total;

    // Exponent-1 certificate at the constant-cost limit; its radius uses
    // tau_min(0) as a lower bound for the limit's optimal cost.
    double tau0 = INFINITY;
    for (const auto& c : g.costs()) tau0 = std::min(tau0, c(0.0));
    const double radius = std::min(1.0 / (2.0 * nk), tau0 / (8.0 * na * (nk + 1.0)));
    p.within_radius = d.value + d.error_bound <= radius;
    p.bound = k * p.total;
  });
  return out;
}

namespace {

struct RegularVariation {
  double beta = 0.0;
  double alpha = 0.0;
  double lead = 0.0;
  bool monomial_log = false;
};

std::optional<RegularVariation> regular_variation(const CostFunction& c) {
  if (const auto* f = std::get_if<Constant>(&c.form())) {
    return RegularVariation{0.0, 0.0, f->c, false};
  }
  if (const auto* f = std::get_if<Affine>(&c.form())) {
    if (f->slope > 0.0) return RegularVariation{1.0, 0.0, f->slope, false};
    return RegularVariation{0.0, 0.0, f->intercept, false};
  }
  if (const auto* f = std::get_if<Polynomial>(&c.form())) {
    for (std::size_t i = f->coefficients.size(); i-- > 0;) {
      if (f->coefficients[i] > 0.0) {
        return RegularVariation{static_cast<double>(i), 0.0, f->coefficients[i], false};
      }
    }
    return RegularVariation{0.0, 0.0, 0.0, false};
  }
  if (const auto* f = std::get_if<Bpr>(&c.form())) {
    if (f->q > 0.0 && f->beta > 0.0) return RegularVariation{f->beta, 0.0, f->q, false};
    return RegularVariation{0.0, 0.0, f->q + f->p, false};
  }
  if (const auto* f = std::get_if<MonomialLog>(&c.form())) {
    return RegularVariation{f->beta, f->alpha, f->zeta, true};
  }
  return std::nullopt;
}

Game limit_game(const Game& unit, const HeavyTrafficSetup& s) {
  std::vector<CostFunction> costs;
  for (double l : s.lambda) costs.push_back(CostFunction::bpr(l, s.beta, 0.0));
  return unit.with_costs(std::move(costs));
}

}  // namespace

HeavyTrafficSetup heavy_traffic_setup(const Game& g0, double tol) {
  const Structure& st = g0.structure();
  std::vector<RegularVariation> rv;
  for (const auto& c : g0.costs()) {
    auto r = regular_variation(c);
    if (!r) {
      throw Error(ErrorCode::kPrecondition,
                  "heavy-traffic rate needs polynomial, BPR or monomial-log costs");
    }
    rv.push_back(*r);
  }
  HeavyTrafficSetup s;
  s.beta = rv.front().beta;
  s.alpha = rv.front().alpha;
  s.monomial_log = true;
  for (const auto& r : rv) {
    if (r.beta != s.beta || r.alpha != s.alpha || !(r.lead > 0.0)) {
      throw Error(ErrorCode::kPrecondition,
                  "costs do not share a regular variation index; the price of "
                  "anarchy need not converge to 1");
    }
    s.monomial_log = s.monomial_log && r.monomial_log;
  }
  if (!(s.beta > 0.0)) {
    throw Error(ErrorCode::kPrecondition, "heavy-traffic rate needs index beta > 0");
  }
  s.reference = static_cast<std::size_t>(
      std::min_element(st.arcs().begin(), st.arcs().end()) - st.arcs().begin());
  double lmin = INFINITY, lmax = 0.0;
  for (const auto& r : rv) {
    s.lambda.push_back(r.lead / rv[s.reference].lead);
    lmin = std::min(lmin, s.lambda.back());
    lmax = std::max(lmax, s.lambda.back());
  }
  const double na = static_cast<double>(st.num_arcs());
  s.constant = 2.0 * (1.0 + std::sqrt(na * s.beta * lmax) + 2.0) / lmin * na;
  const Game unit = demand_normalize(g0, g0.total_demand());
  SolveOptions opts;
  opts.tol = tol;
  s.c_star_limit = solve_so(limit_game(unit, s), opts).total_cost;
  s.radius = s.c_star_limit / (2.0 * na);
  return s;
}

std::vector<RatePoint> converge_up(const Game& g0, const DemandSchedule& schedule,
                                   double tol) {
  const HeavyTrafficSetup s = heavy_traffic_setup(g0, tol);
  const double na = static_cast<double>(g0.structure().num_arcs());
  const double lmax = *std::max_element(s.lambda.begin(), s.lambda.end());

  std::vector<RatePoint> out(schedule.totals.size());
  detail::parallel_for(out.size(), 0, [&](std::size_t n) {
    RatePoint& p = out[n];
    const double t = schedule.totals[n];
    p.total = t;
    const Game g = g0.with_demands(schedule.demands_at(n));
    const double scale = g.cost(s.reference)(t);
    const Game hat = cost_normalize(demand_normalize(g, t), scale);
    p.poa_minus_one = poa(hat, tol) - 1.0;
    p.poa_direct = poa(g, tol * t * scale);

    const Game limit = limit_game(hat, s);
    double w = 0.0, err = 0.0;
    for (std::size_t a = 0; a < hat.costs().size(); ++a) {
      const SupDistance d = sup_distance(hat.cost(a), limit.cost(a), 1.0);
      w = std::max(w, d.estimate);
      err = std::max(err, d.error_bound);
    }
    p.w = w;
    p.w_error = err;
    SolveOptions opts;
    opts.tol = tol;
    const double radius = solve_so(limit, opts).total_cost / (2.0 * na);
    if (w + err <= radius) p.bound = s.constant * std::sqrt(w + err);
    if (s.monomial_log && s.alpha > 0.0) {
      const double wc = s.alpha / s.beta * t / (t + 1.0) / std::log(t + 1.0) * lmax;
      p.w_closed = wc;
      if (wc <= radius) p.ln_bound = s.constant * std::sqrt(wc);
    }
  });
  return out;
}

RateFit fit_rate(const std::vector<RatePoint>& points, RateDirection direction,
                 double tol) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.poa_minus_one > 10.0 * tol)) continue;
    x.push_back(direction == RateDirection::kDown ? p.total : 1.0 / std::log(p.total + 1.0));
    y.push_back(p.poa_minus_one);
  }
  RateFit r;
  if (x.size() < 4) {
    r.degenerate = true;
    return r;
  }
  r.fit = fit_loglog(x, y);
  return r;
}

}  // namespace congestion
