#include "congestion/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/minima.hpp>

#include "congestion/error.hpp"

namespace congestion {
namespace {

enum class Target { kEquilibrium, kOptimum };

// Per-arc gradient and objective of the program being minimized: the
// Beckmann potential for WE, the total cost for SO.
struct Program {
  const Game& game;
  Target target;

  double grad(std::size_t a, double x) const {
    x = std::max(x, 0.0);
    return target == Target::kEquilibrium ? game.cost(a)(x)
                                          : game.cost(a).marginal(x);
  }
  double value(std::size_t a, double x) const {
    x = std::max(x, 0.0);
    return target == Target::kEquilibrium ? game.cost(a).integral(x)
                                          : x * game.cost(a)(x);
  }
  double objective(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) v += value(a, x[a]);
    return v;
  }
};

std::vector<double> flows_of(const Structure& st, const PathFlow& f) {
  std::vector<double> x(st.num_arcs(), 0.0);
  for (std::size_t s = 0; s < st.num_paths(); ++s) {
    for (std::size_t a : st.path(s)) x[a] += f[s];
  }
  return x;
}

std::vector<double> path_grads(const Program& p, const std::vector<double>& x) {
  const Structure& st = p.game.structure();
  std::vector<double> ga(st.num_arcs());
  for (std::size_t a = 0; a < ga.size(); ++a) ga[a] = p.grad(a, x[a]);
  std::vector<double> c(st.num_paths(), 0.0);
  for (std::size_t s = 0; s < st.num_paths(); ++s) {
    for (std::size_t a : st.path(s)) c[s] += ga[a];
  }
  return c;
}

double gap_of(const Structure& st, const PathFlow& f, const std::vector<double>& c) {
  double gap = 0.0;
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    double lk = c[st.first_path(k)];
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) lk = std::min(lk, c[s]);
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) gap += (c[s] - lk) * f[s];
  }
  return gap;
}

template <class F>
double golden_min(F phi, double hi) {
  auto r = boost::math::tools::brent_find_minima(phi, 0.0, hi,
                                                 std::numeric_limits<double>::digits / 2);
  return r.first;
}

struct RunResult {
  PathFlow flow;
  double gap;
  int iterations;
  bool converged;
  std::vector<TracePoint> trace;
};

// Moves flow between the costliest used path and the cheapest path of each
// O/D pair in turn. With a monotone gradient the step solves the 1-D
// optimality condition exactly; otherwise it minimizes the objective along
// the transfer direction.
RunResult run_path_transfer(const Program& p, PathFlow f, const SolveOptions& opts,
                            bool monotone) {
  const Structure& st = p.game.structure();
  RunResult out{};
  std::vector<double> x = flows_of(st, f);
  std::vector<std::size_t> plus, minus;
  for (int it = 0;; ++it) {
    x = flows_of(st, f);
    const auto c = path_grads(p, x);
    const double gap = gap_of(st, f, c);
    if (opts.keep_trace) out.trace.push_back({it, gap, p.objective(x)});
    out.gap = gap;
    out.iterations = it;
    if (gap <= opts.tol) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;

    bool moved = false;
    for (std::size_t k = 0; k < st.num_od(); ++k) {
      const auto cs = path_grads(p, x);
      std::size_t lo = st.first_path(k), hi = st.end_path(k);
      std::size_t smin = lo;
      std::size_t smax = hi;
      for (std::size_t s = lo; s < hi; ++s) {
        if (cs[s] < cs[smin]) smin = s;
        if (f[s] > 0.0 && (smax == hi || cs[s] > cs[smax])) smax = s;
      }
      if (smax == hi || !(cs[smax] > cs[smin])) continue;

      plus.clear();
      minus.clear();
      std::set_difference(st.path(smin).begin(), st.path(smin).end(),
                          st.path(smax).begin(), st.path(smax).end(),
                          std::back_inserter(plus));
      std::set_difference(st.path(smax).begin(), st.path(smax).end(),
                          st.path(smin).begin(), st.path(smin).end(),
                          std::back_inserter(minus));
      const double cap = f[smax];
      double step;
      if (monotone) {
        auto h = [&](double d) {
          double v = 0.0;
          for (std::size_t a : plus) v += p.grad(a, x[a] + d);
          for (std::size_t a : minus) v -= p.grad(a, x[a] - d);
          return v;
        };
        if (h(cap) <= 0.0) {
          step = cap;
        } else if (h(0.0) >= 0.0) {
          step = 0.0;
        } else {
          std::uintmax_t iters = 200;
          auto r = boost::math::tools::toms748_solve(
              h, 0.0, cap, boost::math::tools::eps_tolerance<double>(52), iters);
          step = 0.5 * (r.first + r.second);
        }
      } else {
        auto phi = [&](double d) {
          double v = 0.0;
          for (std::size_t a : plus) v += p.value(a, x[a] + d);
          for (std::size_t a : minus) v += p.value(a, x[a] - d);
          return v;
        };
        step = golden_min(phi, cap);
        if (!(phi(step) < phi(0.0))) step = 0.0;
        if (phi(cap) < phi(step)) step = cap;
      }
      if (step <= 0.0) continue;
      moved = true;
      if (step >= cap) {
        f[smin] += cap;
        f[smax] = 0.0;
      } else {
        f[smin] += step;
        f[smax] -= step;
      }
      for (std::size_t a : plus) x[a] += step;
      for (std::size_t a : minus) x[a] = std::max(0.0, x[a] - step);
    }
    if (!moved) {
      // No pairwise move can reduce the objective at double precision.
      out.iterations = it + 1;
      break;
    }
  }
  out.flow = std::move(f);
  return out;
}

PathFlow all_or_nothing(const Structure& st, const Game& g, const std::vector<double>& c) {
  PathFlow y(st.num_paths(), 0.0);
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    std::size_t best = st.first_path(k);
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) {
      if (c[s] < c[best]) best = s;
    }
    y[best] = g.demands()[k];
  }
  return y;
}

RunResult run_frank_wolfe(const Program& p, PathFlow f, const SolveOptions& opts) {
  const Structure& st = p.game.structure();
  RunResult out{};
  for (int it = 0;; ++it) {
    const auto x = flows_of(st, f);
    const auto c = path_grads(p, x);
    const PathFlow y = all_or_nothing(st, p.game, c);
    double gap = 0.0;
    for (std::size_t s = 0; s < f.size(); ++s) gap += c[s] * (f[s] - y[s]);
    gap = std::max(gap, 0.0);
    if (opts.keep_trace) out.trace.push_back({it, gap, p.objective(x)});
    out.gap = gap;
    out.iterations = it;
    if (gap <= opts.tol) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;
    const auto xy = flows_of(st, y);
    auto phi = [&](double t) {
      std::vector<double> z(x.size());
      for (std::size_t a = 0; a < x.size(); ++a) z[a] = x[a] + t * (xy[a] - x[a]);
      return p.objective(z);
    };
    double t = golden_min(phi, 1.0);
    if (!(phi(t) < phi(0.0))) t = 2.0 / (it + 2.0);
    for (std::size_t s = 0; s < f.size(); ++s) f[s] += t * (y[s] - f[s]);
  }
  out.flow = std::move(f);
  return out;
}

SolveReport finish(const Game& g, const RunResult& r, bool certified) {
  SolveReport rep;
  rep.flow = r.flow;
  rep.arc_flow = arc_flows(g, r.flow);
  rep.total_cost = total_cost(g, r.flow);
  rep.user_costs = user_costs(g, r.flow);
  rep.duality_gap = r.gap;
  rep.iterations = r.iterations;
  rep.converged = r.converged;
  rep.optimality_certified = certified;
  rep.trace = r.trace;
  return rep;
}

RunResult run(const Program& p, PathFlow start, const SolveOptions& opts, bool monotone) {
  if (opts.method == SolverMethod::kFrankWolfe) {
    return run_frank_wolfe(p, std::move(start), opts);
  }
  return run_path_transfer(p, std::move(start), opts, monotone);
}

PathFlow starting_flow(const Game& g, const SolveOptions& opts) {
  if (opts.start) {
    check_feasible(g, *opts.start);
    return *opts.start;
  }
  return uniform_flow(g);
}

PathFlow dirichlet_flow(const Game& g, std::mt19937_64& rng) {
  const Structure& st = g.structure();
  std::exponential_distribution<double> expo(1.0);
  PathFlow f(st.num_paths());
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    double sum = 0.0;
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) sum += f[s] = expo(rng);
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) {
      f[s] *= g.demands()[k] / sum;
    }
  }
  return f;
}

}  // namespace

SolveReport solve_we(const Game& g, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::kPrecondition, "tol must be positive");
  const Program p{g, Target::kEquilibrium};
  return finish(g, run(p, starting_flow(g, opts), opts, true), true);
}

SolveReport solve_so(const Game& g, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::kPrecondition, "tol must be positive");
  const Program p{g, Target::kOptimum};
  const double t = g.total_demand();
  bool convex = true;
  for (const auto& c : g.costs()) {
    if (!marginal(c).nondecreasing_on(t)) {
      convex = false;
      break;
    }
  }
  if (convex) return finish(g, run(p, starting_flow(g, opts), opts, true), true);

  std::mt19937_64 rng(opts.seed);
  RunResult best = run(p, starting_flow(g, opts), opts, false);
  double best_cost = total_cost(g, best.flow);
  for (int i = 0; i < 8; ++i) {
    RunResult r = run(p, dirichlet_flow(g, rng), opts, false);
    const double c = total_cost(g, r.flow);
    if (c < best_cost) {
      best_cost = c;
      best = std::move(r);
    }
  }
  return finish(g, best, false);
}

OptimumBounds optimum_bounds(const Game& g) {
  const double t = g.total_demand();
  const double ns = static_cast<double>(g.structure().num_paths());
  const double na = static_cast<double>(g.structure().num_arcs());
  double lo = INFINITY, hi = 0.0;
  for (const auto& c : g.costs()) {
    lo = std::min(lo, c(t / ns));
    hi = std::max(hi, c(t));
  }
  OptimumBounds b;
  b.lower = t / ns * lo;
  b.upper = na * t * hi;
  b.poa_upper = na * ns * hi / lo;
  return b;
}

PoaReport poa_report(const Game& g, double tol) {
  SolveOptions opts;
  opts.tol = tol;
  PoaReport rep;
  rep.we = solve_we(g, opts);
  if (!rep.we.converged) {
    throw Error(ErrorCode::kUnconverged, "equilibrium solve did not converge");
  }
  rep.so = solve_so(g, opts);
  if (!rep.so.optimality_certified) {
    SolveOptions from_we = opts;
    from_we.start = rep.we.flow;
    SolveReport alt = solve_so(g, from_we);
    if (alt.total_cost < rep.so.total_cost) rep.so = std::move(alt);
  }
  if (!rep.so.converged && rep.so.optimality_certified) {
    throw Error(ErrorCode::kUnconverged, "social optimum solve did not converge");
  }
  rep.poa = rep.we.total_cost / rep.so.total_cost;
  if (rep.poa < 1.0 - 10.0 * tol) {
    throw Error(ErrorCode::kInvariant, "price of anarchy below 1");
  }
  const OptimumBounds b = optimum_bounds(g);
  if (rep.poa > b.poa_upper * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kInvariant, "price of anarchy above the cost sandwich bound");
  }
  return rep;
}

double poa(const Game& g, double tol) { return poa_report(g, tol).poa; }

double approximation_threshold(const Game& g, const PathFlow& f) {
  const auto c = path_costs(g, f);
  return gap_of(g.structure(), f, c);
}

ApproximationReport check_approximation(const Game& g, const PathFlow& f, const PathFlow& ft,
                          double eps, double m) {
  auto le = [](double lhs, double rhs) {
    return lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
  };
  const Structure& st = g.structure();
  const double na = static_cast<double>(st.num_arcs());
  const double t = g.total_demand();
  ApproximationReport r;

  const auto c = path_costs(g, f);
  const auto l = user_costs(g, f);
  r.a = true;
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    double sum = 0.0;
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) sum += f[s] * c[s];
    const double excess = sum - g.demands()[k] * l[k];
    r.od_excess.push_back(excess);
    r.a = r.a && le(0.0, excess) && le(excess, eps);
  }

  // The solved equilibrium minimizes the potential only up to its own gap.
  r.potential_gap = potential(g, f) - potential(g, ft);
  r.b = le(-1e-9, r.potential_gap) && le(r.potential_gap, eps);

  const double root = std::sqrt(m * eps);
  const auto x = arc_flows(g, f);
  const auto xt = arc_flows(g, ft);
  for (std::size_t a = 0; a < x.size(); ++a) {
    r.max_arc_cost_gap = std::max(r.max_arc_cost_gap, std::abs(g.cost(a)(x[a]) - g.cost(a)(xt[a])));
  }
  r.c_arc = le(r.max_arc_cost_gap, root);

  const auto lt = user_costs(g, ft);
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    r.max_user_cost_gap = std::max(r.max_user_cost_gap, std::abs(lt[k] - l[k]));
  }
  r.c_user = le(r.max_user_cost_gap, na * root);

  r.cost_gap = std::abs(total_cost(g, f) - total_cost(g, ft));
  r.c_cost = le(r.cost_gap, na * root * t + eps);
  return r;
}

}  // namespace congestion
