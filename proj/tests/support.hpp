#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "congestion/cost_function.hpp"
#include "congestion/game.hpp"

namespace congestion::testing {

using Paths = std::vector<std::vector<std::vector<std::string>>>;

inline StructurePtr make_structure(std::vector<std::string> arcs, std::vector<std::string> ods,
                                   const Paths& paths) {
  return std::make_shared<const Structure>(std::move(arcs), std::move(ods), paths);
}

// Two parallel single-arc paths between one O/D pair.
inline StructurePtr parallel2() {
  return make_structure({"a", "b"}, {"st"}, {{{"a"}, {"b"}}});
}

inline StructurePtr parallel3() {
  return make_structure({"a", "b", "c"}, {"st"}, {{{"a"}, {"b"}, {"c"}}});
}

// Braess network: s-v-t, s-w-t and the zig-zag s-v-w-t.
inline StructurePtr braess() {
  return make_structure({"sv", "vt", "sw", "wt", "vw"}, {"st"},
                        {{{"sv", "vt"}, {"sw", "wt"}, {"sv", "vw", "wt"}}});
}

// Two O/D pairs sharing arc "c".
inline StructurePtr shared_arc() {
  return make_structure({"a", "b", "c", "d"}, {"k1", "k2"}, {{{"a"}, {"b", "c"}}, {{"c"}, {"d"}}});
}

inline Game pigou(double demand = 1.0) {
  return Game(parallel2(), {CostFunction::affine(1.0, 0.0), CostFunction::constant(1.0)},
              {demand});
}

// x versus x + eps on two parallel links.
inline Game shifted_pair(double eps, double demand = 1.0) {
  return Game(parallel2(), {CostFunction::affine(1.0, 0.0), CostFunction::affine(1.0, eps)},
              {demand});
}

inline std::vector<StructurePtr> all_structures() {
  return {parallel2(), parallel3(), braess(), shared_arc()};
}

// Random cost with convex x * f(x), so social optima are certified.
inline CostFunction random_convex_cost(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::uniform_int_distribution<int> pick(0, 4);
  switch (pick(rng)) {
    case 0: return CostFunction::affine(u(rng), u(rng));
    case 1: return CostFunction::polynomial({u(rng), u(rng), u(rng) * 0.5, u(rng) * 0.2});
    case 2: return CostFunction::bpr(u(rng), 1.0 + 3.0 * std::uniform_real_distribution<double>()(rng), u(rng));
    case 3: return CostFunction::monomial_log(u(rng), 1.0 + std::uniform_real_distribution<double>()(rng),
                                              std::uniform_real_distribution<double>()(rng));
    default: return CostFunction::constant(u(rng));
  }
}

// Random cost from every family, including piecewise-linear ones.
inline CostFunction random_cost(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 5);
  if (pick(rng) == 5) {
    std::vector<double> b{0.0}, v{u(rng)};
    const int n = 1 + static_cast<int>(u(rng) * 2);
    for (int i = 0; i < n; ++i) {
      b.push_back(b.back() + 0.2 + u(rng));
      v.push_back(v.back() + u(rng));
    }
    return CostFunction::piecewise_linear(b, v);
  }
  CostFunction c = random_convex_cost(rng);
  return u(rng) < 1.0 ? c : c.shifted(0.5 * u(rng), 0.5 * u(rng));
}

inline Game random_game(std::mt19937_64& rng, bool convex = true, StructurePtr st = nullptr) {
  if (!st) {
    auto all = all_structures();
    st = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
  }
  std::uniform_real_distribution<double> dem(0.2, 2.0);
  for (;;) {
    std::vector<CostFunction> costs;
    for (std::size_t a = 0; a < st->num_arcs(); ++a) {
      costs.push_back(convex ? random_convex_cost(rng) : random_cost(rng));
    }
    std::vector<double> d;
    for (std::size_t k = 0; k < st->num_od(); ++k) d.push_back(dem(rng));
    try {
      return Game(st, std::move(costs), std::move(d));
    } catch (const std::exception&) {
      // Positivity can fail for a piecewise-linear cost that is 0 near 0.
    }
  }
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Dense-grid maximum of |f - g| on [0, t].
inline double dense_sup(const CostFunction& f, const CostFunction& g, double t, int n = 1000000) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = t * i / n;
    best = std::max(best, std::abs(f(x) - g(x)));
  }
  return best;
}

// Minimizes phi over [0, 1] on a uniform grid, then refines around the best
// grid point.
inline std::pair<double, double> grid_min_1d(const std::function<double(double)>& phi,
                                             int n = 100000) {
  double bx = 0.0, bv = phi(0.0);
  for (int i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    const double v = phi(x);
    if (v < bv) {
      bv = v;
      bx = x;
    }
  }
  double lo = std::max(0.0, bx - 1.0 / n), hi = std::min(1.0, bx + 1.0 / n);
  for (int r = 0; r < 3; ++r) {
    const int m = 2000;
    double cx = bx;
    for (int i = 0; i <= m; ++i) {
      const double x = lo + (hi - lo) * i / m;
      const double v = phi(x);
      if (v < bv) {
        bv = v;
        cx = x;
      }
    }
    const double w = (hi - lo) / m;
    bx = cx;
    lo = std::max(0.0, bx - w);
    hi = std::min(1.0, bx + w);
  }
  return {bx, bv};
}

}  // namespace congestion::testing
