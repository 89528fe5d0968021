#include "congestion/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "congestion/error.hpp"

namespace congestion {

Structure::Structure(
    std::vector<std::string> arcs, std::vector<std::string> od_ids,
    const std::vector<std::vector<std::vector<std::string>>>& path_sets)
    : arcs_(std::move(arcs)), od_ids_(std::move(od_ids)) {
  if (arcs_.empty()) throw Error(ErrorCode::kSchema, "structure has no arcs");
  if (od_ids_.empty()) throw Error(ErrorCode::kSchema, "structure has no O/D pairs");
  if (path_sets.size() != od_ids_.size()) {
    throw Error(ErrorCode::kSchema, "one path set per O/D pair is required");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    if (!index.emplace(arcs_[a], a).second) {
      throw Error(ErrorCode::kSchema, "duplicate arc id '" + arcs_[a] + "'");
    }
  }
  std::set<std::string> ods(od_ids_.begin(), od_ids_.end());
  if (ods.size() != od_ids_.size()) {
    throw Error(ErrorCode::kSchema, "duplicate O/D pair id");
  }

  std::set<std::vector<std::size_t>> seen;
  std::vector<bool> covered(arcs_.size(), false);
  offsets_.push_back(0);
  for (std::size_t k = 0; k < path_sets.size(); ++k) {
    if (path_sets[k].size() < 2) {
      throw Error(ErrorCode::kBadStructure,
                  "O/D pair '" + od_ids_[k] + "' needs at least two paths");
    }
    for (const auto& p : path_sets[k]) {
      if (p.empty()) {
        throw Error(ErrorCode::kSchema, "empty path in O/D pair '" + od_ids_[k] + "'");
      }
      std::vector<std::size_t> path;
      for (const auto& id : p) {
        auto it = index.find(id);
        if (it == index.end()) {
          throw Error(ErrorCode::kSchema, "path uses unknown arc '" + id + "'");
        }
        path.push_back(it->second);
        covered[it->second] = true;
      }
      std::sort(path.begin(), path.end());
      if (std::adjacent_find(path.begin(), path.end()) != path.end()) {
        throw Error(ErrorCode::kSchema, "path repeats an arc");
      }
      if (!seen.insert(path).second) {
        throw Error(ErrorCode::kSchema,
                    "path appears twice (path sets must be disjoint)");
      }
      paths_.push_back(std::move(path));
      od_of_path_.push_back(k);
    }
    offsets_.push_back(paths_.size());
  }
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    if (!covered[a]) {
      throw Error(ErrorCode::kBadStructure, "arc '" + arcs_[a] + "' lies on no path");
    }
  }
}

std::optional<std::size_t> Structure::arc_index(const std::string& id) const {
  auto it = std::find(arcs_.begin(), arcs_.end(), id);
  if (it == arcs_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - arcs_.begin());
}

bool operator==(const Structure& a, const Structure& b) {
  return a.arcs_ == b.arcs_ && a.od_ids_ == b.od_ids_ && a.paths_ == b.paths_ &&
         a.offsets_ == b.offsets_;
}

Game::Game(StructurePtr structure, std::vector<CostFunction> costs,
           std::vector<double> demands)
    : structure_(std::move(structure)),
      costs_(std::move(costs)),
      demands_(std::move(demands)) {
  if (!structure_) throw Error(ErrorCode::kSchema, "game without structure");
  if (costs_.size() != structure_->num_arcs()) {
    throw Error(ErrorCode::kSchema, "one cost function per arc is required");
  }
  if (demands_.size() != structure_->num_od()) {
    throw Error(ErrorCode::kSchema, "one demand per O/D pair is required");
  }
  for (double d : demands_) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::kDomain, "demands must be finite and >= 0");
    }
    total_ += d;
  }
  if (!(total_ > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "total demand must be positive");
  }
  const double probe = total_ / (4.0 * static_cast<double>(structure_->num_paths()));
  for (std::size_t a = 0; a < costs_.size(); ++a) {
    if (!(costs_[a].eval(probe) > 0.0)) {
      throw Error(ErrorCode::kDegenerate,
                  "cost of arc '" + structure_->arc_id(a) + "' vanishes on (0, T]");
    }
  }
}

Game Game::with_costs(std::vector<CostFunction> costs) const {
  return Game(structure_, std::move(costs), demands_);
}

Game Game::with_demands(std::vector<double> demands) const {
  return Game(structure_, costs_, std::move(demands));
}

void check_feasible(const Game& g, const PathFlow& f) {
  const Structure& st = g.structure();
  if (f.size() != st.num_paths()) {
    throw Error(ErrorCode::kInfeasibleFlow, "flow has the wrong number of paths");
  }
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInfeasibleFlow, "path flows must be finite and >= 0");
    }
  }
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    double sum = 0.0;
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) sum += f[s];
    if (std::abs(sum - g.demands()[k]) > kFeasibilityTol) {
      throw Error(ErrorCode::kInfeasibleFlow,
                  "flow violates the demand of O/D pair '" + st.od_ids()[k] + "'");
    }
  }
}

namespace {

std::vector<double> arc_flows_unchecked(const Game& g, const PathFlow& f) {
  const Structure& st = g.structure();
  std::vector<double> x(st.num_arcs(), 0.0);
  for (std::size_t s = 0; s < st.num_paths(); ++s) {
    for (std::size_t a : st.path(s)) x[a] += f[s];
  }
  return x;
}

std::vector<double> path_costs_from(const Game& g, const std::vector<double>& x) {
  const Structure& st = g.structure();
  std::vector<double> arc_cost(st.num_arcs());
  for (std::size_t a = 0; a < st.num_arcs(); ++a) arc_cost[a] = g.cost(a)(x[a]);
  std::vector<double> c(st.num_paths(), 0.0);
  for (std::size_t s = 0; s < st.num_paths(); ++s) {
    for (std::size_t a : st.path(s)) c[s] += arc_cost[a];
  }
  return c;
}

}  // namespace

std::vector<double> arc_flows(const Game& g, const PathFlow& f) {
  check_feasible(g, f);
  return arc_flows_unchecked(g, f);
}

double path_cost(const Game& g, const PathFlow& f, std::size_t s) {
  if (s >= g.structure().num_paths()) {
    throw Error(ErrorCode::kUnknownPath, "unknown path index " + std::to_string(s));
  }
  const auto x = arc_flows(g, f);
  double c = 0.0;
  for (std::size_t a : g.structure().path(s)) c += g.cost(a)(x[a]);
  return c;
}

std::vector<double> path_costs(const Game& g, const PathFlow& f) {
  return path_costs_from(g, arc_flows(g, f));
}

double total_cost(const Game& g, const PathFlow& f) {
  const auto x = arc_flows(g, f);
  double by_arc = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) by_arc += x[a] * g.cost(a)(x[a]);
  const auto c = path_costs_from(g, x);
  double by_path = 0.0;
  for (std::size_t s = 0; s < c.size(); ++s) by_path += f[s] * c[s];
  if (std::abs(by_arc - by_path) > 1e-9 * std::max(1.0, std::abs(by_arc))) {
    throw Error(ErrorCode::kInvariant, "path and arc forms of the total cost disagree");
  }
  return by_arc;
}

double potential(const Game& g, const PathFlow& f) {
  const auto x = arc_flows(g, f);
  double phi = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) phi += g.cost(a).integral(x[a]);
  return phi;
}

std::vector<double> user_costs(const Game& g, const PathFlow& f) {
  const auto c = path_costs(g, f);
  const Structure& st = g.structure();
  std::vector<double> l(st.num_od());
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    l[k] = *std::min_element(c.begin() + static_cast<std::ptrdiff_t>(st.first_path(k)),
                             c.begin() + static_cast<std::ptrdiff_t>(st.end_path(k)));
  }
  return l;
}

PathFlow uniform_flow(const Game& g) {
  const Structure& st = g.structure();
  PathFlow f(st.num_paths());
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    const double share = g.demands()[k] / static_cast<double>(st.paths_of(k));
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) f[s] = share;
  }
  return f;
}

void require_same_structure(const Game& a, const Game& b) {
  if (a.structure_ptr() != b.structure_ptr() && !(a.structure() == b.structure())) {
    throw Error(ErrorCode::kStructureMismatch, "games have different structures");
  }
}

namespace {

bool same_form(const CostFunction& f, const CostFunction& g, double t) {
  const auto pf = f.polynomial_on(t);
  const auto pg = g.polynomial_on(t);
  if (pf && pg) {
    std::vector<double> a = *pf, b = *pg;
    const std::size_t n = std::max(a.size(), b.size());
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    return a == b;
  }
  if (f.form().index() != g.form().index()) return false;
  if (const auto* m = std::get_if<MonomialLog>(&f.form())) {
    const auto& o = std::get<MonomialLog>(g.form());
    return m->zeta == o.zeta && m->beta == o.beta && m->alpha == o.alpha;
  }
  if (const auto* p = std::get_if<PiecewiseLinear>(&f.form())) {
    const auto& o = std::get<PiecewiseLinear>(g.form());
    return p->breakpoints == o.breakpoints && p->values == o.values;
  }
  if (const auto* b = std::get_if<Bpr>(&f.form())) {
    const auto& o = std::get<Bpr>(g.form());
    return b->q == o.q && b->beta == o.beta && b->p == o.p;
  }
  return false;
}

}  // namespace

bool games_equivalent(const Game& a, const Game& b, std::size_t samples) {
  require_same_structure(a, b);
  if (a.demands() != b.demands()) return false;
  const double t = a.total_demand();
  if (samples < 2) samples = 2;
  for (std::size_t i = 0; i < a.costs().size(); ++i) {
    const CostFunction& f = a.cost(i);
    const CostFunction& g = b.cost(i);
    if (same_form(f, g, t)) continue;
    for (std::size_t j = 0; j < samples; ++j) {
      const double x = t * static_cast<double>(j) / static_cast<double>(samples - 1);
      const double u = f(x), v = g(x);
      if (std::abs(u - v) > 1e-12 * (1.0 + std::abs(u))) return false;
    }
  }
  return true;
}

}  // namespace congestion
