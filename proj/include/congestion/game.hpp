#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "congestion/cost_function.hpp"

namespace congestion {

// Arcs, O/D pairs and explicit path sets. Paths are stored flat: the paths of
// O/D pair k occupy the index range [first_path(k), end_path(k)).
class Structure {
 public:
  // path_sets[k][j] lists the arc ids of the j-th path of O/D pair k.
  // Throws Error(kSchema) for malformed input and Error(kBadStructure) when an
  // arc lies on no path or an O/D pair has fewer than two paths.
  Structure(std::vector<std::string> arcs, std::vector<std::string> od_ids,
            const std::vector<std::vector<std::vector<std::string>>>& path_sets);

  std::size_t num_arcs() const { return arcs_.size(); }
  std::size_t num_od() const { return od_ids_.size(); }
  std::size_t num_paths() const { return paths_.size(); }

  const std::vector<std::string>& arcs() const { return arcs_; }
  const std::vector<std::string>& od_ids() const { return od_ids_; }
  const std::string& arc_id(std::size_t a) const { return arcs_.at(a); }
  std::optional<std::size_t> arc_index(const std::string& id) const;

  // Sorted arc indices of path s.
  const std::vector<std::size_t>& path(std::size_t s) const { return paths_.at(s); }
  std::size_t od_of_path(std::size_t s) const { return od_of_path_.at(s); }
  std::size_t first_path(std::size_t k) const { return offsets_.at(k); }
  std::size_t end_path(std::size_t k) const { return offsets_.at(k + 1); }
  std::size_t paths_of(std::size_t k) const { return end_path(k) - first_path(k); }

  friend bool operator==(const Structure& a, const Structure& b);

 private:
  std::vector<std::string> arcs_;
  std::vector<std::string> od_ids_;
  std::vector<std::vector<std::size_t>> paths_;
  std::vector<std::size_t> od_of_path_;
  std::vector<std::size_t> offsets_;
};

using StructurePtr = std::shared_ptr<const Structure>;

// A game (tau, d) over a shared structure.
class Game {
 public:
  // Throws Error(kDegenerate) when T(d) <= 0 or a cost vanishes at the probe
  // point T(d) / (4|S|); costs are non-decreasing, so one probe covers (0, T].
  Game(StructurePtr structure, std::vector<CostFunction> costs,
       std::vector<double> demands);

  const Structure& structure() const { return *structure_; }
  const StructurePtr& structure_ptr() const { return structure_; }
  const std::vector<CostFunction>& costs() const { return costs_; }
  const CostFunction& cost(std::size_t a) const { return costs_.at(a); }
  const std::vector<double>& demands() const { return demands_; }
  double total_demand() const { return total_; }

  Game with_costs(std::vector<CostFunction> costs) const;
  Game with_demands(std::vector<double> demands) const;

 private:
  StructurePtr structure_;
  std::vector<CostFunction> costs_;
  std::vector<double> demands_;
  double total_ = 0.0;
};

// Per-path flow f_s, indexed like Structure paths.
using PathFlow = std::vector<double>;

inline constexpr double kFeasibilityTol = 1e-9;

// Throws Error(kInfeasibleFlow) unless f >= 0 and every O/D constraint holds to
// kFeasibilityTol.
void check_feasible(const Game& g, const PathFlow& f);

std::vector<double> arc_flows(const Game& g, const PathFlow& f);
// tau_s(f) for the path with flat index s; Error(kUnknownPath) if out of range.
double path_cost(const Game& g, const PathFlow& f, std::size_t s);
std::vector<double> path_costs(const Game& g, const PathFlow& f);
// C(f) = sum_a f_a tau_a(f_a); cross-checked against sum_s f_s tau_s(f).
double total_cost(const Game& g, const PathFlow& f);
// Beckmann potential sum_a int_0^{f_a} tau_a.
double potential(const Game& g, const PathFlow& f);
// L_k(f) = min over paths of k of tau_s(f).
std::vector<double> user_costs(const Game& g, const PathFlow& f);

// Uniform split of each demand over its paths.
PathFlow uniform_flow(const Game& g);

void require_same_structure(const Game& a, const Game& b);

// Equal demands and costs that agree on [0, T(d)]. Identical parametric forms
// are matched directly; otherwise costs are compared on `samples` grid points.
bool games_equivalent(const Game& a, const Game& b, std::size_t samples = 1025);

}  // namespace congestion
