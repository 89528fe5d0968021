#pragma once

#include <cstdint>
#include <string>

#include "congestion/game.hpp"

namespace congestion {

struct MetricValue {
  double value = 0.0;        // max(demand_part, cost_part)
  double demand_part = 0.0;  // ||d - d'||_inf
  double cost_part = 0.0;    // max(sup_part, endpoint_part)
  double sup_part = 0.0;     // max_a sup_{[0, min(T, T')]} |tau_a - sigma_a|
  double endpoint_part = 0.0;  // ||tau(T) - sigma(T')||_inf
  // The true distance lies in [value, value + error_bound].
  double error_bound = 0.0;
};

// Distance on the generalized game space. Error(kStructureMismatch) if the
// structures differ.
MetricValue dist(const Game& a, const Game& b, std::size_t grid_n = kDefaultGrid);

// The operator that compares costs on all of [0, max(T, T')]. It is not a
// metric; kept for the counterexample tests.
MetricValue naive_dist(const Game& a, const Game& b, std::size_t grid_n = kDefaultGrid);

struct AxiomReport {
  bool symmetric = false;
  bool nonnegative = false;
  bool identity = false;  // dist(g1, g2) == 0 iff g1 and g2 are equivalent
  bool triangle = false;  // dist(g1, g2) <= dist(g1, g3) + dist(g3, g2)
  double triangle_excess = 0.0;  // lhs - rhs
  double triangle_slack = 0.0;   // certified grid error allowance
  bool all() const { return symmetric && nonnegative && identity && triangle; }
};

AxiomReport check_metric_axioms(const Game& g1, const Game& g2, const Game& g3);

enum class PerturbationKind { kDemand, kCost, kJoint };

std::string to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(const std::string& s);

struct Perturbation {
  PerturbationKind kind;
  double target = 0.0;
  std::uint64_t seed = 0;
  Game game;
  MetricValue distance;
  // Set when the sampler could not land in [target / 2, target] and returned
  // a smaller certified perturbation.
  bool shrunk = false;
};

// Draws a game within certified distance `radius` of `base` (distance plus
// grid error bound <= radius). Deterministic in `seed`.
Perturbation sample_ball(const Game& base, double radius, PerturbationKind kind,
                         std::uint64_t seed);

}  // namespace congestion
