#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "congestion/game.hpp"

namespace congestion {

enum class SolverMethod {
  // Gauss-Seidel sweeps over O/D pairs; each step moves flow from the costliest
  // used path to the cheapest path with an exact line search.
  kPathTransfer,
  // Classic Frank-Wolfe: all-or-nothing direction, golden-section line search,
  // 2/(i+2) fallback step.
  kFrankWolfe,
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  SolverMethod method = SolverMethod::kPathTransfer;
  std::optional<PathFlow> start;
  std::uint64_t seed = 0;  // multistart seed for non-convex social optima
  bool keep_trace = false;
};

struct TracePoint {
  int iteration;
  double gap;
  double objective;
};

struct SolveReport {
  PathFlow flow;
  std::vector<double> arc_flow;
  double total_cost = 0.0;
  std::vector<double> user_costs;  // L_k
  // Frank-Wolfe gap; for WE solves it equals the approximation threshold.
  double duality_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  bool optimality_certified = true;
  std::vector<TracePoint> trace;
};

SolveReport solve_we(const Game& g, const SolveOptions& opts = {});
SolveReport solve_so(const Game& g, const SolveOptions& opts = {});

struct OptimumBounds {
  double lower;  // (T/|S|) min_a tau_a(T/|S|)
  double upper;  // |A| T max_a tau_a(T)
  double poa_upper;
};

OptimumBounds optimum_bounds(const Game& g);

struct PoaReport {
  double poa = 1.0;
  SolveReport we;
  SolveReport so;
};

// Throws Error(kUnconverged) if a solve fails and Error(kInvariant) if rho
// leaves [1 - 10 tol, optimum sandwich upper bound].
PoaReport poa_report(const Game& g, double tol = 1e-10);
double poa(const Game& g, double tol = 1e-10);

// sum_k sum_{s in S_k} (tau_s(f) - L_k(f)) f_s.
double approximation_threshold(const Game& g, const PathFlow& f);

struct ApproximationReport {
  std::vector<double> od_excess;  // sum_s f_s tau_s - d_k min tau
  bool a = false;
  double potential_gap = 0.0;  // Phi(f) - Phi(f~)
  bool b = false;
  double max_arc_cost_gap = 0.0;
  bool c_arc = false;
  double max_user_cost_gap = 0.0;
  bool c_user = false;
  double cost_gap = 0.0;
  bool c_cost = false;
  bool all() const { return a && b && c_arc && c_user && c_cost; }
};

// Checks the approximate-equilibrium inequalities for an eps-approximate flow
// f against a solved equilibrium ft, with Lipschitz constant m on [0, T].
// Comparisons are non-strict with a 1e-12 relative slack.
ApproximationReport check_approximation(const Game& g, const PathFlow& f, const PathFlow& ft,
                          double eps, double m);

}  // namespace congestion
