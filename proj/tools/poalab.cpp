// poalab: command-line front end for the congestion-game library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "congestion/convergence.hpp"
#include "congestion/equilibrium.hpp"
#include "congestion/io.hpp"
#include "congestion/metric.hpp"
#include "congestion/sensitivity.hpp"
#include "congestion/transforms.hpp"

using namespace congestion;
using io::json;

namespace {

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_manifest(const std::string& out, const io::RunManifest& m) {
  std::ofstream f(out + ".manifest.json");
  f << io::manifest_json(m).dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kSchema, "cannot write '" + path + "'");
  return f;
}

// Invariant checks on one game; returns the report and whether all passed.
std::pair<json, bool> run_checks(const Game& g, double tol) {
  json rep;
  bool ok = true;
  auto record = [&](const std::string& name, bool pass, json detail = json::object()) {
    detail["pass"] = pass;
    rep[name] = detail;
    ok = ok && pass;
  };

  const PoaReport p = poa_report(g, tol);
  const OptimumBounds b = optimum_bounds(g);
  record("optimum_sandwich",
         b.lower <= p.so.total_cost * (1 + 1e-12) &&
             p.so.total_cost <= p.we.total_cost * (1 + 1e-12) + tol &&
             p.we.total_cost <= b.upper * (1 + 1e-12),
         {{"lower", b.lower}, {"c_star", p.so.total_cost}, {"c_we", p.we.total_cost},
          {"upper", b.upper}});

  double user_sum = 0.0;
  for (std::size_t k = 0; k < g.demands().size(); ++k) user_sum += p.we.user_costs[k] * g.demands()[k];
  record("we_total_cost_identity",
         std::abs(user_sum - p.we.total_cost) <= 10 * tol * (1 + p.we.total_cost));

  // An approximate equilibrium halfway between the solved WE and the uniform split.
  PathFlow mixed = uniform_flow(g);
  for (std::size_t s = 0; s < mixed.size(); ++s) mixed[s] = 0.5 * (mixed[s] + p.we.flow[s]);
  const double eps = approximation_threshold(g, mixed);
  double m = 0.0;
  for (const auto& c : g.costs()) m = std::max(m, c.lipschitz_on(g.total_demand()));
  if (std::isfinite(m) && eps > 0.0) {
    const ApproximationReport l1 = check_approximation(g, mixed, p.we.flow, eps, m);
    record("approximation", l1.all(), {{"eps", eps}, {"lipschitz", m}});
  }

  const Game g2 = cost_normalize(g, 2.0);
  const Game g3 = demand_normalize(g, 0.5).with_demands(g.demands());
  const AxiomReport ax = check_metric_axioms(g, g2, g3);
  record("metric_axioms", ax.all(), {{"triangle_excess", ax.triangle_excess}});

  json inv = json::array();
  bool inv_ok = true;
  for (double v : {0.5, 2.0, 10.0}) {
    const double a = poa(cost_normalize(g, v), tol);
    const double d = poa(demand_normalize(g, v), tol);
    inv.push_back({{"v", v}, {"cost", a - p.poa}, {"demand", d - p.poa}});
    inv_ok = inv_ok && std::abs(a - p.poa) <= 1e-6 && std::abs(d - p.poa) <= 1e-6;
  }
  record("poa_invariance", inv_ok, {{"deltas", inv}});
  rep["poa"] = p.poa;
  return {rep, ok};
}

std::vector<std::string> argv_vector(int argc, char** argv) {
  return std::vector<std::string>(argv + 1, argv + argc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria, price of anarchy and its sensitivity for non-atomic congestion games"};
  app.require_subcommand(1);

  std::string game_path, game_b, out_path, in_path, kind = "joint", direction = "down";
  double tol = 1e-10;
  bool so = false, trace = false, fw = false;
  std::vector<double> radii{1e-1, 1e-2, 1e-3, 1e-4}, totals;
  int samples = 32;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  auto* solve = app.add_subcommand("solve", "Solve for a Wardrop equilibrium or social optimum");
  solve->add_option("--game", game_path, "Game file")->required();
  solve->add_flag("--so", so, "Solve for the social optimum");
  solve->add_option("--tol", tol, "Duality gap tolerance");
  solve->add_flag("--frank-wolfe", fw, "Use classic Frank-Wolfe");
  solve->add_flag("--trace", trace, "Include the iteration trace");

  auto* poa_cmd = app.add_subcommand("poa", "Price of anarchy");
  poa_cmd->add_option("--game", game_path, "Game file")->required();
  poa_cmd->add_option("--tol", tol, "Duality gap tolerance");

  auto* dist_cmd = app.add_subcommand("dist", "Distance between two games");
  dist_cmd->add_option("--game-a", game_path, "First game file")->required();
  dist_cmd->add_option("--game-b", game_b, "Second game file")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Perturbation sweep around a game");
  sweep_cmd->add_option("--game", game_path, "Game file")->required();
  sweep_cmd->add_option("--kind", kind, "demand, cost or joint")
      ->check(CLI::IsMember({"demand", "cost", "joint"}));
  sweep_cmd->add_option("--radii", radii, "Ball radii")->delimiter(',');
  sweep_cmd->add_option("--samples", samples, "Samples per radius");
  sweep_cmd->add_option("--seed", seed, "Base seed");
  sweep_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--out", out_path, "Output CSV")->required();

  auto* fit_cmd = app.add_subcommand("holder-fit", "Fit a Hoelder exponent to sweep records");
  fit_cmd->add_option("--in", in_path, "Sweep CSV")->required();

  auto* conv_cmd = app.add_subcommand("converge", "PoA along a demand schedule");
  conv_cmd->add_option("--game", game_path, "Game file")->required();
  conv_cmd->add_option("--direction", direction, "up or down")
      ->check(CLI::IsMember({"up", "down"}));
  conv_cmd->add_option("--totals", totals, "Total demands")->delimiter(',')->required();
  conv_cmd->add_option("--tol", tol, "Duality gap tolerance");
  conv_cmd->add_option("--out", out_path, "Output CSV")->required();

  auto* check_cmd = app.add_subcommand("check", "Run the invariant suite on a game");
  check_cmd->add_option("--game", game_path, "Game file")->required();
  check_cmd->add_option("--tol", tol, "Duality gap tolerance");

  CLI11_PARSE(app, argc, argv);

  io::RunManifest manifest;
  manifest.args = argv_vector(argc, argv);
  try {
    if (*solve) {
      const Game g = io::load_game(game_path);
      SolveOptions opts;
      opts.tol = tol;
      opts.keep_trace = trace;
      if (fw) opts.method = SolverMethod::kFrankWolfe;
      const SolveReport r = so ? solve_so(g, opts) : solve_we(g, opts);
      json out = io::to_json(r, g);
      out["kind"] = so ? "social_optimum" : "wardrop_equilibrium";
      print(out);
      return r.converged ? 0 : 3;
    }
    if (*poa_cmd) {
      const Game g = io::load_game(game_path);
      const PoaReport r = poa_report(g, tol);
      print({{"poa", r.poa}, {"we", io::to_json(r.we, g)}, {"so", io::to_json(r.so, g)}});
      return 0;
    }
    if (*dist_cmd) {
      print(io::to_json(dist(io::load_game(game_path), io::load_game(game_b))));
      return 0;
    }
    if (*sweep_cmd) {
      const Game g = io::load_game(game_path);
      SweepOptions opts;
      opts.kind = perturbation_kind_from_string(kind);
      opts.radii = radii;
      opts.samples_per_radius = samples;
      opts.seed = seed;
      opts.threads = threads;
      const auto records = sweep(g, opts);
      auto f = open_out(out_path);
      io::write_sweep_csv(f, records);
      manifest.command = "sweep";
      manifest.seed = seed;
      json tols = json::array();
      for (double r : radii) tols.push_back({{"radius", r}, {"tol", sweep_tolerance(r)}});
      manifest.tolerances = {{"solver", tols}, {"grid", kDefaultGrid}};
      manifest.inputs = {game_path};
      write_manifest(out_path, manifest);
      std::size_t violations = 0;
      for (const auto& r : records) violations += certificate_respected(r) ? 0 : 1;
      print({{"records", records.size()}, {"certificate_violations", violations}});
      return violations == 0 ? 0 : 4;
    }
    if (*fit_cmd) {
      std::ifstream f(in_path);
      if (!f) throw Error(ErrorCode::kSchema, "cannot open '" + in_path + "'");
      print(io::to_json(fit_hoelder(io::read_sweep_csv(f))));
      return 0;
    }
    if (*conv_cmd) {
      const Game g = io::load_game(game_path);
      const DemandSchedule s = schedule_for(g, totals);
      const bool down = direction == "down";
      const auto points = down ? converge_down(g, s, tol) : converge_up(g, s, tol);
      auto f = open_out(out_path);
      io::write_rate_csv(f, points);
      manifest.command = "converge";
      manifest.tolerances = {{"solver", tol}, {"grid", kDefaultGrid}};
      manifest.inputs = {game_path};
      write_manifest(out_path, manifest);
      const RateFit fit = fit_rate(points, down ? RateDirection::kDown : RateDirection::kUp, tol);
      bool dominated = true;
      for (const auto& p : points) {
        if (p.bound && p.poa_minus_one > *p.bound) dominated = false;
      }
      json out = {{"points", points.size()}, {"bounds_hold", dominated},
                  {"degenerate_fit", fit.degenerate}};
      if (!fit.degenerate) {
        out["slope"] = fit.fit.slope;
        out["intercept"] = fit.fit.intercept;
        out["r2"] = fit.fit.r2;
      }
      print(out);
      return dominated ? 0 : 4;
    }
    if (*check_cmd) {
      const auto [rep, ok] = run_checks(io::load_game(game_path), tol);
      print(rep);
      return ok ? 0 : 4;
    }
  } catch (const Error& e) {
    std::cerr << io::error_json(e).dump() << '\n';
    return io::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 4;
  }
  return 0;
}
