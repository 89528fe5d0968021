#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "congestion/convergence.hpp"
#include "congestion/equilibrium.hpp"
#include "congestion/error.hpp"
#include "congestion/game.hpp"
#include "congestion/metric.hpp"
#include "congestion/sensitivity.hpp"

namespace congestion::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Game file, schema 1:
//   {"schema": 1,
//    "structure": {"arcs": [...],
//                  "od_pairs": [{"id": ..., "demand": ..., "paths": [[arc, ...], ...]}]},
//    "costs": {arc: {"family": ..., "params": {...}}}}
// Errors carry the JSON pointer of the offending value in Error::where().
Game game_from_json(const json& doc);
json game_to_json(const Game& g);
Game load_game(const std::string& path);
void save_game(const Game& g, const std::string& path);

CostFunction cost_from_json(const json& doc, const std::string& where = "");
json cost_to_json(const CostFunction& f);

json to_json(const SolveReport& r, const Game& g);
json to_json(const MetricValue& m);
json to_json(const HoelderCertificate& c);
json to_json(const HoelderFit& f);

// Columns: seed,kind,dist,dist_err,base_poa,pert_poa,delta,cert_bound, then
// radius,tol,cert_kind,solved. Empty cells mean "none".
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& is);

// Columns: T,poa_minus_one,bound, then w,ln_bound.
void write_rate_csv(std::ostream& os, const std::vector<RatePoint>& points);

std::string sha256_file(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::uint64_t seed = 0;
  json tolerances = json::object();
  std::vector<std::string> inputs;
};

json manifest_json(const RunManifest& m);

// Process exit code of the command-line tool for an error category.
int exit_code(ErrorCode code);
json error_json(const Error& e);

}  // namespace congestion::io
