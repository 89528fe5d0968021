#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "congestion/equilibrium.hpp"
#include "congestion/io.hpp"
#include "support.hpp"

using namespace congestion;
using namespace congestion::testing;
using congestion::io::json;

namespace {

const std::string kGames = GAMES_DIR;

Error error_of(const json& doc) {
  try {
    io::game_from_json(doc);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << doc.dump();
  return Error(ErrorCode::kInvariant, "");
}

json pigou_doc() { return io::game_to_json(pigou()); }

}  // namespace

TEST(GameJson, BundledPigou) {
  const Game g = io::load_game(kGames + "/pigou.json");
  EXPECT_EQ(g.structure().arcs(), (std::vector<std::string>{"upper", "lower"}));
  const Game expected(g.structure_ptr(), pigou().costs(), {1.0});
  EXPECT_TRUE(games_equivalent(g, expected));
  EXPECT_EQ(dist(g, expected).value, 0.0);
}

TEST(GameJson, RoundTripRandomGames) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 100; ++i) {
    const Game g = random_game(rng, false);
    const json doc = io::game_to_json(g);
    const Game h = io::game_from_json(json::parse(doc.dump()));
    EXPECT_EQ(dist(g, h).value, 0.0);
    EXPECT_EQ(io::game_to_json(h), doc);
  }
}

TEST(GameJson, RoundTripEveryFamily) {
  const std::vector<CostFunction> costs{
      CostFunction::constant(1.5),
      CostFunction::affine(2.0, 0.3),
      CostFunction::polynomial({0.5, 0.0, 1.0}),
      CostFunction::bpr(1.2, 2.5, 0.4),
      CostFunction::monomial_log(1.0, 1.5, 0.7),
      CostFunction::piecewise_linear({0.0, 1.0}, {0.2, 1.0}),
      CostFunction::transformed(CostFunction::bpr(1.0, 1.7, 0.1), 2.0, 0.5, 0.3, 0.2),
      CostFunction::extended(CostFunction::polynomial({0.1, 0.0, 1.0}), 1.0, ExtensionMode::kTangent),
  };
  for (const auto& c : costs) {
    const CostFunction back = io::cost_from_json(json::parse(io::cost_to_json(c).dump()));
    EXPECT_EQ(back.family(), c.family());
    for (double x : {0.0, 0.5, 1.7}) EXPECT_DOUBLE_EQ(back(x), c(x)) << c.family();
  }
}

TEST(GameJson, BadStructure) {
  json doc = pigou_doc();
  doc["structure"]["od_pairs"][0]["paths"] = json::array({json::array({"upper"})});
  doc["structure"]["arcs"] = json::array({"upper"});
  doc["costs"].erase("lower");
  EXPECT_EQ(error_of(doc).code(), ErrorCode::kBadStructure);
}

TEST(GameJson, Degenerate) {
  json doc = pigou_doc();
  doc["structure"]["od_pairs"][0]["demand"] = 0.0;
  const Error e = error_of(doc);
  EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  EXPECT_NE(ErrorCode::kBadStructure, ErrorCode::kDegenerate);
}

TEST(GameJson, SchemaErrorsCarryPointers) {
  json doc = pigou_doc();
  doc["costs"][doc["structure"]["arcs"][0].get<std::string>()]["family"] = "cubic";
  const Error e = error_of(doc);
  EXPECT_EQ(e.code(), ErrorCode::kSchema);
  EXPECT_NE(e.where().find("/costs/"), std::string::npos);

  json bad_version = pigou_doc();
  bad_version["schema"] = 2;
  EXPECT_EQ(error_of(bad_version).code(), ErrorCode::kSchema);

  json negative = pigou_doc();
  negative["structure"]["od_pairs"][0]["demand"] = -1.0;
  EXPECT_NE(error_of(negative).code(), ErrorCode::kInvariant);
}

TEST(GameJson, MissingFile) {
  try {
    io::load_game("/nonexistent/game.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
  }
}

TEST(SweepCsv, StableRoundTrip) {
  SweepOptions o;
  o.samples_per_radius = 3;
  o.seed = 4;
  const auto recs = sweep(pigou(), o);
  std::ostringstream a;
  io::write_sweep_csv(a, recs);
  std::istringstream in(a.str());
  const auto back = io::read_sweep_csv(in);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].delta, recs[i].delta);
    EXPECT_EQ(back[i].dist.value, recs[i].dist.value);
    EXPECT_EQ(back[i].cert_bound, recs[i].cert_bound);
  }
  std::ostringstream b;
  io::write_sweep_csv(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "seed,kind,dist,dist_err,base_poa,pert_poa,delta,cert_bound,radius,tol,cert_kind,solved");
}

TEST(RateCsv, Header) {
  RatePoint p;
  p.total = 0.5;
  p.poa_minus_one = 0.01;
  std::ostringstream os;
  io::write_rate_csv(os, {p});
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "T,poa_minus_one,bound,w,ln_bound");
}

TEST(Sha256, KnownDigest) {
  const std::string path = ::testing::TempDir() + "sha_input.txt";
  std::ofstream(path) << "abc";
  EXPECT_EQ(io::sha256_file(path), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::remove(path.c_str());
}

TEST(Manifest, Fields) {
  io::RunManifest m;
  m.command = "sweep";
  m.seed = 7;
  m.inputs = {kGames + "/pigou.json"};
  const json j = io::manifest_json(m);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["tool_version"], io::kToolVersion);
  EXPECT_EQ(j["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(io::exit_code(ErrorCode::kSchema), 2);
  EXPECT_EQ(io::exit_code(ErrorCode::kBadStructure), 2);
  EXPECT_EQ(io::exit_code(ErrorCode::kUnconverged), 3);
  EXPECT_EQ(io::exit_code(ErrorCode::kInvariant), 4);
}

TEST(SolveJson, Fields) {
  const Game g = pigou();
  const json j = io::to_json(solve_we(g), g);
  EXPECT_TRUE(j.contains("path_flows"));
  EXPECT_TRUE(j.contains("arc_flows"));
  EXPECT_NEAR(j["total_cost"].get<double>(), 1.0, 1e-9);
}
