#include "congestion/io.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace congestion::io {
namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kSchema, what, where);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) schema_error(where + "/" + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  const std::string at = where + "/" + key;
  if (!v.is_array()) schema_error(at, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema_error(at + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string escape(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

CostFunction build_cost(const std::string& family, const json& p, const std::string& where) {
  if (family == "constant") return CostFunction::constant(number(p, "c", where));
  if (family == "affine") {
    return CostFunction::affine(number(p, "slope", where), number(p, "intercept", where));
  }
  if (family == "polynomial") return CostFunction::polynomial(numbers(p, "coefficients", where));
  if (family == "bpr") {
    return CostFunction::bpr(number(p, "q", where), number(p, "beta", where),
                             number(p, "p", where));
  }
  if (family == "monomial_log") {
    return CostFunction::monomial_log(number(p, "zeta", where), number(p, "beta", where),
                                      number(p, "alpha", where));
  }
  if (family == "piecewise_linear") {
    return CostFunction::piecewise_linear(numbers(p, "breakpoints", where),
                                          numbers(p, "values", where));
  }
  if (family == "transformed") {
    CostFunction inner = cost_from_json(field(p, "inner", where), where + "/inner");
    return CostFunction::transformed(std::move(inner), number_or(p, "out_scale", 1.0, where),
                                     number_or(p, "in_scale", 1.0, where),
                                     number_or(p, "offset", 0.0, where),
                                     number_or(p, "slope", 0.0, where));
  }
  if (family == "extended") {
    CostFunction inner = cost_from_json(field(p, "inner", where), where + "/inner");
    const json& m = field(p, "mode", where);
    ExtensionMode mode;
    if (m == "constant") mode = ExtensionMode::kConstant;
    else if (m == "tangent") mode = ExtensionMode::kTangent;
    else schema_error(where + "/mode", "mode must be 'constant' or 'tangent'");
    return CostFunction::extended(std::move(inner), number(p, "at", where), mode);
  }
  schema_error(where.empty() ? "/family" : where.substr(0, where.rfind('/')) + "/family",
               "unknown cost family '" + family + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

CostFunction cost_from_json(const json& doc, const std::string& where) {
  const json& fam = field(doc, "family", where);
  if (!fam.is_string()) schema_error(where + "/family", "family must be a string");
  const json& params = field(doc, "params", where);
  try {
    return build_cost(fam.get<std::string>(), params, where + "/params");
  } catch (const Error& e) {
    if (!e.where().empty()) throw;
    throw Error(e.code(), e.what(), where + "/params");
  }
}

json cost_to_json(const CostFunction& f) {
  json p;
  std::visit(
      [&p](const auto& form) {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Constant>) {
          p = {{"c", form.c}};
        } else if constexpr (std::is_same_v<T, Affine>) {
          p = {{"slope", form.slope}, {"intercept", form.intercept}};
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          p = {{"coefficients", form.coefficients}};
        } else if constexpr (std::is_same_v<T, Bpr>) {
          p = {{"q", form.q}, {"beta", form.beta}, {"p", form.p}};
        } else if constexpr (std::is_same_v<T, MonomialLog>) {
          p = {{"zeta", form.zeta}, {"beta", form.beta}, {"alpha", form.alpha}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          p = {{"breakpoints", form.breakpoints}, {"values", form.values}};
        } else if constexpr (std::is_same_v<T, Transformed>) {
          p = {{"inner", cost_to_json(*form.inner)},
               {"out_scale", form.out_scale},
               {"in_scale", form.in_scale},
               {"offset", form.offset},
               {"slope", form.slope}};
        } else {
          p = {{"inner", cost_to_json(*form.inner)},
               {"at", form.at},
               {"mode", form.mode == ExtensionMode::kConstant ? "constant" : "tangent"}};
        }
      },
      f.form());
  return {{"family", f.family()}, {"params", p}};
}

Game game_from_json(const json& doc) {
  if (!doc.is_object()) schema_error("", "game file must be a JSON object");
  const json& version = field(doc, "schema", "");
  if (version != kSchemaVersion) schema_error("/schema", "unsupported schema version");

  const json& st = field(doc, "structure", "");
  const json& arcs_j = field(st, "arcs", "/structure");
  if (!arcs_j.is_array() || arcs_j.empty()) {
    schema_error("/structure/arcs", "arcs must be a non-empty array");
  }
  std::vector<std::string> arcs;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < arcs_j.size(); ++i) {
    const std::string at = "/structure/arcs/" + std::to_string(i);
    if (!arcs_j[i].is_string()) schema_error(at, "arc ids must be strings");
    arcs.push_back(arcs_j[i].get<std::string>());
    if (!seen.insert(arcs.back()).second) schema_error(at, "duplicate arc id '" + arcs.back() + "'");
  }

  const json& ods_j = field(st, "od_pairs", "/structure");
  if (!ods_j.is_array() || ods_j.empty()) {
    schema_error("/structure/od_pairs", "od_pairs must be a non-empty array");
  }
  std::vector<std::string> ids;
  std::vector<double> demands;
  std::vector<std::vector<std::vector<std::string>>> path_sets;
  for (std::size_t k = 0; k < ods_j.size(); ++k) {
    const std::string at = "/structure/od_pairs/" + std::to_string(k);
    const json& od = ods_j[k];
    const json& id = field(od, "id", at);
    if (!id.is_string()) schema_error(at + "/id", "O/D id must be a string");
    ids.push_back(id.get<std::string>());
    demands.push_back(number(od, "demand", at));
    if (!(demands.back() >= 0.0)) schema_error(at + "/demand", "demand must be >= 0");
    const json& paths = field(od, "paths", at);
    if (!paths.is_array()) schema_error(at + "/paths", "paths must be an array");
    if (paths.size() < 2) {
      throw Error(ErrorCode::kBadStructure, "every O/D pair needs at least two paths",
                  at + "/paths");
    }
    std::vector<std::vector<std::string>> set;
    for (std::size_t j = 0; j < paths.size(); ++j) {
      const std::string pat = at + "/paths/" + std::to_string(j);
      if (!paths[j].is_array() || paths[j].empty()) {
        schema_error(pat, "a path must be a non-empty array of arc ids");
      }
      std::vector<std::string> path;
      for (std::size_t i = 0; i < paths[j].size(); ++i) {
        const json& a = paths[j][i];
        if (!a.is_string() || !seen.count(a.get<std::string>())) {
          schema_error(pat + "/" + std::to_string(i), "unknown arc id");
        }
        path.push_back(a.get<std::string>());
      }
      set.push_back(std::move(path));
    }
    path_sets.push_back(std::move(set));
  }

  StructurePtr structure;
  try {
    structure = std::make_shared<const Structure>(arcs, ids, path_sets);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), "/structure");
  }

  const json& costs_j = field(doc, "costs", "");
  if (!costs_j.is_object()) schema_error("/costs", "costs must be an object keyed by arc id");
  std::vector<CostFunction> costs;
  for (const auto& a : arcs) {
    const std::string at = "/costs/" + escape(a);
    auto it = costs_j.find(a);
    if (it == costs_j.end()) schema_error(at, "missing cost function for arc '" + a + "'");
    costs.push_back(cost_from_json(*it, at));
  }
  for (auto it = costs_j.begin(); it != costs_j.end(); ++it) {
    if (!seen.count(it.key())) schema_error("/costs/" + escape(it.key()), "cost for unknown arc");
  }

  try {
    return Game(structure, std::move(costs), std::move(demands));
  } catch (const Error& e) {
    const std::string at = e.code() == ErrorCode::kDegenerate ? "/structure/od_pairs" : "";
    throw Error(e.code(), e.what(), at);
  }
}

json game_to_json(const Game& g) {
  const Structure& st = g.structure();
  json ods = json::array();
  for (std::size_t k = 0; k < st.num_od(); ++k) {
    json paths = json::array();
    for (std::size_t s = st.first_path(k); s < st.end_path(k); ++s) {
      json p = json::array();
      for (std::size_t a : st.path(s)) p.push_back(st.arc_id(a));
      paths.push_back(p);
    }
    ods.push_back({{"id", st.od_ids()[k]}, {"demand", g.demands()[k]}, {"paths", paths}});
  }
  json costs = json::object();
  for (std::size_t a = 0; a < st.num_arcs(); ++a) costs[st.arc_id(a)] = cost_to_json(g.cost(a));
  return {{"schema", kSchemaVersion},
          {"structure", {{"arcs", st.arcs()}, {"od_pairs", ods}}},
          {"costs", costs}};
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSchema, "cannot open game file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchema, std::string("invalid JSON: ") + e.what(),
                "byte " + std::to_string(e.byte));
  }
  return game_from_json(doc);
}

void save_game(const Game& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kSchema, "cannot write '" + path + "'");
  out << game_to_json(g).dump(2) << '\n';
}

json to_json(const SolveReport& r, const Game& g) {
  const Structure& st = g.structure();
  json paths = json::array();
  for (std::size_t s = 0; s < st.num_paths(); ++s) {
    json arcs = json::array();
    for (std::size_t a : st.path(s)) arcs.push_back(st.arc_id(a));
    paths.push_back({{"od", st.od_ids()[st.od_of_path(s)]}, {"arcs", arcs}, {"flow", r.flow[s]}});
  }
  json arcs = json::object();
  for (std::size_t a = 0; a < st.num_arcs(); ++a) arcs[st.arc_id(a)] = r.arc_flow[a];
  json users = json::object();
  for (std::size_t k = 0; k < st.num_od(); ++k) users[st.od_ids()[k]] = r.user_costs[k];
  json out = {{"path_flows", paths},
              {"arc_flows", arcs},
              {"total_cost", r.total_cost},
              {"user_costs", users},
              {"duality_gap", r.duality_gap},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"optimality_certified", r.optimality_certified}};
  if (!r.trace.empty()) {
    json trace = json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"iteration", t.iteration}, {"gap", t.gap}, {"objective", t.objective}});
    }
    out["trace"] = trace;
  }
  return out;
}

json to_json(const MetricValue& m) {
  return {{"value", m.value},           {"demand_part", m.demand_part},
          {"cost_part", m.cost_part},   {"sup_part", m.sup_part},
          {"endpoint_part", m.endpoint_part}, {"error_bound", m.error_bound}};
}

json to_json(const HoelderCertificate& c) {
  return {{"which", to_string(c.kind)},
          {"H", c.h},
          {"exponent", c.exponent},
          {"radius", c.radius},
          {"linear_factor", c.linear_factor}};
}

json to_json(const HoelderFit& f) {
  return {{"gamma", f.gamma}, {"H", f.h}, {"r2", f.r2}, {"used", f.used}};
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "seed,kind,dist,dist_err,base_poa,pert_poa,delta,cert_bound,radius,tol,cert_kind,solved\n";
  for (const auto& r : records) {
    os << r.seed << ',' << to_string(r.kind) << ',' << fmt(r.dist.value) << ','
       << fmt(r.dist.error_bound) << ',' << fmt(r.base_poa) << ','
       << (r.solved ? fmt(r.pert_poa) : "") << ',' << (r.solved ? fmt(r.delta) : "") << ','
       << fmt(r.cert_bound) << ',' << fmt(r.radius) << ',' << fmt(r.tol) << ','
       << (r.cert_kind ? to_string(*r.cert_kind) : "") << ',' << (r.solved ? 1 : 0) << '\n';
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::kSchema, "empty sweep CSV");
  const auto header = split(line, ',');
  auto col = [&header](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  for (const char* name : {"seed", "kind", "dist", "dist_err", "base_poa", "pert_poa", "delta",
                           "cert_bound"}) {
    if (!col(name)) throw Error(ErrorCode::kSchema, std::string("sweep CSV lacks column ") + name);
  }
  std::vector<SweepRecord> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    auto cell = [&](const std::string& name) -> std::string {
      auto c = col(name);
      return c && *c < cells.size() ? cells[*c] : std::string();
    };
    auto num = [&](const std::string& name) -> std::optional<double> {
      const std::string s = cell(name);
      if (s.empty()) return std::nullopt;
      try {
        return std::stod(s);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kSchema, "bad number in column " + name, "row " + std::to_string(row));
      }
    };
    SweepRecord r;
    r.seed = std::stoull(cell("seed"));
    r.kind = perturbation_kind_from_string(cell("kind"));
    r.dist.value = num("dist").value_or(0.0);
    r.dist.error_bound = num("dist_err").value_or(0.0);
    r.base_poa = num("base_poa").value_or(1.0);
    r.solved = cell("solved") != "0" && num("delta").has_value();
    r.pert_poa = num("pert_poa").value_or(r.base_poa);
    r.delta = num("delta").value_or(0.0);
    r.cert_bound = num("cert_bound");
    r.radius = num("radius").value_or(0.0);
    r.tol = num("tol").value_or(r.radius > 0.0 ? sweep_tolerance(r.radius) : 1e-10);
    out.push_back(std::move(r));
  }
  return out;
}

void write_rate_csv(std::ostream& os, const std::vector<RatePoint>& points) {
  os << "T,poa_minus_one,bound,w,ln_bound\n";
  for (const auto& p : points) {
    os << fmt(p.total) << ',' << fmt(p.poa_minus_one) << ',' << fmt(p.bound) << ','
       << fmt(p.w) << ',' << fmt(p.ln_bound) << '\n';
  }
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSchema, "cannot read '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 8192> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

json manifest_json(const RunManifest& m) {
  json inputs = json::array();
  for (const auto& p : m.inputs) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"command", m.command}, {"args", m.args},       {"seed", m.seed},
          {"tolerances", m.tolerances}, {"inputs", inputs}, {"tool_version", kToolVersion},
          {"timestamp", stamp}};
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnconverged: return 3;
    case ErrorCode::kInvariant: return 4;
    default: return 2;
  }
}

json error_json(const Error& e) {
  json out = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (!e.where().empty()) out["where"] = e.where();
  return out;
}

}  // namespace congestion::io
