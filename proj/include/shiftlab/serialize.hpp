#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "shiftlab/dissipative.hpp"
#include "shiftlab/scenarios.hpp"
#include "shiftlab/shadow.hpp"

namespace shiftlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("vector: expected non-empty array");
  std::vector<double> comps;
  for (const auto& e : j) comps.push_back(e.get<double>());
  return Vec(std::move(comps));
}

inline json seqpoint_to_json(const SeqPoint& pt) {
  json entries = json::array();
  for (long n = pt.a; n <= pt.b; ++n) entries.push_back(json::array({n, vec_to_json(pt.at(n))}));
  return json{{"window", {pt.a, pt.b}}, {"p", pt.p}, {"entries", entries}};
}

inline SeqPoint seqpoint_from_json(const json& j) {
  long a = j.at("window").at(0).get<long>();
  long b = j.at("window").at(1).get<long>();
  double p = j.at("p").get<double>();
  const json& entries = j.at("entries");
  if (entries.empty()) throw std::invalid_argument("SeqPoint: no entries");
  int d = static_cast<int>(entries.at(0).at(1).size());
  SeqPoint pt(a, b, p, d);
  for (const auto& e : entries) pt.at(e.at(0).get<long>()) = vec_from_json(e.at(1));
  return pt;
}

// ---------------------------------------------------------------------------
// Verdicts and certificates
// ---------------------------------------------------------------------------

inline json verdict_to_json(const ClassificationVerdict& v) {
  json basis = json::array();
  for (const auto& b : v.basis) basis.push_back(vec_to_json(b));
  return json{{"criterion", criterion_name(v.criterion)},
              {"certificates", v.certificates},
              {"window", {v.lo, v.hi}},
              {"window_certified", v.window_certified},
              {"basis_index", v.basis_index},
              {"basis", basis},
              {"projection_certificate", v.projection_certificate},
              {"residuals",
               {{"factor", v.residuals.factor},
                {"conjugacy", v.residuals.conjugacy},
                {"roundtrip", v.residuals.roundtrip}}}};
}

inline json ladder_to_json(const GrowthLadder& g) {
  return json{{"values", g.values}, {"roots", g.roots}, {"limit_estimate", g.limit_estimate}};
}

inline json certificate_to_json(const ShadowingCertificate& c) {
  json seeds = json::array();
  for (const auto& [seed, rep] : c.per_seed) {
    json fired;
    if (rep.fired) fired = std::string(1, rep.fired);
    seeds.push_back(json{{"seed", vec_to_json(seed)},
                         {"fired", fired},
                         {"ladders",
                          {{"a_sup", ladder_to_json(rep.a_sup)},
                           {"b_inf", ladder_to_json(rep.b_inf)},
                           {"c_contract", ladder_to_json(rep.c_contract)},
                           {"c_expand", ladder_to_json(rep.c_expand)}}}});
  }
  return json{{"per_seed", seeds},
              {"verdict", c.verdict},
              {"label", c.label},
              {"K", c.k_bound},
              {"window", {{"n_max", c.n_max}, {"k_max", c.k_max}}}};
}

// ---------------------------------------------------------------------------
// Dissipative system profiles
// ---------------------------------------------------------------------------

/// Profile config {mu: {kind, params...}, p}; kinds:
///   constant:  {value}                      mu_n = value
///   geometric: {base}                       mu_n = base^{-|n|}
///   periodic:  {values: [...]}              mu_n = values[n mod len]
///   table:     {entries: {"n": [m...]}, default: [m...]}  per-cell masses
inline DiscreteDissipativeSystem dissipative_from_json(const json& j) {
  double p = j.at("p").get<double>();
  const json& mu = j.at("mu");
  std::string kind = mu.at("kind").get<std::string>();
  if (kind == "constant") {
    double v = mu.at("value").get<double>();
    return DiscreteDissipativeSystem::scalar(p, [v](long) { return v; });
  }
  if (kind == "geometric") {
    double base = mu.at("base").get<double>();
    return DiscreteDissipativeSystem::scalar(
        p, [base](long n) { return std::pow(base, -static_cast<double>(std::labs(n))); });
  }
  if (kind == "periodic") {
    std::vector<double> vals = mu.at("values").get<std::vector<double>>();
    if (vals.empty()) throw std::invalid_argument("periodic profile: empty values");
    return DiscreteDissipativeSystem::scalar(p, [vals](long n) {
      long len = static_cast<long>(vals.size());
      return vals[static_cast<std::size_t>(((n % len) + len) % len)];
    });
  }
  if (kind == "table") {
    std::map<long, Vec> table;
    for (const auto& [key, val] : mu.at("entries").items())
      table.emplace(std::stol(key), vec_from_json(val));
    Vec dflt = vec_from_json(mu.at("default"));
    return DiscreteDissipativeSystem(dflt.dim(), p, [table, dflt](long n) {
      auto it = table.find(n);
      return it != table.end() ? it->second : dflt;
    });
  }
  throw std::invalid_argument("unknown measure profile kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Scenario config / report
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string scenario;
  long lo = -100, hi = 100;
  long n_max = kDefaultNMax, k_max = kDefaultKMax;
  double p = 2.0;
  double tol = 1e-10;
  std::uint64_t seed = kDefaultProbeSeed;
  std::string format = "json";  // json | csv | text
  std::string output;           // empty = stdout
};

inline RunConfig runconfig_from_json(const json& j) {
  RunConfig c;
  c.scenario = j.at("name").get<std::string>();
  if (j.contains("window")) {
    c.lo = j.at("window").at(0).get<long>();
    c.hi = j.at("window").at(1).get<long>();
  }
  if (j.contains("n_max")) c.n_max = j.at("n_max").get<long>();
  if (j.contains("k_max")) c.k_max = j.at("k_max").get<long>();
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("tol")) c.tol = j.at("tol").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (c.lo >= c.hi || c.n_max < 2 || c.k_max < 1 || !(c.p >= 1.0) || !(c.tol > 0.0))
    throw std::invalid_argument("invalid run config");
  return c;
}

inline json runconfig_to_json(const RunConfig& c) {
  return json{{"name", c.scenario}, {"window", {c.lo, c.hi}}, {"n_max", c.n_max},
              {"k_max", c.k_max},   {"p", c.p},               {"tol", c.tol},
              {"seed", c.seed}};
}

struct Report {
  RunConfig config;
  std::string scenario_note;
  std::map<std::string, double> scenario_params;
  ClassificationVerdict classification;
  bool refused = false;  // no classification certificate; nothing downstream ran
  std::string refusal_reason;
  ShadowingCertificate shadowing;
  std::string hyperbolicity_note;
  double max_residual = 0.0;
  double wall_clock_ms = 0.0;
};

inline json report_to_json(const Report& r) {
  json j{{"schema_version", 1},
         {"config", runconfig_to_json(r.config)},
         {"scenario", {{"note", r.scenario_note}, {"params", r.scenario_params}}},
         {"classification", verdict_to_json(r.classification)},
         {"refused", r.refused},
         {"hyperbolicity", r.hyperbolicity_note},
         {"max_residual", r.max_residual},
         {"wall_clock_ms", r.wall_clock_ms}};
  if (r.refused)
    j["refusal_reason"] = r.refusal_reason;
  else
    j["shadowing"] = certificate_to_json(r.shadowing);
  return j;
}

// ---------------------------------------------------------------------------
// CSV aggregation
// ---------------------------------------------------------------------------

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string report_csv_header() {
  return "name,criterion,shadowing,label,max_residual,K,runtime_ms";
}

/// One aggregation row from a parsed report document.
inline std::string report_csv_row(const json& j) {
  std::ostringstream row;
  row.precision(17);
  bool refused = j.at("refused").get<bool>();
  row << csv_escape(j.at("config").at("name").get<std::string>()) << ','
      << j.at("classification").at("criterion").get<std::string>() << ',';
  if (refused)
    row << "refused,none,";
  else
    row << (j.at("shadowing").at("verdict").get<bool>() ? "true" : "false") << ','
        << j.at("shadowing").at("label").get<std::string>() << ',';
  row << j.at("max_residual").get<double>() << ',';
  row << (refused ? 0.0 : j.at("shadowing").at("K").get<double>()) << ',';
  row << j.at("wall_clock_ms").get<double>();
  return row.str();
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return json::parse(in);
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

}  // namespace shiftlab
