#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "shiftlab/serialize.hpp"

namespace fs = std::filesystem;
using namespace shiftlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRefusal = 3;
constexpr int kExitVerification = 4;
constexpr int kExitIo = 5;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const std::string& body, const std::string& output) {
  if (output.empty())
    std::cout << body << '\n';
  else
    write_text_file(output, body + "\n");
}

std::string render_text(const Report& r) {
  std::ostringstream out;
  out << "scenario:       " << r.config.scenario << "\n"
      << "classification: " << criterion_name(r.classification.criterion)
      << " (window [" << r.classification.lo << ", " << r.classification.hi << "]"
      << (r.classification.window_certified ? ", window-certified only" : ", period exhausted")
      << ")\n";
  if (r.refused) {
    out << "shadowing:      refused (" << r.refusal_reason << ")";
    return out.str();
  }
  out << "projection:     " << r.classification.projection_certificate << "\n"
      << "residuals:      factor " << r.classification.residuals.factor << ", conjugacy "
      << r.classification.residuals.conjugacy << ", roundtrip "
      << r.classification.residuals.roundtrip << "\n"
      << "shadowing:      " << (r.shadowing.verdict ? "yes" : "no") << " (label "
      << r.shadowing.label << ", K " << r.shadowing.k_bound << ")\n"
      << "hyperbolicity:  " << r.hyperbolicity_note;
  return out.str();
}

/// Full pipeline for one scenario; throws refusal_error when classification
/// yields no certificate.
Report run_analysis(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc = build_scenario(cfg.scenario);
  Report r;
  r.config = cfg;
  r.scenario_note = sc.note;
  r.scenario_params = sc.params;

  ClassifyOptions opt;
  opt.lo = cfg.lo;
  opt.hi = cfg.hi;
  opt.period_exhausted = sc.period_exhausted;
  r.classification = classify(*sc.seq, sc.candidate_bases, opt);
  if (r.classification.criterion == Criterion::none) {
    r.refused = true;
    r.refusal_reason = "no criterion certifies bounded projections";
    r.hyperbolicity_note = sc.expected.hyperbolicity;
    r.wall_clock_ms = ms_since(t0);
    return r;
  }

  ConjugacyBundle bundle = build_conjugacy(sc.seq, r.classification, cfg.p);
  r.classification.residuals = verify_bundle(bundle, 100, cfg.seed);
  r.max_residual = std::max({r.classification.residuals.factor,
                             r.classification.residuals.conjugacy,
                             r.classification.residuals.roundtrip});

  r.shadowing = shadowing_verdict(*sc.seq, r.classification, cfg.n_max, cfg.k_max);
  if (r.shadowing.verdict)
    r.shadowing.k_bound = estimate_shadowing_bound(bundle, r.shadowing, cfg.seed);

  std::string note;
  for (int i = 0; i < bundle.factors(); ++i)
    note += std::string(i ? "/" : "") + hyperbolicity_name(hyperbolicity_verdict(
                                            bundle.factor_weights(i), cfg.n_max, cfg.k_max));
  r.hyperbolicity_note = note;
  r.wall_clock_ms = ms_since(t0);
  return r;
}

int cmd_analyze(RunConfig cfg, const std::string& config_path) {
  try {
    if (!config_path.empty()) {
      json j;
      try {
        j = load_json_file(config_path);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
      }
      RunConfig file_cfg = runconfig_from_json(j);
      file_cfg.format = cfg.format;
      file_cfg.output = cfg.output;
      cfg = file_cfg;
    }
    if (cfg.scenario.empty()) throw std::invalid_argument("no scenario given");

    Report r = run_analysis(cfg);
    std::string body;
    if (cfg.format == "json")
      body = report_to_json(r).dump(2);
    else if (cfg.format == "csv")
      body = report_csv_header() + "\n" + report_csv_row(report_to_json(r));
    else
      body = render_text(r);
    emit(body, cfg.output);

    if (r.refused) return kExitRefusal;
    if (r.max_residual > cfg.tol) {
      std::cerr << "error: residual " << r.max_residual << " exceeds tolerance " << cfg.tol << "\n";
      return kExitVerification;
    }
    return kExitOk;
  } catch (const refusal_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefusal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
}

int cmd_shadow(const RunConfig& cfg, const std::string& defects_path) {
  json doc;
  try {
    doc = load_json_file(defects_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  try {
    std::vector<SeqPoint> defects;
    const json& arr = doc.is_array() ? doc : doc.at("defects");
    for (const auto& e : arr) defects.push_back(seqpoint_from_json(e));
    if (defects.empty()) throw std::invalid_argument("no defects in input");

    Scenario sc = build_scenario(cfg.scenario);
    ClassifyOptions opt;
    opt.lo = cfg.lo;
    opt.hi = cfg.hi;
    opt.period_exhausted = sc.period_exhausted;
    ClassificationVerdict cls = classify(*sc.seq, sc.candidate_bases, opt);
    ConjugacyBundle bundle = build_conjugacy(sc.seq, cls, cfg.p);
    ShadowingCertificate cert = shadowing_verdict(*sc.seq, cls, cfg.n_max, cfg.k_max);
    SolveResult sol = solve_shadowing(bundle, defects, cert);

    json orbit = json::array();
    for (const SeqPoint& x : sol.orbit) orbit.push_back(seqpoint_to_json(x));
    json out{{"scenario", cfg.scenario},
             {"orbit", orbit},
             {"sup_orbit", sol.sup_orbit},
             {"sup_defect", sol.sup_defect},
             {"realized_ratio", sol.realized_ratio},
             {"label", cert.label}};
    emit(out.dump(2), cfg.output);
    return kExitOk;
  } catch (const refusal_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefusal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
}

int cmd_report(const std::string& dir, const std::string& output) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: not a directory: " << dir << "\n";
    return kExitIo;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string body = report_csv_header();
  int bad = 0;
  for (const auto& f : files) {
    try {
      body += "\n" + report_csv_row(load_json_file(f.string()));
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << f.string() << ": " << e.what() << "\n";
      ++bad;
    }
  }
  if (files.empty()) std::cerr << "warning: no report files in " << dir << "\n";
  try {
    emit(body, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return bad == static_cast<int>(files.size()) && bad > 0 ? kExitIo : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shift-operator analysis toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, defects_path, report_dir;
  std::vector<long> window;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", cfg.scenario, "built-in scenario name");
    sub->add_option("--window", window, "frame window lo hi")->expected(2);
    sub->add_option("--nmax", cfg.n_max, "ladder depth");
    sub->add_option("--kmax", cfg.k_max, "window-position range");
    sub->add_option("--p", cfg.p, "sequence-space exponent");
    sub->add_option("--tol", cfg.tol, "verification tolerance");
    sub->add_option("--seed", cfg.seed, "probe RNG seed");
    sub->add_option("--output", cfg.output, "output path (default stdout)");
    sub->add_option("--format", cfg.format, "json, csv, or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
  };

  CLI::App* analyze = app.add_subcommand("analyze", "classify and certify one scenario");
  add_common(analyze);
  analyze->add_option("--config", config_path, "JSON run config (overrides flags)");

  CLI::App* shadow = app.add_subcommand("shadow", "solve a pseudo-orbit against a scenario");
  add_common(shadow);
  shadow->add_option("--defects", defects_path, "JSON defect file")->required();

  CLI::App* report = app.add_subcommand("report", "aggregate a directory of JSON reports");
  report->add_option("--dir", report_dir, "directory of reports")->required();
  report->add_option("--output", cfg.output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (!window.empty()) {
    cfg.lo = window[0];
    cfg.hi = window[1];
    if (cfg.lo >= cfg.hi) {
      std::cerr << "error: empty window\n";
      return kExitConfig;
    }
  }

  if (analyze->parsed()) return cmd_analyze(cfg, config_path);
  if (shadow->parsed()) return cmd_shadow(cfg, defects_path);
  return cmd_report(report_dir, cfg.output);
}
