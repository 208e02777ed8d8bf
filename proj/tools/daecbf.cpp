// Command-line front end: binds the benchmark presets, the safety-filter
// simulator and the verifier into reproducible batch runs.
//
// Grammar:
//   daecbf <simulate|verify|filter-step|analyze>
//          [--benchmark NAME | --config PATH] [--mode aware|unaware|nominal]
//          [--dt F] [--horizon F] [--seed N] [--samples N] [--threads N]
//          [--out DIR] [--checks LIST] [--override K=V]...
//
// Exit codes: 0 success, 1 verification Violated, 2 usage error, 3 runtime
// error.  DAECBF_LOG in {error, info, debug} controls stderr verbosity.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "daecbf/benchmarks.hpp"
#include "daecbf/simulator.hpp"
#include "daecbf/verifier.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("DAECBF_LOG");
  if (!env) return LogLevel::Error;
  const std::string v(env);
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  return LogLevel::Error;
}

void log(LogLevel level, const std::string& msg) {
  static const LogLevel active = log_level();
  if (level <= active) std::fprintf(stderr, "[daecbf] %s\n", msg.c_str());
}

struct RunConfig {
  std::string command;
  std::string benchmark = "manipulator";
  std::string mode = "aware";
  double dt = 0.0;        // 0 means "preset default"
  double horizon = 0.0;   // 0 means "preset default"
  std::size_t seed = 0;
  std::size_t samples = 4096;
  std::size_t threads = 0;  // 0 means "logical cores"
  std::string out = "daecbf_out";
  std::vector<std::string> checks = {"correctness", "interior", "boundary"};
  std::map<std::string, double> overrides;
};

const std::vector<std::string> kOverrideKeys = {
    "dt",          "horizon",        "seed",         "samples",
    "threads",     "starts",         "grid_per_dim", "max_grid_points",
    "boundary_band", "b_offset",     "u_max",        "kappa"};

double parse_number(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  const double v = std::stod(value, &pos);
  if (pos != value.size())
    throw daecbf::UsageError("override " + key + ": bad numeric value '" + value + "'");
  return v;
}

nlohmann::json config_to_json(const RunConfig& c) {
  return {{"command", c.command},   {"benchmark", c.benchmark},
          {"mode", c.mode},         {"dt", c.dt},
          {"horizon", c.horizon},   {"seed", c.seed},
          {"samples", c.samples},   {"threads", c.threads},
          {"out", c.out},           {"checks", c.checks},
          {"overrides", c.overrides}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw daecbf::Error("cannot write " + path.string());
  f << text;
  log(LogLevel::Info, "wrote " + path.string());
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg,
                    const daecbf::BenchmarkPreset& preset) {
  nlohmann::json m;
  m["tool"] = "daecbf";
  m["version"] = kVersion;
  m["config"] = config_to_json(cfg);
  m["preset"] = {{"name", preset.name}, {"params", preset.params}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

/// Resolves the preset and applies the overrides that act on the model.
daecbf::BenchmarkPreset resolve_preset(const RunConfig& cfg) {
  daecbf::BenchmarkPreset p = daecbf::benchmark_by_name(cfg.benchmark);
  if (auto it = cfg.overrides.find("u_max"); it != cfg.overrides.end()) {
    for (double& r : p.sys.input_polytope.r_u) r = it->second;
  }
  if (auto it = cfg.overrides.find("kappa"); it != cfg.overrides.end()) {
    for (double& a : p.spec.alphas) a = it->second;
  }
  if (auto it = cfg.overrides.find("b_offset"); it != cfg.overrides.end()) {
    const daecbf::SmoothFn base = p.spec.b;
    const double off = it->second;
    p.spec.b = daecbf::SmoothFn(base.n_in(), 1, [base, off](const auto& x) {
      auto v = base(x);
      v[0] = v[0] + off;
      return v;
    });
    p.aware.spec = p.spec;
    p.unaware.spec = p.spec;
  }
  return p;
}

daecbf::ProjectedDynamics projected(const daecbf::BenchmarkPreset& p) {
  const auto probes = daecbf::manifold_probes(p.sys, p.domain_lo, p.domain_hi, 64);
  return daecbf::make_projected_dynamics(p.sys, probes);
}

daecbf::VerifyOptions verify_options(const RunConfig& cfg) {
  daecbf::VerifyOptions opt;
  opt.samples = cfg.samples;
  opt.sobol_skip = cfg.seed;
  opt.threads = cfg.threads ? cfg.threads
                            : std::max(1u, std::thread::hardware_concurrency());
  const auto take = [&](const char* key, auto& slot) {
    if (auto it = cfg.overrides.find(key); it != cfg.overrides.end())
      slot = static_cast<std::decay_t<decltype(slot)>>(it->second);
  };
  take("starts", opt.starts);
  take("grid_per_dim", opt.grid_per_dim);
  take("max_grid_points", opt.max_grid_points);
  return opt;
}

int cmd_analyze(const RunConfig& cfg) {
  const daecbf::BenchmarkPreset p = resolve_preset(cfg);
  const daecbf::ProjectedDynamics pd = projected(p);
  const daecbf::IndexAnalysis& a = pd.analysis;
  std::printf("%s: nu=%zu d_prime=%zu d=%zu regular=%s\n", p.name.c_str(), a.nu,
              a.d_prime, a.d, a.regular ? "true" : "false");
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  nlohmann::json j = {{"benchmark", p.name},
                      {"nu", a.nu},
                      {"d_prime", a.d_prime},
                      {"d", a.d},
                      {"j_a_rank", a.j_a_rank},
                      {"regular", a.regular}};
  write_file(dir / "analysis.json", j.dump(2) + "\n");
  write_manifest(dir, cfg, p);
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const daecbf::BenchmarkPreset p = resolve_preset(cfg);
  const daecbf::ProjectedDynamics pd = projected(p);
  daecbf::Scenario sc = cfg.mode == "unaware" ? p.unaware : p.aware;
  if (cfg.mode == "nominal") sc.mode = daecbf::ControllerMode::Nominal;
  if (cfg.dt > 0.0) sc.dt = cfg.dt;
  if (cfg.horizon > 0.0) sc.horizon = cfg.horizon;
  if (auto it = cfg.overrides.find("dt"); it != cfg.overrides.end()) sc.dt = it->second;
  if (auto it = cfg.overrides.find("horizon"); it != cfg.overrides.end())
    sc.horizon = it->second;
  sc.spec = p.spec;

  log(LogLevel::Info, "simulating " + p.name + " (" + cfg.mode + ")");
  const daecbf::Trajectory tr = daecbf::run(pd, sc);

  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  write_file(dir / "trajectory.csv", daecbf::trajectory_csv(tr));
  nlohmann::json s = {{"min_b", tr.summary.min_b},
                      {"min_h", tr.summary.min_h},
                      {"max_phi", tr.summary.max_phi},
                      {"steps", tr.t.size()}};
  if (tr.summary.first_infeasible)
    s["first_infeasible"] = *tr.summary.first_infeasible;
  else
    s["first_infeasible"] = nullptr;
  write_file(dir / "summary.json", s.dump(2) + "\n");
  write_manifest(dir, cfg, p);
  std::printf("%s %s: steps=%zu min_b=%.6g min_h=%.6g max_phi=%.3g%s\n",
              p.name.c_str(), cfg.mode.c_str(), tr.t.size(), tr.summary.min_b,
              tr.summary.min_h, tr.summary.max_phi,
              tr.summary.first_infeasible ? " (became infeasible)" : "");
  return 0;
}

int cmd_filter_step(const RunConfig& cfg) {
  const daecbf::BenchmarkPreset p = resolve_preset(cfg);
  const daecbf::ProjectedDynamics pd = projected(p);
  const daecbf::Scenario& sc = cfg.mode == "unaware" ? p.unaware : p.aware;
  const daecbf::Vector x = daecbf::consistent_init(p.sys, sc.x_d0, sc.x_a_guess);
  const daecbf::Vector u_nom =
      sc.nominal ? sc.nominal(0.0, x) : daecbf::Vector(p.sys.n_u, 0.0);
  const daecbf::QpProblem qp =
      cfg.mode == "unaware"
          ? daecbf::dae_unaware_filter(p.sys, p.spec, x, u_nom)
          : daecbf::assemble_filter_qp(pd, p.spec, x, u_nom);
  const daecbf::FilterResult res = daecbf::solve_qp(qp);

  nlohmann::json j;
  j["status"] = res.status == daecbf::FilterStatus::Feasible ? "feasible" : "infeasible";
  j["x"] = x;
  j["u_nominal"] = u_nom;
  j["u"] = res.u;
  j["active_set"] = res.active_set;
  j["objective"] = res.objective;
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  write_file(dir / "filter_step.json", j.dump(2) + "\n");
  write_manifest(dir, cfg, p);

  std::printf("status: %s\nu =", j["status"].get<std::string>().c_str());
  for (double v : res.u) std::printf(" %.10g", v);
  std::printf("\nactive set:");
  for (std::size_t i : res.active_set) std::printf(" %zu", i);
  std::printf("\n");
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const daecbf::BenchmarkPreset p = resolve_preset(cfg);
  daecbf::ProjectedDynamics pd = projected(p);
  if (auto it = cfg.overrides.find("boundary_band"); it != cfg.overrides.end())
    pd.opt.boundary_band = it->second;
  const daecbf::VerifyOptions opt = verify_options(cfg);
  const daecbf::Vector& lo = p.verify_lo;
  const daecbf::Vector& hi = p.verify_hi;

  nlohmann::json report;
  bool violated = false;
  for (const std::string& check : cfg.checks) {
    log(LogLevel::Info, "verifying " + check + " on " + p.name);
    if (check == "correctness") {
      const auto r = daecbf::verify_correctness(pd, p.spec, lo, hi, opt);
      report["correctness"] = daecbf::to_json(r);
      violated |= r.verdict == daecbf::Verdict::Violated;
    } else if (check == "interior" || check == "boundary") {
      const auto kind = check == "interior" ? daecbf::StackKind::Interior
                                            : daecbf::StackKind::Boundary;
      const auto r = daecbf::verify_feasibility(pd, p.spec, lo, hi, kind, opt);
      report[check] = daecbf::to_json(r);
      violated |= r.verdict == daecbf::Verdict::Violated;
    } else {
      throw daecbf::UsageError("unknown check: " + check);
    }
  }

  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_manifest(dir, cfg, p);
  for (auto it = report.begin(); it != report.end(); ++it)
    std::printf("%s: %s\n", it.key().c_str(),
                it.value()["verdict"].get<std::string>().c_str());
  return violated ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DAE-aware control barrier function toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::vector<std::string> raw_overrides;
  std::string checks_csv;

  // Shared options registered on every subcommand; precedence is
  // flags > config file > preset defaults.
  std::map<std::string, bool> seen;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--benchmark", cfg.benchmark, "preset name")
        ->check(CLI::IsMember({"wind_turbine", "manipulator"}));
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--mode", cfg.mode, "controller mode")
        ->check(CLI::IsMember({"aware", "unaware", "nominal"}));
    sub->add_option("--dt", cfg.dt, "integration step");
    sub->add_option("--horizon", cfg.horizon, "simulation horizon [s]");
    sub->add_option("--seed", cfg.seed, "sample-stream offset");
    sub->add_option("--samples", cfg.samples, "verification samples per check");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = logical cores)");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--checks", checks_csv, "comma-separated checks to run");
    sub->add_option("--override", raw_overrides, "K=V model/verifier override")
        ->take_all();
  };
  add_common(app.add_subcommand("simulate", "closed-loop run with the safety filter"));
  add_common(app.add_subcommand("verify", "global correctness / feasibility checks"));
  add_common(app.add_subcommand("filter-step", "single-state QP solve"));
  add_common(app.add_subcommand("analyze", "index and regularity report"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();

    // Config file fills in anything the flags left untouched.
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw daecbf::UsageError("cannot read config file " + config_path);
      nlohmann::json j = nlohmann::json::parse(f);
      const auto absent = [&](const char* flag) {
        return sub->get_option(flag)->count() == 0;
      };
      for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "benchmark" && absent("--benchmark")) cfg.benchmark = it.value();
        else if (k == "mode" && absent("--mode")) cfg.mode = it.value();
        else if (k == "dt" && absent("--dt")) cfg.dt = it.value();
        else if (k == "horizon" && absent("--horizon")) cfg.horizon = it.value();
        else if (k == "seed" && absent("--seed")) cfg.seed = it.value();
        else if (k == "samples" && absent("--samples")) cfg.samples = it.value();
        else if (k == "threads" && absent("--threads")) cfg.threads = it.value();
        else if (k == "out" && absent("--out")) cfg.out = it.value();
        else if (k == "checks" && absent("--checks"))
          cfg.checks = it.value().get<std::vector<std::string>>();
        else if (k == "overrides") {
          for (auto ov = it.value().begin(); ov != it.value().end(); ++ov)
            cfg.overrides.emplace(ov.key(), ov.value().get<double>());
        } else if (k != "benchmark" && k != "mode" && k != "dt" && k != "horizon" &&
                   k != "seed" && k != "samples" && k != "threads" && k != "out" &&
                   k != "checks")
          throw daecbf::UsageError("unknown config key: " + k);
      }
    }

    if (!checks_csv.empty()) {
      cfg.checks.clear();
      std::size_t pos = 0;
      while (pos != std::string::npos) {
        const std::size_t comma = checks_csv.find(',', pos);
        cfg.checks.push_back(checks_csv.substr(
            pos, comma == std::string::npos ? comma : comma - pos));
        pos = comma == std::string::npos ? comma : comma + 1;
      }
    }

    for (const std::string& kv : raw_overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw daecbf::UsageError("override must be K=V: " + kv);
      const std::string key = kv.substr(0, eq);
      if (std::find(kOverrideKeys.begin(), kOverrideKeys.end(), key) ==
          kOverrideKeys.end())
        throw daecbf::UsageError("unknown override key: " + key);
      cfg.overrides[key] = parse_number(key, kv.substr(eq + 1));
    }
    if (auto it = cfg.overrides.find("seed"); it != cfg.overrides.end())
      cfg.seed = static_cast<std::size_t>(it->second);
    if (auto it = cfg.overrides.find("samples"); it != cfg.overrides.end())
      cfg.samples = static_cast<std::size_t>(it->second);
    if (auto it = cfg.overrides.find("threads"); it != cfg.overrides.end())
      cfg.threads = static_cast<std::size_t>(it->second);

    if (cfg.command == "analyze") return cmd_analyze(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    if (cfg.command == "filter-step") return cmd_filter_step(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    throw daecbf::UsageError("unknown command: " + cfg.command);
  } catch (const daecbf::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
