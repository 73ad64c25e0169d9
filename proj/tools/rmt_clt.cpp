// rmt-clt: deterministic equivalents, CLT variance and bias for the
// mutual information of non-centered Gram matrices, with Monte Carlo
// verification.
//
// Subcommands:
//   run     execute scenarios from a JSON config, write declared outputs
//   presets list built-in scenario presets
//   check   run equilibrium/identity/bound invariant suites only (no MC)

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "rmt/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailure = 1;
constexpr int kExitParseError = 2;
constexpr int kExitSolverFailure = 3;

rmt::Json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  return rmt::Json::parse(is);  // throws parse_error with byte position
}

void write_metadata(const std::string& out_dir,
                    const std::vector<rmt::ScenarioResult>& results) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  rmt::Json j;
  j["schema_version"] = 1;
  j["timestamp"] = stamp;  // kept out of the data files on purpose
  rmt::Json arr = rmt::Json::array();
  for (const auto& r : results)
    arr.push_back({{"name", r.name},
                   {"ok", r.ok()},
                   {"message", r.message}});
  j["scenarios"] = arr;
  std::ofstream os(out_dir + "/run_metadata.json");
  os << j.dump(2) << "\n";
}

int run_command(const std::string& config_path, const std::string& out_dir,
                const rmt::RunOverrides& overrides) {
  std::vector<rmt::Scenario> scenarios;
  try {
    const rmt::Json config = load_config(config_path);
    scenarios = rmt::scenarios_from_config(config);
  } catch (const rmt::Json::parse_error& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitParseError;
  }

  std::vector<rmt::ScenarioResult> results;
  bool solver_failed = false;
  bool verdict_failed = false;
  for (const auto& s : scenarios) {
    const rmt::ScenarioResult r = rmt::run_scenario(s, out_dir, overrides);
    std::printf("[%s] %-24s %s\n", r.ok() ? "PASS" : "FAIL", r.name.c_str(),
                r.message.c_str());
    if (!r.solver_ok) solver_failed = true;
    if (!r.invariants_ok || !r.verdict_ok) verdict_failed = true;
    results.push_back(r);
  }
  write_metadata(out_dir, results);
  if (solver_failed) return kExitSolverFailure;
  if (verdict_failed) return kExitVerdictFailure;
  return kExitOk;
}

int presets_command() {
  for (const auto& p : rmt::builtin_presets())
    std::printf("%-22s %s\n", p.name.c_str(), p.description.c_str());
  return kExitOk;
}

int check_command(const std::string& config_path) {
  std::vector<rmt::Scenario> scenarios;
  if (config_path.empty()) {
    scenarios = rmt::builtin_presets();
  } else {
    try {
      scenarios = rmt::scenarios_from_config(load_config(config_path));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitParseError;
    }
  }
  bool all_ok = true, solver_failed = false;
  for (const auto& s : scenarios) {
    const rmt::ScenarioResult r = rmt::check_scenario(s);
    std::printf("[%s] %-24s %s\n", r.ok() ? "PASS" : "FAIL", r.name.c_str(),
                r.message.c_str());
    all_ok = all_ok && r.ok();
    solver_failed = solver_failed || !r.solver_ok;
  }
  if (solver_failed) return kExitSolverFailure;
  return all_ok ? kExitOk : kExitVerdictFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CLT toolkit for mutual information of Gram random matrices"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed_override = 0;
  int workers = 0;
  double alpha = 0.0, var_tol = 0.0;

  auto* run = app.add_subcommand("run", "execute scenarios from a config");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt =
      run->add_option("--seed-override", seed_override, "master seed override");
  auto* workers_opt = run->add_option("--workers", workers, "worker threads");
  auto* alpha_opt = run->add_option("--alpha", alpha, "KS level");
  auto* vt_opt = run->add_option("--var-tol", var_tol, "variance tolerance");

  auto* presets = app.add_subcommand("presets", "list built-in presets");

  std::string check_config;
  auto* check = app.add_subcommand("check", "invariant suites only, no MC");
  check->add_option("--config", check_config, "JSON config path (default: presets)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitParseError : kExitOk;
  }

  try {
    if (presets->parsed()) return presets_command();
    if (check->parsed()) return check_command(check_config);
    rmt::RunOverrides overrides;
    if (seed_opt->count()) overrides.seed = seed_override;
    if (workers_opt->count()) overrides.workers = workers;
    if (alpha_opt->count()) overrides.alpha = alpha;
    if (vt_opt->count()) overrides.var_tol = var_tol;
    return run_command(config_path, out_dir, overrides);
  } catch (const rmt::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerdictFailure;
  }
}
