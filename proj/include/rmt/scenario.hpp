#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rmt/model.hpp"
#include "rmt/serialize.hpp"
#include "rmt/stats.hpp"

namespace rmt {

// Deterministic A-matrix presets. "rank_one" is a_max * u v* with unit
// vectors; "pseudo_unitary" is a fixed-seed random matrix rescaled to
// the target spectral norm.
MatrixC make_a_zero(int N, int n);
MatrixC make_a_rank_one(int N, int n, double a_max);
MatrixC make_a_pseudo_unitary(int N, int n, double a_max,
                              std::uint64_t seed = 7);

struct MCSettings {
  int replicates = 2000;
  std::uint64_t master_seed = 20260809;
  int workers = 0;  // 0 = hardware concurrency
};

struct Scenario {
  std::string name;
  std::string description;
  ModelSpec spec;
  std::vector<double> rho_grid;  // size 1 for a single rho
  std::optional<MCSettings> mc;
  std::set<std::string> outputs;  // equilibrium, report, mc_csv, qq_csv, verdict_json
  double alpha = 0.01;
  double var_tol = 0.15;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> alpha;
  std::optional<double> var_tol;
};

struct ScenarioResult {
  std::string name;
  bool solver_ok = false;
  bool invariants_ok = false;
  bool verdict_ok = true;  // stays true when no verdict requested
  std::string message;
  bool ok() const { return solver_ok && invariants_ok && verdict_ok; }
};

Json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

const std::vector<Scenario>& builtin_presets();
const Scenario& preset_by_name(const std::string& name);

// Executes one scenario: equilibrium solve (+ grid), report, optional MC
// and verdict, declared outputs written under out_dir. Never throws for
// verdict failures; solver errors are captured in the result.
ScenarioResult run_scenario(const Scenario& s, const std::string& out_dir,
                            const RunOverrides& overrides = {});

// Invariant suite only (identity residuals, Delta coincidence, bound
// brackets); no Monte Carlo.
ScenarioResult check_scenario(const Scenario& s);

std::vector<Scenario> scenarios_from_config(const Json& config);

}  // namespace rmt
