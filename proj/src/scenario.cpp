#include "rmt/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "rmt/equilibrium.hpp"
#include "rmt/rng.hpp"

namespace rmt {

MatrixC make_a_zero(int N, int n) { return MatrixC::Zero(N, n); }

MatrixC make_a_rank_one(int N, int n, double a_max) {
  // unit vectors with a deterministic phase ramp so that A is genuinely
  // complex and conj(A) != A
  VectorC u(N), v(n);
  for (int i = 0; i < N; ++i)
    u(i) = std::exp(Complex(0.0, 2.0 * M_PI * i / N)) / std::sqrt(double(N));
  for (int j = 0; j < n; ++j)
    v(j) = std::exp(Complex(0.0, -2.0 * M_PI * j / (3.0 * n))) /
           std::sqrt(double(n));
  return a_max * u * v.adjoint();
}

MatrixC make_a_pseudo_unitary(int N, int n, double a_max, std::uint64_t seed) {
  Xoshiro256pp rng(seed, 0);
  MatrixC A(N, n);
  const double is2 = 0.70710678118654752440;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < N; ++i)
      A(i, j) = Complex(is2 * rng.normal(), is2 * rng.normal()) /
                std::sqrt(double(n));
  const double norm = A.jacobiSvd().singularValues()(0);
  return (a_max / norm) * A;
}

namespace {

ModelSpec unit_spec(int N, int n, const EntryDistribution& dist) {
  ModelSpec s;
  s.N = N;
  s.n = n;
  s.d = VectorR::Ones(N);
  s.dtilde = VectorR::Ones(n);
  s.A = make_a_zero(N, n);
  s.dist = dist;
  return s;
}

Scenario make_preset(const std::string& name, const std::string& description,
                     ModelSpec spec, double rho, int replicates) {
  Scenario s;
  s.name = name;
  s.description = description;
  s.spec = std::move(spec);
  s.rho_grid = {rho};
  MCSettings mc;
  mc.replicates = replicates;
  s.mc = mc;
  s.outputs = {"equilibrium", "report", "mc_csv", "qq_csv", "verdict_json"};
  return s;
}

std::vector<Scenario> build_presets() {
  std::vector<Scenario> out;

  out.push_back(make_preset(
      "mp-unit", "N=n=64, D=Dt=I, A=0, rho=1, circular complex Gaussian",
      unit_spec(64, 64, EntryDistribution::complex_gaussian()), 1.0, 2000));

  out.push_back(make_preset(
      "real-gaussian", "unit profiles, A=0, standard real Gaussian entries",
      unit_spec(64, 64, EntryDistribution::real_gaussian()), 1.0, 2000));

  out.push_back(make_preset(
      "rademacher-bias", "A=0 Rademacher entries; exercises the bias formula",
      unit_spec(64, 64, EntryDistribution::rademacher()), 1.0, 5000));

  out.push_back(make_preset(
      "qpsk", "A=0, QPSK entries (kappa=-1)",
      unit_spec(64, 64, EntryDistribution::qpsk()), 1.0, 2000));

  {
    ModelSpec s = unit_spec(64, 64, EntryDistribution::complex_gaussian());
    s.A = make_a_pseudo_unitary(64, 64, 1.0);
    out.push_back(make_preset(
        "signal-plus-noise",
        "D=I, Dt=I, pseudo-unitary A with ||A||=1, circular Gaussian", s, 1.0,
        2000));
  }

  {
    ModelSpec s = unit_spec(64, 64,
                            EntryDistribution::noncircular_gaussian(
                                0.5, M_PI / 6.0));
    s.A = make_a_rank_one(64, 64, 1.0);
    out.push_back(make_preset(
        "rician-noncircular",
        "rank-one A (||A||=1), non-circular Gaussian t=0.5, theta=pi/6", s,
        1.0, 2000));
  }

  // |vartheta| sweep: t in {0, 0.25, 0.5, 0.75, 1}, rank-one A
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    ModelSpec s = unit_spec(64, 64,
                            EntryDistribution::noncircular_gaussian(
                                t, M_PI / 6.0));
    s.A = make_a_rank_one(64, 64, 1.0);
    char name[32], desc[80];
    std::snprintf(name, sizeof(name), "noncircular-t%03d",
                  static_cast<int>(t * 100));
    std::snprintf(desc, sizeof(desc),
                  "non-circular sweep point |vartheta| = %.2f, rank-one A", t);
    out.push_back(make_preset(name, desc, s, 1.0, 1000));
  }
  return out;
}

}  // namespace

const std::vector<Scenario>& builtin_presets() {
  static const std::vector<Scenario> presets = build_presets();
  return presets;
}

const Scenario& preset_by_name(const std::string& name) {
  for (const auto& p : builtin_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset: " + name);
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["spec"] = spec_to_json(s.spec);
  if (s.rho_grid.size() == 1)
    j["rho"] = s.rho_grid.front();
  else
    j["rho_grid"] = s.rho_grid;
  if (s.mc) {
    j["mc"] = Json{{"replicates", s.mc->replicates},
                   {"master_seed", s.mc->master_seed},
                   {"workers", s.mc->workers}};
  }
  j["outputs"] = s.outputs;
  j["alpha"] = s.alpha;
  j["var_tol"] = s.var_tol;
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  if (j.contains("preset")) {
    s = preset_by_name(j.at("preset").get<std::string>());
  }
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  if (s.name.empty()) throw std::invalid_argument("scenario needs a name");
  if (j.contains("spec")) s.spec = spec_from_json(j.at("spec"));
  if (j.contains("rho")) s.rho_grid = {j.at("rho").get<double>()};
  if (j.contains("rho_grid"))
    s.rho_grid = j.at("rho_grid").get<std::vector<double>>();
  if (s.rho_grid.empty()) throw std::invalid_argument("scenario needs rho");
  if (j.contains("mc")) {
    MCSettings mc;
    const auto& m = j.at("mc");
    if (m.contains("replicates")) mc.replicates = m.at("replicates").get<int>();
    if (m.contains("master_seed"))
      mc.master_seed = m.at("master_seed").get<std::uint64_t>();
    if (m.contains("workers")) mc.workers = m.at("workers").get<int>();
    s.mc = mc;
  }
  if (j.contains("outputs"))
    s.outputs = j.at("outputs").get<std::set<std::string>>();
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("var_tol")) s.var_tol = j.at("var_tol").get<double>();
  s.spec.validate();
  return s;
}

std::vector<Scenario> scenarios_from_config(const Json& config) {
  std::vector<Scenario> out;
  std::set<std::string> names;
  for (const auto& j : config.at("scenarios")) {
    Scenario s = scenario_from_json(j);
    if (!names.insert(s.name).second)
      throw std::invalid_argument("duplicate scenario name: " + s.name);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << body;
}

bool invariant_suite_ok(const ModelSpec& spec, const EquilibriumSolution& sol,
                        std::string& message) {
  const double rc = ttilde_consistency_residual(spec, sol);
  const double rd = ttilde_diag_identity_residual(spec, sol);
  if (rc > 1e-8 || rd > 1e-8) {
    message = "Ttilde identity residuals too large";
    return false;
  }
  const auto fmg = fmg_decomposition(spec, sol);
  const auto parts = variance_theta(spec, sol, spec.dist);
  if (std::abs(fmg.Delta_n() - parts.Delta) >
      1e-8 * std::max(1.0, std::abs(parts.Delta))) {
    message = "Delta decomposition does not coincide with Delta_n";
    return false;
  }
  if (!bounds_suite(spec, sol).all_pass()) {
    message = "bound suite failed";
    return false;
  }
  return true;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, const std::string& out_dir,
                            const RunOverrides& overrides) {
  ScenarioResult result;
  result.name = s.name;
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  std::vector<EquilibriumSolution> solutions;
  try {
    solutions = solve_on_grid(s.spec, s.rho_grid, 1e-12);
  } catch (const std::exception& e) {
    result.message = e.what();
    return result;
  }
  result.solver_ok = true;

  const EquilibriumSolution& sol = solutions.front();
  result.invariants_ok = invariant_suite_ok(s.spec, sol, result.message);

  if (s.outputs.count("equilibrium")) {
    Json arr = Json::array();
    for (const auto& sl : solutions) arr.push_back(solution_to_json(sl));
    write_file(dir / (s.name + "_equilibrium.json"),
               arr.dump(2) + "\n");
  }
  if (s.outputs.count("matrices")) {
    write_matrix_binary((dir / (s.name + "_T.bin")).string(), sol.T);
    write_matrix_binary((dir / (s.name + "_Ttilde.bin")).string(),
                        sol.T_tilde);
  }

  std::vector<FluctuationReport> reports;
  for (const auto& sl : solutions)
    reports.push_back(make_report(s.spec, sl, s.spec.dist));
  if (s.outputs.count("report")) {
    Json arr = Json::array();
    std::string csv = report_csv_header();
    for (const auto& r : reports) {
      arr.push_back(report_to_json(r));
      csv += report_csv_row(r);
    }
    write_file(dir / (s.name + "_report.json"), arr.dump(2) + "\n");
    write_file(dir / (s.name + "_report.csv"), csv);
  }

  if (s.mc) {
    MCConfig cfg;
    cfg.spec = s.spec;
    cfg.rho = s.rho_grid.front();
    cfg.replicates = s.mc->replicates;
    cfg.master_seed = overrides.seed.value_or(s.mc->master_seed);
    int workers = overrides.workers.value_or(s.mc->workers);
    if (workers <= 0)
      workers = std::max(1u, std::thread::hardware_concurrency());
    cfg.workers = workers;

    MCResult mc = run_experiment(cfg);
    standardize(mc, reports.front());

    if (s.outputs.count("mc_csv"))
      write_file(dir / (s.name + "_mc.csv"), mc_csv(mc));
    if (s.outputs.count("qq_csv"))
      write_file(dir / (s.name + "_qq.csv"),
                 qq_csv(qq_points(mc.standardized_mean)));
    if (s.outputs.count("verdict_json")) {
      const double alpha = overrides.alpha.value_or(s.alpha);
      const double var_tol = overrides.var_tol.value_or(s.var_tol);
      const NormalityVerdict verdict =
          clt_verdict(mc, reports.front(), alpha, var_tol);
      Json vj = verdict_to_json(verdict);
      vj["config_digest"] = mc.config_digest;
      write_file(dir / (s.name + "_verdict.json"), vj.dump(2) + "\n");
      result.verdict_ok = verdict.pass;
      if (!verdict.pass && result.message.empty())
        result.message = "CLT verdict failed";
    }
  }
  return result;
}

ScenarioResult check_scenario(const Scenario& s) {
  ScenarioResult result;
  result.name = s.name;
  try {
    const EquilibriumSolution sol =
        solve_fundamental(s.spec, s.rho_grid.front(), 1e-12, 10000);
    result.solver_ok = true;
    result.invariants_ok = invariant_suite_ok(s.spec, sol, result.message);
  } catch (const std::exception& e) {
    result.message = e.what();
  }
  return result;
}

}  // namespace rmt
