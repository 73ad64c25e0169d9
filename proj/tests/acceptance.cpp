// Acceptance suite: each criterion prints one PASS/FAIL line with the
// measured numbers; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rmt/deterministic.hpp"
#include "rmt/equilibrium.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/scenario.hpp"
#include "rmt/stats.hpp"

using namespace rmt;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ModelSpec unit_spec(int N, int n, EntryDistribution dist) {
  ModelSpec s;
  s.N = N;
  s.n = n;
  s.d = VectorR::Ones(N);
  s.dtilde = VectorR::Ones(n);
  s.A = MatrixC::Zero(N, n);
  s.dist = dist;
  return s;
}

// ---------------------------------------------------------------- 1
void criterion_fixed_point() {
  bool pass = true;
  double worst_err = 0.0, worst_ms = 0.0;
  // untimed warm-up so the first case does not pay allocator/page-in cost
  solve_fundamental(unit_spec(128, 64, EntryDistribution::complex_gaussian()),
                    0.5, 1e-13, 10000);
  for (double c : {0.25, 0.5, 1.0, 2.0}) {
    for (double rho : {0.5, 1.0, 4.0}) {
      const int n = 64;
      const int N = static_cast<int>(c * n);
      const auto spec = unit_spec(N, n, EntryDistribution::complex_gaussian());
      // best of 3 runs: measures the solve cost, filters scheduler blips
      double ms = 1e30;
      EquilibriumSolution sol;
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        sol = solve_fundamental(spec, rho, 1e-13, 10000);
        ms = std::min(ms, 1e3 * seconds_since(t0));
      }
      const double err = std::abs(sol.delta - oracles::delta_quadratic(c, rho));
      worst_err = std::max(worst_err, err);
      worst_ms = std::max(worst_ms, ms);
      if (err > 1e-10 || ms >= 1.0) pass = false;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "fixed point vs quadratic root: max |err| = %.2e (<=1e-10), "
                "max time = %.3f ms (<1)",
                worst_err, worst_ms);
  report(1, pass, buf);
}

// ---------------------------------------------------------------- 2
void criterion_identity_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  double worst_cons = 0.0, worst_diag = 0.0, worst_coin = 0.0;
  int bracket_failures = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const auto spec = oracles::random_spec(1000 + s, 32, 2.0);
    const double rho = 0.4 + 0.1 * double(s % 13);
    const auto sol = solve_fundamental(spec, rho, 1e-12, 10000);
    const double rc = ttilde_consistency_residual(spec, sol);
    const double rd = ttilde_diag_identity_residual(spec, sol);
    const auto fmg = fmg_decomposition(spec, sol);
    const auto v = variance_theta(spec, sol, spec.dist);
    const double coin = std::abs(fmg.Delta_n() - v.Delta) / v.Delta;
    worst_cons = std::max(worst_cons, rc);
    worst_diag = std::max(worst_diag, rd);
    worst_coin = std::max(worst_coin, coin);
    if (!bounds_suite(spec, sol).all_pass()) ++bracket_failures;
    if (rc > 1e-8 || rd > 1e-8 || coin > 1e-8) pass = false;
  }
  if (bracket_failures) pass = false;
  const double elapsed = seconds_since(t0);
  if (elapsed >= 10.0) pass = false;
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "identities on 50 random specs: consistency %.2e, diag %.2e, "
                "|Delta-coincidence| %.2e (<=1e-8 each), bracket failures %d, "
                "%.1f s (<10)",
                worst_cons, worst_diag, worst_coin, bracket_failures, elapsed);
  report(2, pass, buf);
}

// ---------------------------------------------------------------- 3
void criterion_covariance_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const int N = 4;
  const std::vector<EntryDistribution> dists = {
      EntryDistribution::complex_gaussian(), EntryDistribution::real_gaussian(),
      EntryDistribution::qpsk(), EntryDistribution::rademacher(),
      EntryDistribution::noncircular_gaussian(0.5, 0.7)};
  bool pass = true;
  double worst_z = 0.0;
  Xoshiro256pp rng(77, 0);
  for (int cfg = 0; cfg < 10; ++cfg) {
    MatrixC M(N, N), P(N, N);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        M(i, j) = Complex(rng.normal(), rng.normal());
        P(i, j) = Complex(rng.normal(), rng.normal());
      }
    VectorC u(N);
    for (int i = 0; i < N; ++i) u(i) = Complex(rng.normal(), rng.normal()) * 0.5;
    VectorR d(N);
    for (int i = 0; i < N; ++i) d(i) = 0.25 + 2.0 * rng.uniform01();
    const auto& dist = dists[cfg % dists.size()];
    const auto rep =
        covariance_identity_oracle(dist, d, M, P, u, 1000000, 4000 + cfg);
    worst_z = std::max(worst_z, rep.z_score);
    if (rep.z_score > 5.0) pass = false;
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) pass = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "covariance identity, 10 configs x 1e6 samples: max |z| = "
                "%.2f (<=5), %.1f s (<60)",
                worst_z, elapsed);
  report(3, pass, buf);
}

// ---------------------------------------------------------------- 4
void criterion_clt_desk_scale() {
  const auto spec = unit_spec(64, 64, EntryDistribution::complex_gaussian());
  const auto sol = solve_fundamental(spec, 1.0, 1e-12, 10000);
  const auto report_det = make_report(spec, sol, spec.dist);
  MCConfig cfg;
  cfg.spec = spec;
  cfg.rho = 1.0;
  cfg.replicates = 2000;
  cfg.master_seed = 20260809;
  cfg.workers = 2;
  MCResult mc = run_experiment(cfg);
  standardize(mc, report_det);
  const auto verdict = clt_verdict(mc, report_det, 0.01, 0.15);
  const bool pass = verdict.pass;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "CLT at N=n=64, R=2000: var ratio %.3f (in [0.85,1.15]), KS "
                "%.4f vs %.4f, theta %.5f",
                verdict.variance_ratio, verdict.ks_statistic,
                verdict.ks_threshold, report_det.theta);
  report(4, pass, buf);
}

// ---------------------------------------------------------------- 5
void criterion_noncircular_term() {
  ModelSpec spec =
      unit_spec(64, 64, EntryDistribution::noncircular_gaussian(0.5, M_PI / 6));
  spec.A = make_a_rank_one(64, 64, 1.0);
  const auto sol = solve_fundamental(spec, 1.0, 1e-12, 10000);
  const auto v = variance_theta(spec, sol, spec.dist);
  // circular-only formula: -log Delta + cumulant term (Delta_under -> 1)
  const double theta_circ = -std::log(v.Delta) + v.cumulant_term;
  const double gap = v.theta / theta_circ;

  MCConfig cfg;
  cfg.spec = spec;
  cfg.rho = 1.0;
  cfg.replicates = 2000;
  cfg.master_seed = 515151;
  cfg.workers = 2;
  const MCResult mc = run_experiment(cfg);
  const double var_N = spec.N * spec.N * mc.variance;
  const double ratio_full = var_N / v.theta;
  const double ratio_circ = var_N / theta_circ;

  const bool gap_ok = gap >= 1.10;  // spec gate: reject configs under 10%
  const bool full_ok = ratio_full >= 0.85 && ratio_full <= 1.15;
  const bool circ_out = ratio_circ < 0.90 || ratio_circ > 1.10;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "non-circular term: ratio vs full theta %.3f (in "
                "[0.85,1.15]), vs circular-only %.3f (outside [0.9,1.1]), "
                "deterministic gap %.3f (>=1.10)",
                ratio_full, ratio_circ, gap);
  report(5, gap_ok && full_ok && circ_out, buf);
}

// ---------------------------------------------------------------- 6
void criterion_bias() {
  bool pass = true;
  std::string detail = "bias at N=n=64, R=5000:";
  const std::vector<EntryDistribution> dists = {
      EntryDistribution::rademacher(), EntryDistribution::real_gaussian(),
      EntryDistribution::complex_gaussian()};
  for (const auto& dist : dists) {
    ModelSpec spec = unit_spec(64, 64, dist);
    MCConfig cfg;
    cfg.spec = spec;
    cfg.rho = 1.0;
    cfg.replicates = 5000;
    cfg.master_seed = 606060;
    cfg.workers = 2;
    const auto sol = solve_fundamental(spec, 1.0, 1e-12, 10000);
    const auto res = bias_experiment(cfg, sol, dist);
    char buf[120];
    std::snprintf(buf, sizeof(buf), " %s: emp %.4f vs B %.4f (z=%.2f)",
                  dist.kind_name().c_str(), res.empirical_bias,
                  res.expected_bias, res.z_score);
    detail += buf;
    if (std::abs(res.z_score) > 3.0) pass = false;
  }
  report(6, pass, detail);
}

// ---------------------------------------------------------------- 7
void criterion_integral_representation() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  double worst = 0.0;
  Xoshiro256pp rng(333, 0);
  for (int k = 0; k < 20; ++k) {
    const int N = 2 + static_cast<int>(rng() % 15);
    const int n = 2 + static_cast<int>(rng() % 15);
    MatrixC sigma(N, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < N; ++i)
        sigma(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0 * n);
    const double rho = 0.5 + rng.uniform01();
    const double cut = 1e6 * (1.0 + sigma.operatorNorm() * sigma.operatorNorm());
    const double err = integral_representation_check(sigma, rho, cut, 1024);
    worst = std::max(worst, err);
    if (err > 1e-3) pass = false;
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 5.0) pass = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "integral representation, 20 matrices (N<=16): max err %.2e "
                "(<=1e-3), %.1f s (<5)",
                worst, elapsed);
  report(7, pass, buf);
}

// ---------------------------------------------------------------- 8
void criterion_first_order() {
  std::vector<double> gaps;
  for (int n : {16, 64, 256}) {
    const auto spec = unit_spec(n, n, EntryDistribution::real_gaussian());
    gaps.push_back(std::abs(resolvent_trace_gap(spec, 1.0, 200, 808080)));
  }
  const bool decreasing = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  const bool small = gaps[2] <= 5e-2;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "first-order gaps at n={16,64,256}: %.2e > %.2e > %.2e, last "
                "<= 5e-2",
                gaps[0], gaps[1], gaps[2]);
  report(8, decreasing && small, buf);
}

// ---------------------------------------------------------------- 9
void criterion_determinism() {
  MCConfig cfg;
  cfg.spec = unit_spec(24, 32, EntryDistribution::qpsk());
  cfg.rho = 0.8;
  cfg.replicates = 100;
  cfg.master_seed = 909090;
  cfg.workers = 1;
  const MCResult a = run_experiment(cfg);
  cfg.workers = 7;
  const MCResult b = run_experiment(cfg);
  cfg.workers = 2;
  const MCResult c = run_experiment(cfg);
  const bool pass = a.values == b.values && a.values == c.values &&
                    a.mean == b.mean && a.variance == c.variance;
  report(9, pass,
         pass ? "bit-identical replicate values across worker counts {1,7,2}"
              : "replicate values differ across worker counts");
}

}  // namespace

int main() {
  criterion_fixed_point();
  criterion_identity_suite();
  criterion_covariance_oracle();
  criterion_clt_desk_scale();
  criterion_noncircular_term();
  criterion_bias();
  criterion_integral_representation();
  criterion_first_order();
  criterion_determinism();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
