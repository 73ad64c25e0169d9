#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/stats.hpp"

using namespace rmt;

namespace {

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

MatrixC random_sigma(int N, int n, std::uint64_t seed) {
  Xoshiro256pp rng(seed, 5);
  MatrixC s(N, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < N; ++i)
      s(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0 * n);
  return s;
}

}  // namespace

TEST_CASE("mutual_info closed forms") {
  const MatrixC zero = MatrixC::Zero(5, 7);
  CHECK(mutual_info(zero, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const MatrixC eye = MatrixC::Identity(6, 6);
  CHECK(mutual_info(eye, 3.0) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("mutual_info agrees with the eigenvalue oracle") {
  for (std::uint64_t s = 1; s <= 12; ++s) {
    const MatrixC sigma = random_sigma(3 + int(s % 14), 4 + int(s % 9), s);
    const double rho = 0.25 * (1 + double(s % 5));
    CHECK(std::abs(mutual_info(sigma, rho) -
                   oracles::mutual_info_eig(sigma, rho)) < 1e-9);
  }
}

TEST_CASE("mutual_info rejects bad input") {
  MatrixC bad = MatrixC::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mutual_info(bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mutual_info(MatrixC::Zero(2, 2), -1.0),
                  std::invalid_argument);
}

TEST_CASE("stieltjes_trace closed forms and range") {
  const MatrixC zero = MatrixC::Zero(4, 4);
  CHECK(stieltjes_trace(zero, -2.0) == doctest::Approx(0.5).epsilon(1e-14));
  const MatrixC eye = MatrixC::Identity(5, 5);
  CHECK(stieltjes_trace(eye, -1.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const MatrixC sigma = random_sigma(6, 8, s);
    const double f = stieltjes_trace(sigma, -1.5);
    CHECK(f > 0.0);
    CHECK(f < 1.0 / 1.5);
  }
  CHECK_THROWS_AS(stieltjes_trace(zero, 1.0), std::invalid_argument);
}

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double sum = 0.0, sum_x2 = 0.0, sum_x14 = 0.0;
  for (int i = 0; i < 8; ++i) {
    sum += w[i];
    sum_x2 += w[i] * x[i] * x[i];
    sum_x14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sum_x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(sum_x14 == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("integral representation of I_n") {
  SUBCASE("Sigma = 0: integrand vanishes") {
    CHECK(integral_representation_check(MatrixC::Zero(4, 4), 1.0, 1e6, 1024) <=
          1e-14);
  }
  SUBCASE("Sigma = I: closed form") {
    CHECK(integral_representation_check(MatrixC::Identity(8, 8), 1.0, 1e6,
                                        1024) <= 1e-6);
  }
  SUBCASE("random Sigma, modest node budget") {
    const MatrixC sigma = random_sigma(8, 8, 3);
    CHECK(integral_representation_check(sigma, 1.0, 1e6, 1000) <= 1e-4);
  }
  SUBCASE("matches the eigenvalue closed form of the truncated integral") {
    const MatrixC sigma = random_sigma(6, 9, 8);
    const double direct = mutual_info(sigma, 0.8);
    const double viaeig = oracles::integral_identity_eig(sigma, 0.8, 1e8);
    CHECK(std::abs(direct - viaeig) < 1e-6);
  }
}

TEST_CASE("run_experiment determinism and worker independence") {
  MCConfig cfg;
  cfg.spec = unit_spec(12, 12, EntryDistribution::complex_gaussian());
  cfg.rho = 1.0;
  cfg.replicates = 64;
  cfg.master_seed = 123;
  cfg.workers = 1;
  const MCResult a = run_experiment(cfg);
  const MCResult b = run_experiment(cfg);
  CHECK(a.values == b.values);
  cfg.workers = 8;
  const MCResult c = run_experiment(cfg);
  CHECK(a.values == c.values);  // bit-identical across worker counts
  CHECK(a.mean == c.mean);
  CHECK(a.variance == c.variance);
  CHECK(a.config_digest == c.config_digest);

  MCConfig other = cfg;
  other.master_seed = 124;
  CHECK(run_experiment(other).values != a.values);
  CHECK(run_experiment(other).config_digest != a.config_digest);
}

TEST_CASE("empirical variance approaches theta at desk scale") {
  // small version of the acceptance run: N = n = 32, R = 600
  const auto spec = unit_spec(32, 32, EntryDistribution::complex_gaussian());
  const auto sol = solve_fundamental(spec, 1.0, 1e-12, 10000);
  const auto v = variance_theta(spec, sol, spec.dist);
  MCConfig cfg;
  cfg.spec = spec;
  cfg.rho = 1.0;
  cfg.replicates = 600;
  cfg.master_seed = 2024;
  cfg.workers = 2;
  const MCResult mc = run_experiment(cfg);
  const double ratio = spec.N * spec.N * mc.variance / v.theta;
  CHECK(ratio > 0.7);
  CHECK(ratio < 1.3);
}

TEST_CASE("covariance identity oracle") {
  SUBCASE("u=0, M=P=I, circular Gaussian: closed form 1/N") {
    const VectorR d = VectorR::Ones(4);
    const MatrixC eye = MatrixC::Identity(4, 4);
    const auto rep = covariance_identity_oracle(
        EntryDistribution::complex_gaussian(), d, eye, eye, VectorC(), 200000,
        1);
    CHECK(rep.closed_form.real() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.closed_form.imag() == doctest::Approx(0.0));
    CHECK(rep.z_score <= 5.0);
  }
  SUBCASE("u=0, M=P=I, Rademacher: variance exactly zero") {
    const VectorR d = VectorR::Ones(4);
    const MatrixC eye = MatrixC::Identity(4, 4);
    const auto rep = covariance_identity_oracle(EntryDistribution::rademacher(),
                                                d, eye, eye, VectorC(), 100000,
                                                2);
    CHECK(std::abs(rep.closed_form) < 1e-14);  // (1 + 1 - 2)/4
    CHECK(std::abs(rep.estimate) < 1e-14);     // Y(I) = 1 a.s.
    CHECK(rep.z_score <= 5.0);
  }
  SUBCASE("u = e1, random Hermitian M = P, QPSK") {
    Xoshiro256pp rng(99, 0);
    MatrixC M(4, 4);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) M(i, j) = Complex(rng.normal(), rng.normal());
    M = Complex(0.5, 0.0) * (M + M.adjoint()).eval();
    VectorC u = VectorC::Zero(4);
    u(0) = 1.0;
    VectorR d(4);
    d << 0.5, 1.0, 1.5, 2.0;
    const auto rep = covariance_identity_oracle(EntryDistribution::qpsk(), d, M,
                                                M, u, 1000000, 3);
    CHECK(rep.z_score <= 5.0);
  }
  SUBCASE("exact mean of the quadratic form") {
    VectorR d(3);
    d << 1.0, 2.0, 3.0;
    MatrixC M = MatrixC::Identity(3, 3) * Complex(2.0, 0.0);
    VectorC u = VectorC::Zero(3);
    u(1) = Complex(0.0, 1.0);
    const Complex mean = quadratic_form_mean(d, M, u);
    CHECK(mean.real() == doctest::Approx(2.0 * 6.0 / 3.0 + 2.0).epsilon(1e-14));
    CHECK(mean.imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("mutual_info matches the eigenvalue path on sampled replicates") {
  auto spec = unit_spec(16, 20, EntryDistribution::noncircular_gaussian(0.5, 0.2));
  spec.A = MatrixC::Constant(16, 20, Complex(0.05, -0.02));
  for (int r = 0; r < 20; ++r) {
    const auto s = sample_sigma(spec, 55, r);
    CHECK(std::abs(mutual_info(s.sigma, 0.7) -
                   oracles::mutual_info_eig(s.sigma, 0.7)) < 1e-9);
  }
}

TEST_CASE("bias experiment: complex Gaussian case has no bias") {
  MCConfig cfg;
  cfg.spec = unit_spec(24, 24, EntryDistribution::complex_gaussian());
  cfg.rho = 1.0;
  cfg.replicates = 1500;
  cfg.master_seed = 31;
  cfg.workers = 2;
  const auto sol = solve_fundamental(cfg.spec, 1.0, 1e-12, 10000);
  const auto res = bias_experiment(cfg, sol, cfg.spec.dist);
  CHECK(res.expected_bias == 0.0);
  CHECK(std::abs(res.z_score) <= 4.0);
}

TEST_CASE("bias experiment: Gaussian with nonzero A still unbiased") {
  // rank-one specular component; the O(1/N) remainder stays inside the
  // Monte Carlo band
  MCConfig cfg;
  cfg.spec = unit_spec(48, 48, EntryDistribution::complex_gaussian());
  cfg.spec.A = MatrixC::Zero(48, 48);
  for (int i = 0; i < 48; ++i) cfg.spec.A(i, 0) = 1.0 / std::sqrt(48.0);
  cfg.rho = 1.0;
  cfg.replicates = 2000;
  cfg.master_seed = 37;
  cfg.workers = 2;
  const auto sol = solve_fundamental(cfg.spec, 1.0, 1e-12, 10000);
  const auto res = bias_experiment(cfg, sol, cfg.spec.dist);
  CHECK(res.expected_bias == 0.0);
  CHECK(std::abs(res.z_score) <= 4.0);
}

TEST_CASE("bias experiment rejects unsupported cases") {
  MCConfig cfg;
  cfg.spec = unit_spec(8, 8, EntryDistribution::rademacher());
  cfg.spec.A(0, 0) = 0.5;
  cfg.rho = 1.0;
  cfg.replicates = 10;
  const auto sol = solve_fundamental(cfg.spec, 1.0, 1e-12, 10000);
  CHECK_THROWS_AS(bias_experiment(cfg, sol, cfg.spec.dist), std::domain_error);
}

TEST_CASE("resolvent trace approaches its deterministic equivalent") {
  const auto spec = unit_spec(48, 48, EntryDistribution::real_gaussian());
  const double gap16 =
      std::abs(resolvent_trace_gap(unit_spec(16, 16, spec.dist), 1.0, 100, 9));
  const double gap48 = std::abs(resolvent_trace_gap(spec, 1.0, 100, 9));
  CHECK(gap48 < gap16);
  CHECK(gap48 < 5e-2);
}
