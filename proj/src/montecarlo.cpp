#include "rmt/montecarlo.hpp"

#include <Eigen/Cholesky>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <thread>

#include "rmt/equilibrium.hpp"
#include "rmt/rng.hpp"

namespace rmt {

namespace {

double logdet_pd(const MatrixC& M) {
  Eigen::LLT<MatrixC> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("matrix not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

// Run fn(r) for r = 0..R-1 over `workers` threads. Work is pulled from
// an atomic counter; each r writes only its own slot, so results do not
// depend on the schedule.
void parallel_replicates(int R, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, R));
  if (workers == 1) {
    for (int r = 0; r < R; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) fn(r);
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_double(std::uint64_t h, double x) {
  return fnv1a(h, &x, sizeof(x));
}

std::string digest_config(const MCConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, &cfg.spec.N, sizeof(cfg.spec.N));
  h = fnv1a(h, &cfg.spec.n, sizeof(cfg.spec.n));
  for (int i = 0; i < cfg.spec.d.size(); ++i) h = fnv1a_double(h, cfg.spec.d(i));
  for (int i = 0; i < cfg.spec.dtilde.size(); ++i)
    h = fnv1a_double(h, cfg.spec.dtilde(i));
  for (int j = 0; j < cfg.spec.A.cols(); ++j)
    for (int i = 0; i < cfg.spec.A.rows(); ++i) {
      h = fnv1a_double(h, cfg.spec.A(i, j).real());
      h = fnv1a_double(h, cfg.spec.A(i, j).imag());
    }
  const int kind = static_cast<int>(cfg.spec.dist.kind);
  h = fnv1a(h, &kind, sizeof(kind));
  h = fnv1a_double(h, cfg.spec.dist.t);
  h = fnv1a_double(h, cfg.spec.dist.theta);
  h = fnv1a_double(h, cfg.rho);
  h = fnv1a(h, &cfg.replicates, sizeof(cfg.replicates));
  h = fnv1a(h, &cfg.master_seed, sizeof(cfg.master_seed));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void MCConfig::validate() const {
  spec.validate();
  if (replicates < 2) throw std::invalid_argument("replicates must be >= 2");
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
}

double mutual_info(const MatrixC& sigma, double rho) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  if (!sigma.allFinite())
    throw std::invalid_argument("mutual_info: non-finite entries");
  const int N = static_cast<int>(sigma.rows());
  MatrixC G = sigma * sigma.adjoint();
  G.diagonal().array() += rho;
  return logdet_pd(G) / N;
}

double stieltjes_trace(const MatrixC& sigma, double z) {
  if (z >= 0.0) throw std::invalid_argument("stieltjes_trace needs z < 0");
  const int N = static_cast<int>(sigma.rows());
  MatrixC G = sigma * sigma.adjoint();
  G.diagonal().array() -= z;
  Eigen::LLT<MatrixC> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("resolvent argument not positive definite");
  return llt.solve(MatrixC::Identity(N, N)).trace().real() / N;
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  // Newton iteration on P_n from the Chebyshev initial guess; standard
  // construction, ~1e-15 accurate.
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

double integral_representation_check(const MatrixC& sigma, double rho,
                                     double upper_cut, int n_quad) {
  if (upper_cut <= rho)
    throw std::invalid_argument("upper_cut must exceed rho");
  if (n_quad < 16) throw std::invalid_argument("n_quad too small");

  const int N = static_cast<int>(sigma.rows());
  const int per_panel = std::min(64, n_quad);
  const int panels = std::max(1, n_quad / per_panel);
  std::vector<double> gl_x, gl_w;
  gauss_legendre(per_panel, gl_x, gl_w);

  // substitute w = e^u: integrand becomes 1 - w f_n(-w) on the log axis
  const double u_lo = std::log(rho), u_hi = std::log(upper_cut);
  const double h = (u_hi - u_lo) / panels;
  double integral = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = u_lo + p * h;
    for (int q = 0; q < per_panel; ++q) {
      const double u = a + 0.5 * h * (gl_x[q] + 1.0);
      const double w = std::exp(u);
      integral += 0.5 * h * gl_w[q] * (1.0 - w * stieltjes_trace(sigma, -w));
    }
  }
  const double tail = (sigma * sigma.adjoint()).trace().real() / N / upper_cut;
  const double estimate = std::log(rho) + integral + tail;
  return std::abs(estimate - mutual_info(sigma, rho));
}

MCResult run_experiment(const MCConfig& cfg) {
  cfg.validate();
  const int R = cfg.replicates;
  MCResult out;
  out.values.assign(R, 0.0);
  out.dim_N = cfg.spec.N;
  out.rho = cfg.rho;
  out.config_digest = digest_config(cfg);

  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  parallel_replicates(R, cfg.workers, [&](int r) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      const SampledMatrix s = sample_sigma(cfg.spec, cfg.master_seed,
                                           static_cast<std::uint64_t>(r));
      out.values[r] = mutual_info(s.sigma, cfg.rho);
    } catch (const std::exception& e) {
      if (!failed.exchange(true))
        first_error = std::make_exception_ptr(std::runtime_error(
            "replicate " + std::to_string(r) + ": " + e.what()));
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  });
  if (failed) std::rethrow_exception(first_error);

  // Fixed reduction order (replicate index) keeps the moments bit-stable.
  double s = 0.0;
  for (int r = 0; r < R; ++r) s += out.values[r];
  out.mean = s / R;
  double ss = 0.0;
  for (int r = 0; r < R; ++r) {
    const double c = out.values[r] - out.mean;
    ss += c * c;
  }
  out.variance = ss / (R - 1);
  return out;
}

void standardize(MCResult& result, const FluctuationReport& report) {
  const double scale = result.dim_N / std::sqrt(report.theta);
  const std::size_t R = result.values.size();
  result.standardized_mean.resize(R);
  result.standardized_v.resize(R);
  for (std::size_t r = 0; r < R; ++r) {
    result.standardized_mean[r] = scale * (result.values[r] - result.mean);
    result.standardized_v[r] = scale * (result.values[r] - report.V);
  }
}

Complex quadratic_form_mean(const VectorR& D_diag, const MatrixC& M,
                            const VectorC& u) {
  const int N = static_cast<int>(D_diag.size());
  Complex mean = (D_diag.array().cast<Complex>() * M.diagonal().array()).sum() /
                 static_cast<double>(N);
  if (u.size()) mean += (u.adjoint() * M * u).value();
  return mean;
}

CovarianceReport covariance_identity_oracle(const EntryDistribution& dist,
                                            const VectorR& D_diag,
                                            const MatrixC& M, const MatrixC& P,
                                            const VectorC& u,
                                            std::int64_t n_samples,
                                            std::uint64_t seed) {
  const int N = static_cast<int>(D_diag.size());
  if (M.rows() != N || M.cols() != N || P.rows() != N || P.cols() != N)
    throw std::invalid_argument("M and P must be N x N");
  if (n_samples < 100000)
    throw std::invalid_argument("covariance oracle needs >= 1e5 samples");
  const VectorC uu = u.size() ? u : VectorC::Zero(N);

  const Complex meanM = quadratic_form_mean(D_diag, M, uu);
  const Complex meanP = quadratic_form_mean(D_diag, P, uu);

  // MC estimate of E[(Y(M)-EY(M))(Y(P)-EY(P))] with exact centering.
  const VectorC scale =
      (D_diag.array().sqrt() / std::sqrt(static_cast<double>(N)))
          .cast<Complex>();
  Xoshiro256pp rng(seed, 0);
  VectorC v(N);
  Complex acc{};
  double acc_re2 = 0.0, acc_im2 = 0.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < N; ++i) v(i) = scale(i) * draw_entry(dist, rng) + uu(i);
    const Complex ym = (v.adjoint() * M * v).value() - meanM;
    const Complex yp = (v.adjoint() * P * v).value() - meanP;
    const Complex w = ym * yp;
    acc += w;
    acc_re2 += w.real() * w.real();
    acc_im2 += w.imag() * w.imag();
  }
  const double m = static_cast<double>(n_samples);
  CovarianceReport rep;
  rep.estimate = acc / m;
  rep.se_re = std::sqrt(
      std::max(acc_re2 / m - rep.estimate.real() * rep.estimate.real(), 0.0) /
      m);
  rep.se_im = std::sqrt(
      std::max(acc_im2 / m - rep.estimate.imag() * rep.estimate.imag(), 0.0) /
      m);

  // Closed form: the eight-term covariance identity.
  const Complex vt = dist.vartheta();
  const Complex vs = dist.varsigma();
  const double kap = dist.kappa();
  const double invN = 1.0 / N, invN2 = invN * invN;
  const double invN32 = invN * std::sqrt(invN);
  const MatrixC D = D_diag.cast<Complex>().asDiagonal();
  const VectorC d32 = D_diag.array().pow(1.5).cast<Complex>();
  const VectorC vdM = M.diagonal();
  const VectorC vdP = P.diagonal();

  Complex cf = invN2 * (M * D * P * D).trace();
  cf += invN * ((uu.adjoint() * M * D * P * uu).value() +
                (uu.adjoint() * P * D * M * uu).value());
  cf += std::norm(vt) * invN2 * (M * D * P.transpose() * D).trace();
  cf += vt * invN * (uu.adjoint() * P * D * M.transpose() * uu.conjugate()).value();
  cf += std::conj(vt) * invN *
        (uu.transpose() * M.transpose() * D * P * uu).value();
  cf += vs * invN32 *
        ((uu.adjoint() * P * d32.asDiagonal() * vdM).value() +
         (uu.adjoint() * M * d32.asDiagonal() * vdP).value());
  cf += std::conj(vs) * invN32 *
        ((vdP.transpose() * d32.asDiagonal() * M * uu).value() +
         (vdM.transpose() * d32.asDiagonal() * P * uu).value());
  cf += kap * invN2 *
        (D_diag.array().square().cast<Complex>() * vdM.array() * vdP.array())
            .sum();
  rep.closed_form = cf;

  const Complex diff = rep.estimate - rep.closed_form;
  // floor the s.e. at the float-accumulation noise of the MC sum, so a
  // degenerate component (e.g. purely real W) does not produce a huge z
  // out of rounding dust
  const double noise_floor =
      1e-12 * (std::abs(rep.estimate) + std::abs(rep.closed_form) + 1.0);
  auto comp_z = [noise_floor](double d, double se) {
    return std::abs(d) / std::max(se, noise_floor);
  };
  rep.z_score = std::max(comp_z(diff.real(), rep.se_re),
                         comp_z(diff.imag(), rep.se_im));
  return rep;
}

BiasExperimentResult bias_experiment(const MCConfig& cfg,
                                     const EquilibriumSolution& sol,
                                     const EntryDistribution& dist) {
  const bool circular_gaussian =
      dist.kind == EntryDistribution::Kind::ComplexGaussianCircular;
  if (!circular_gaussian && !cfg.spec.a_is_zero())
    throw std::domain_error(
        "bias_experiment: A != 0 with non-Gaussian entries has no predicted "
        "bias");

  const MCResult mc = run_experiment(cfg);
  const double V = mutual_info_equivalent(cfg.spec, sol);
  const VarianceParts var = variance_theta(cfg.spec, sol, dist);

  BiasExperimentResult out;
  out.expected_bias =
      cfg.spec.a_is_zero() ? bias_centered(cfg.spec, sol, dist) : 0.0;
  out.empirical_bias = cfg.spec.N * (mc.mean - V);
  out.se = std::sqrt(var.theta / cfg.replicates);
  out.z_score = (out.empirical_bias - out.expected_bias) / out.se;
  return out;
}

double resolvent_trace_gap(const ModelSpec& spec, double rho, int replicates,
                           std::uint64_t seed) {
  const EquilibriumSolution sol = solve_fundamental(spec, rho, 1e-12, 10000);
  const double trT = sol.T.trace().real() / spec.n;

  std::vector<double> traces(replicates, 0.0);
  const int workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  parallel_replicates(replicates, workers, [&](int r) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      const SampledMatrix s =
          sample_sigma(spec, seed, static_cast<std::uint64_t>(r));
      MatrixC G = s.sigma * s.sigma.adjoint();
      G.diagonal().array() += rho;
      Eigen::LLT<MatrixC> llt(G);
      traces[r] =
          llt.solve(MatrixC::Identity(spec.N, spec.N)).trace().real() / spec.n;
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  });
  if (failed) std::rethrow_exception(first_error);

  double mean = 0.0;
  for (double t : traces) mean += t;
  mean /= replicates;
  return mean - trT;
}

}  // namespace rmt
