#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmt/deterministic.hpp"
#include "rmt/model.hpp"

namespace rmt {

struct MCConfig {
  ModelSpec spec;
  double rho = 1.0;
  int replicates = 2;
  std::uint64_t master_seed = 0;
  int workers = 1;

  void validate() const;
};

// Replicate values of I_n(rho) and their empirical moments. The two
// standardized sequences (mean-centered and V-centered) are filled by
// standardize() once a FluctuationReport is available.
struct MCResult {
  std::vector<double> values;  // I_n per replicate, index order
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  int dim_N = 0;
  double rho = 0.0;
  std::vector<double> standardized_mean;  // N (I - mean) / sqrt(theta)
  std::vector<double> standardized_v;     // N (I - V) / sqrt(theta)
  std::string config_digest;
};

struct CovarianceReport {
  Complex estimate;
  Complex closed_form;
  double se_re = 0.0;
  double se_im = 0.0;
  double z_score = 0.0;  // worst component z
};

struct BiasExperimentResult {
  double empirical_bias = 0.0;  // N (mean I_n - V_n)
  double expected_bias = 0.0;   // B_n, or 0 in the Gaussian case
  double se = 0.0;              // sqrt(theta / R)
  double z_score = 0.0;
};

// N^{-1} log det(Sigma Sigma^* + rho I) via Hermitian PD factorization.
double mutual_info(const MatrixC& sigma, double rho);

// f_n(z) = N^{-1} Tr (Sigma Sigma^* - z I)^{-1}, z < 0.
double stieltjes_trace(const MatrixC& sigma, double z);

// | log rho + int_rho^cut (1/w - f_n(-w)) dw + tail - mutual_info |,
// composite Gauss-Legendre on the log axis plus the analytic tail
// N^{-1} Tr(Sigma Sigma^*) / cut.
double integral_representation_check(const MatrixC& sigma, double rho,
                                     double upper_cut, int n_quad);

// R replicate values of I_n; bit-identical output for a fixed config
// regardless of worker count.
MCResult run_experiment(const MCConfig& cfg);

// Fill the standardized sequences from a report (theta, V).
void standardize(MCResult& result, const FluctuationReport& report);

// Monte Carlo check of the quadratic-form covariance identity
//   cov(Y(M), Y(P)) with Y(M) = (y+u)^* M (y+u), y = N^{-1/2} D^{1/2} x.
// Returns the MC estimate, the closed-form value, and the worst
// componentwise z-score.
CovarianceReport covariance_identity_oracle(const EntryDistribution& dist,
                                            const VectorR& D_diag,
                                            const MatrixC& M, const MatrixC& P,
                                            const VectorC& u,
                                            std::int64_t n_samples,
                                            std::uint64_t seed = 0xc0de);

// Exact mean E Y(M) = N^{-1} Tr DM + u^* M u of the same quadratic form.
Complex quadratic_form_mean(const VectorR& D_diag, const MatrixC& M,
                            const VectorC& u);

// Compares N (mean - V) against the predicted bias. Supported cases:
// complex circular Gaussian entries (any A, bias 0) and A = 0 (any
// entry kind, bias from the closed form).
BiasExperimentResult bias_experiment(const MCConfig& cfg,
                                     const EquilibriumSolution& sol,
                                     const EntryDistribution& dist);

// mean over replicates of n^{-1} Tr Q(-rho) minus n^{-1} Tr T.
double resolvent_trace_gap(const ModelSpec& spec, double rho, int replicates,
                           std::uint64_t seed);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace rmt
