#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>

namespace rmt {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;

// Entry distributions of the random matrix X. All kinds have zero mean
// and unit second absolute moment; they differ in vartheta = E X^2,
// the fourth cumulant kappa = E|X|^4 - 2 - |vartheta|^2, and
// varsigma = E|X|^2 X.
struct EntryDistribution {
  enum class Kind {
    ComplexGaussianCircular,
    RealGaussian,
    QPSK,
    RademacherReal,
    NonCircularGaussian,
  };

  Kind kind = Kind::ComplexGaussianCircular;
  // NonCircularGaussian parameters: X = e^{i theta}(sqrt((1+t)/2) G1 +
  // i sqrt((1-t)/2) G2), t in [0,1].
  double t = 0.0;
  double theta = 0.0;

  Complex vartheta() const;
  double kappa() const;
  Complex varsigma() const;

  static EntryDistribution complex_gaussian();
  static EntryDistribution real_gaussian();
  static EntryDistribution qpsk();
  static EntryDistribution rademacher();
  static EntryDistribution noncircular_gaussian(double t, double theta);

  std::string kind_name() const;
  static Kind kind_from_name(const std::string& name);
};

// The model Sigma = n^{-1/2} D^{1/2} X Dtilde^{1/2} + A with diagonal
// variance profiles d (length N) and dtilde (length n) and a bounded
// deterministic component A.
struct ModelSpec {
  int N = 0;
  int n = 0;
  VectorR d;       // diagonal of D, length N, nonnegative
  VectorR dtilde;  // diagonal of Dtilde, length n, nonnegative
  MatrixC A;       // N x n
  EntryDistribution dist;

  // Derived norms used by the bound suite.
  double a_max() const;           // spectral norm of A
  double d_max() const { return d.size() ? d.maxCoeff() : 0.0; }
  double dtilde_max() const { return dtilde.size() ? dtilde.maxCoeff() : 0.0; }
  double d_mean() const { return d.sum() / n; }       // n^{-1} Tr D
  double dtilde_mean() const { return dtilde.sum() / n; }
  double ell_plus() const { return static_cast<double>(N) / n; }

  bool a_is_zero() const { return A.size() == 0 || A.isZero(0.0); }

  // Throws std::invalid_argument when dimensions or profile positivity
  // fail. a_max is finite by construction (A has finite entries).
  void validate() const;
};

struct SampledMatrix {
  MatrixC sigma;
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
};

struct MomentCheckReport {
  std::int64_t n_samples = 0;
  Complex mean;              // E X
  double abs2 = 0.0;         // E |X|^2
  Complex square;            // E X^2
  double abs4 = 0.0;         // E |X|^4
  Complex abs2x;             // E |X|^2 X
  double kappa_hat = 0.0;
  // z-scores of the empirical moments against the declared values
  // (max of real/imag component z-scores for complex moments).
  double z_mean = 0.0;
  double z_abs2 = 0.0;
  double z_square = 0.0;
  double z_abs4 = 0.0;
  double z_abs2x = 0.0;
  double z_kappa = 0.0;
  double max_abs_z() const;
};

// Declared moments (vartheta, kappa, varsigma) of a distribution kind.
EntryDistribution::Kind parse_kind(const std::string& name);

// One i.i.d. draw from the distribution, consuming the stream of `rng`.
class Xoshiro256pp;
Complex draw_entry(const EntryDistribution& dist, Xoshiro256pp& rng);

// Sigma = n^{-1/2} D^{1/2} X Dtilde^{1/2} + A, bit-reproducible for a
// fixed (spec, seed, replicate_index). Pure function: safe to call from
// many threads at once.
SampledMatrix sample_sigma(const ModelSpec& spec, std::uint64_t seed,
                           std::uint64_t replicate_index);

// Empirical moments of `n_samples` draws with z-scores against the
// declared values. n_samples >= 1e4 required.
MomentCheckReport empirical_moment_check(const EntryDistribution& dist,
                                         std::int64_t n_samples,
                                         std::uint64_t seed = 0x5eed);

}  // namespace rmt
