#include "rmt/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rmt/rng.hpp"

namespace rmt {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

Complex EntryDistribution::vartheta() const {
  switch (kind) {
    case Kind::ComplexGaussianCircular:
    case Kind::QPSK:
      return {0.0, 0.0};
    case Kind::RealGaussian:
    case Kind::RademacherReal:
      return {1.0, 0.0};
    case Kind::NonCircularGaussian:
      return t * std::exp(Complex(0.0, 2.0 * theta));
  }
  return {};
}

double EntryDistribution::kappa() const {
  switch (kind) {
    case Kind::ComplexGaussianCircular:
    case Kind::RealGaussian:
    case Kind::NonCircularGaussian:
      return 0.0;
    case Kind::QPSK:
      return -1.0;  // E|X|^4 = 1, vartheta = 0
    case Kind::RademacherReal:
      return -2.0;  // E|X|^4 = 1, vartheta = 1
  }
  return 0.0;
}

Complex EntryDistribution::varsigma() const {
  // All built-in kinds are symmetric enough that E|X|^2 X = 0.
  return {0.0, 0.0};
}

EntryDistribution EntryDistribution::complex_gaussian() {
  return {Kind::ComplexGaussianCircular, 0.0, 0.0};
}
EntryDistribution EntryDistribution::real_gaussian() {
  return {Kind::RealGaussian, 0.0, 0.0};
}
EntryDistribution EntryDistribution::qpsk() { return {Kind::QPSK, 0.0, 0.0}; }
EntryDistribution EntryDistribution::rademacher() {
  return {Kind::RademacherReal, 0.0, 0.0};
}
EntryDistribution EntryDistribution::noncircular_gaussian(double t,
                                                          double theta) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("NonCircularGaussian: t must lie in [0,1]");
  return {Kind::NonCircularGaussian, t, theta};
}

std::string EntryDistribution::kind_name() const {
  switch (kind) {
    case Kind::ComplexGaussianCircular: return "ComplexGaussianCircular";
    case Kind::RealGaussian: return "RealGaussian";
    case Kind::QPSK: return "QPSK";
    case Kind::RademacherReal: return "RademacherReal";
    case Kind::NonCircularGaussian: return "NonCircularGaussian";
  }
  return "?";
}

EntryDistribution::Kind EntryDistribution::kind_from_name(
    const std::string& name) {
  if (name == "ComplexGaussianCircular") return Kind::ComplexGaussianCircular;
  if (name == "RealGaussian") return Kind::RealGaussian;
  if (name == "QPSK") return Kind::QPSK;
  if (name == "RademacherReal") return Kind::RademacherReal;
  if (name == "NonCircularGaussian") return Kind::NonCircularGaussian;
  throw std::invalid_argument("unknown entry-distribution kind: " + name);
}

EntryDistribution::Kind parse_kind(const std::string& name) {
  return EntryDistribution::kind_from_name(name);
}

double ModelSpec::a_max() const {
  if (a_is_zero()) return 0.0;
  return A.jacobiSvd().singularValues()(0);
}

void ModelSpec::validate() const {
  if (N <= 0 || n <= 0) throw std::invalid_argument("N and n must be positive");
  if (d.size() != N) throw std::invalid_argument("d must have length N");
  if (dtilde.size() != n) throw std::invalid_argument("dtilde must have length n");
  if ((d.array() < 0.0).any() || (dtilde.array() < 0.0).any())
    throw std::invalid_argument("variance profiles must be nonnegative");
  if (d.sum() <= 0.0 || dtilde.sum() <= 0.0)
    throw std::invalid_argument("n^{-1} Tr D and n^{-1} Tr Dtilde must be positive");
  if (A.size() != 0 && (A.rows() != N || A.cols() != n))
    throw std::invalid_argument("A must be N x n");
  if (A.size() != 0 && !A.allFinite())
    throw std::invalid_argument("A must have finite entries");
}

Complex draw_entry(const EntryDistribution& dist, Xoshiro256pp& rng) {
  switch (dist.kind) {
    case EntryDistribution::Kind::ComplexGaussianCircular:
      return {kInvSqrt2 * rng.normal(), kInvSqrt2 * rng.normal()};
    case EntryDistribution::Kind::RealGaussian:
      return {rng.normal(), 0.0};
    case EntryDistribution::Kind::QPSK: {
      const std::uint64_t bits = rng();
      return {bits & 1 ? kInvSqrt2 : -kInvSqrt2,
              bits & 2 ? kInvSqrt2 : -kInvSqrt2};
    }
    case EntryDistribution::Kind::RademacherReal:
      return {rng() & 1 ? 1.0 : -1.0, 0.0};
    case EntryDistribution::Kind::NonCircularGaussian: {
      const double sr = std::sqrt(0.5 * (1.0 + dist.t));
      const double si = std::sqrt(0.5 * (1.0 - dist.t));
      const Complex g(sr * rng.normal(), si * rng.normal());
      return std::exp(Complex(0.0, dist.theta)) * g;
    }
  }
  throw std::invalid_argument("invalid entry-distribution kind");
}

SampledMatrix sample_sigma(const ModelSpec& spec, std::uint64_t seed,
                           std::uint64_t replicate_index) {
  spec.validate();
  Xoshiro256pp rng(seed, replicate_index);

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(spec.n));
  const VectorR row_scale = spec.d.array().sqrt() * inv_sqrt_n;
  const VectorR col_scale = spec.dtilde.array().sqrt();

  SampledMatrix out;
  out.seed = seed;
  out.replicate_index = replicate_index;
  out.sigma.resize(spec.N, spec.n);
  // Column-major fill order is part of the reproducibility contract.
  for (int j = 0; j < spec.n; ++j) {
    const double cs = col_scale(j);
    for (int i = 0; i < spec.N; ++i) {
      out.sigma(i, j) = row_scale(i) * cs * draw_entry(spec.dist, rng);
    }
  }
  if (!spec.a_is_zero()) out.sigma += spec.A;
  return out;
}

double MomentCheckReport::max_abs_z() const {
  double m = std::abs(z_mean);
  m = std::max(m, std::abs(z_abs2));
  m = std::max(m, std::abs(z_square));
  m = std::max(m, std::abs(z_abs4));
  m = std::max(m, std::abs(z_abs2x));
  m = std::max(m, std::abs(z_kappa));
  return m;
}

namespace {

// z-score of a complex sample mean against a target, componentwise;
// returns the worse of the two components.
double complex_z(Complex sum, Complex sum_sq_re, std::int64_t m,
                 Complex target) {
  const double mr = sum.real() / m, mi = sum.imag() / m;
  const double vr = std::max(sum_sq_re.real() / m - mr * mr, 0.0);
  const double vi = std::max(sum_sq_re.imag() / m - mi * mi, 0.0);
  const double ser = std::sqrt(vr / m), sei = std::sqrt(vi / m);
  const double zr = ser > 0 ? (mr - target.real()) / ser
                            : (std::abs(mr - target.real()) < 1e-12 ? 0.0
                                                                    : 1e30);
  const double zi = sei > 0 ? (mi - target.imag()) / sei
                            : (std::abs(mi - target.imag()) < 1e-12 ? 0.0
                                                                    : 1e30);
  return std::abs(zr) > std::abs(zi) ? zr : zi;
}

}  // namespace

MomentCheckReport empirical_moment_check(const EntryDistribution& dist,
                                         std::int64_t n_samples,
                                         std::uint64_t seed) {
  if (n_samples < 10000)
    throw std::invalid_argument("empirical_moment_check needs >= 1e4 samples");
  Xoshiro256pp rng(seed, 0);

  Complex s_mean{}, s_sq{}, s_a2x{};
  Complex ss_mean{}, ss_sq{}, ss_a2x{};  // componentwise sums of squares
  double s_a2 = 0, s_a4 = 0, ss_a2 = 0, ss_a4 = 0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Complex x = draw_entry(dist, rng);
    const double a2 = std::norm(x);
    const Complex x2 = x * x;
    const Complex a2x = a2 * x;
    s_mean += x;
    ss_mean += Complex(x.real() * x.real(), x.imag() * x.imag());
    s_sq += x2;
    ss_sq += Complex(x2.real() * x2.real(), x2.imag() * x2.imag());
    s_a2 += a2;
    ss_a2 += a2 * a2;
    s_a4 += a2 * a2;
    ss_a4 += a2 * a2 * a2 * a2;
    s_a2x += a2x;
    ss_a2x += Complex(a2x.real() * a2x.real(), a2x.imag() * a2x.imag());
  }

  const double m = static_cast<double>(n_samples);
  MomentCheckReport r;
  r.n_samples = n_samples;
  r.mean = s_mean / m;
  r.abs2 = s_a2 / m;
  r.square = s_sq / m;
  r.abs4 = s_a4 / m;
  r.abs2x = s_a2x / m;
  r.kappa_hat = r.abs4 - 2.0 - std::norm(r.square);

  r.z_mean = complex_z(s_mean, ss_mean, n_samples, {0.0, 0.0});
  r.z_square = complex_z(s_sq, ss_sq, n_samples, dist.vartheta());
  r.z_abs2x = complex_z(s_a2x, ss_a2x, n_samples, dist.varsigma());
  {
    const double v2 = std::max(ss_a2 / m - r.abs2 * r.abs2, 0.0);
    const double se2 = std::sqrt(v2 / m);
    r.z_abs2 = se2 > 0 ? (r.abs2 - 1.0) / se2
                       : (std::abs(r.abs2 - 1.0) < 1e-12 ? 0.0 : 1e30);
    const double v4 = std::max(ss_a4 / m - r.abs4 * r.abs4, 0.0);
    const double se4 = std::sqrt(v4 / m);
    const double target_abs4 = 2.0 + std::norm(dist.vartheta()) + dist.kappa();
    r.z_abs4 = se4 > 0 ? (r.abs4 - target_abs4) / se4
                       : (std::abs(r.abs4 - target_abs4) < 1e-12 ? 0.0 : 1e30);
    // kappa_hat inherits essentially the abs4 error; the |vartheta|^2
    // correction is second order. Conservative se: se4 plus the
    // propagated vartheta term.
    const Complex vt = r.square;
    const double vt_var_re = std::max(ss_sq.real() / m - vt.real() * vt.real(), 0.0);
    const double vt_var_im = std::max(ss_sq.imag() / m - vt.imag() * vt.imag(), 0.0);
    const double se_vt = std::sqrt((vt_var_re + vt_var_im) / m);
    const double se_k = se4 + 2.0 * std::abs(vt) * se_vt;
    r.z_kappa = se_k > 0 ? (r.kappa_hat - dist.kappa()) / se_k
                         : (std::abs(r.kappa_hat - dist.kappa()) < 1e-12 ? 0.0
                                                                         : 1e30);
  }
  return r;
}

}  // namespace rmt
