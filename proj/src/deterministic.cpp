#include "rmt/deterministic.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace rmt {

namespace {

double logdet_hermitian(const MatrixC& M) {
  Eigen::LLT<MatrixC> llt(M);
  if (llt.info() != Eigen::Success)
    throw InvariantViolation("log det argument not positive definite");
  // log det = 2 sum log L_ii, the factor diagonal is real positive.
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

}  // namespace

GammaSet gammas(const ModelSpec& spec, const EquilibriumSolution& sol) {
  // T is Hermitian, so Tr DTDT = sum_{ij} d_i d_j |T_ij|^2 and
  // Tr DTD conj(T) = sum_{ij} d_i d_j T_ij^2; both O(N^2).
  GammaSet g;
  const auto& T = sol.T;
  const auto& Tt = sol.T_tilde;
  double acc = 0.0;
  Complex acc_u{};
  for (int j = 0; j < spec.N; ++j)
    for (int i = 0; i < spec.N; ++i) {
      const double w = spec.d(i) * spec.d(j);
      acc += w * std::norm(T(i, j));
      acc_u += w * T(i, j) * T(i, j);
    }
  g.gamma = acc / spec.n;
  g.gamma_under = acc_u / static_cast<double>(spec.n);

  acc = 0.0;
  acc_u = {};
  for (int j = 0; j < spec.n; ++j)
    for (int i = 0; i < spec.n; ++i) {
      const double w = spec.dtilde(i) * spec.dtilde(j);
      acc += w * std::norm(Tt(i, j));
      acc_u += w * Tt(i, j) * Tt(i, j);
    }
  g.gamma_tilde = acc / spec.n;
  g.gamma_tilde_under = acc_u / static_cast<double>(spec.n);
  return g;
}

double mutual_info_equivalent(const ModelSpec& spec,
                              const EquilibriumSolution& sol) {
  MatrixC M = MatrixC::Zero(spec.N, spec.N);
  M.diagonal() =
      (sol.rho * (1.0 + sol.delta_tilde * spec.d.array())).matrix().cast<Complex>();
  if (!spec.a_is_zero()) {
    const VectorC w = (1.0 + sol.delta * spec.dtilde.array())
                          .inverse()
                          .matrix()
                          .cast<Complex>();
    M.noalias() += spec.A * w.asDiagonal() * spec.A.adjoint();
  }
  const double term1 = logdet_hermitian(M) / spec.N;
  const double term2 =
      (1.0 + sol.delta * spec.dtilde.array()).log().sum() / spec.N;
  return term1 + term2 -
         sol.rho * spec.n * sol.delta * sol.delta_tilde / spec.N;
}

VarianceParts variance_theta(const ModelSpec& spec,
                             const EquilibriumSolution& sol,
                             const EntryDistribution& dist) {
  const GammaSet g = gammas(spec, sol);
  const double rho2 = sol.rho * sol.rho;

  double trace_plain = 0.0;
  Complex trace_under{};
  if (!spec.a_is_zero()) {
    // weights dtilde_j / (1 + delta dtilde_j)^2 on the columns of A
    const VectorR w2d =
        (spec.dtilde.array() /
         (1.0 + sol.delta * spec.dtilde.array()).square())
            .matrix();
    const MatrixC TA = sol.T * spec.A;                            // columns T a_k
    const MatrixC TbarAbar = sol.T.conjugate() * spec.A.conjugate();
    for (int k = 0; k < spec.n; ++k) {
      // n^{-1} Tr D^{1/2} T A W Dt W A^* T D^{1/2}
      //   = n^{-1} sum_k w_k (T a_k)^* D (T a_k), and the conjugated
      //     variant with (T a_k)^* D (conj(T) conj(a_k)).
      const double plain =
          (TA.col(k).array().abs2() * spec.d.array()).sum();
      const Complex under = (TA.col(k).array().conjugate() *
                             TbarAbar.col(k).array() *
                             spec.d.array().cast<Complex>())
                                .sum();
      trace_plain += w2d(k) * plain;
      trace_under += w2d(k) * under;
    }
    trace_plain /= spec.n;
    trace_under /= static_cast<double>(spec.n);
  }

  VarianceParts out;
  out.trace_under = trace_under;
  out.Delta = (1.0 - trace_plain) * (1.0 - trace_plain) -
              rho2 * g.gamma * g.gamma_tilde;
  const Complex vt = dist.vartheta();
  const double under_cross =
      std::norm(vt) * rho2 * (g.gamma_under * g.gamma_tilde_under).real();
  out.Delta_under = std::norm(1.0 - vt * trace_under) - under_cross;

  if (out.Delta <= 0.0 || out.Delta_under <= 0.0)
    throw InvariantViolation("Delta_n or underline Delta_n non-positive");

  const double sum_d2t2 =
      (spec.d.array().square() * sol.T.diagonal().real().array().square())
          .sum();
  const double sum_dt2tt2 = (spec.dtilde.array().square() *
                             sol.T_tilde.diagonal().real().array().square())
                                .sum();
  out.cumulant_term = dist.kappa() * rho2 * sum_d2t2 * sum_dt2tt2 /
                      (static_cast<double>(spec.n) * spec.n);
  out.theta = -std::log(out.Delta) - std::log(out.Delta_under) +
              out.cumulant_term;
  return out;
}

double bias_centered(const ModelSpec& spec, const EquilibriumSolution& sol,
                     const EntryDistribution& dist) {
  if (!spec.a_is_zero())
    throw std::domain_error(
        "bias_centered: closed form only available for A = 0");
  const GammaSet g = gammas(spec, sol);
  const double x = sol.rho * sol.rho * g.gamma * g.gamma_tilde;
  return -0.5 * dist.kappa() * x +
         0.5 * std::log(1.0 - std::norm(dist.vartheta()) * x);
}

FmgDecomposition fmg_decomposition(const ModelSpec& spec,
                                   const EquilibriumSolution& sol) {
  const GammaSet g = gammas(spec, sol);
  const int n = spec.n;
  const double rho2 = sol.rho * sol.rho;

  // w_k = dtilde_k / (1 + delta dtilde_k)^2; S = A^* T A so that
  // a_k^* T a_l = S_kl.
  const VectorR w =
      (spec.dtilde.array() / (1.0 + sol.delta * spec.dtilde.array()).square())
          .matrix();
  MatrixC S;
  VectorR f_term = VectorR::Zero(n);
  if (!spec.a_is_zero()) {
    S.noalias() = spec.A.adjoint() * sol.T * spec.A;
    const MatrixC TA = sol.T * spec.A;
    for (int k = 0; k < n; ++k)
      f_term(k) = w(k) * (TA.col(k).array().abs2() * spec.d.array()).sum();
  }

  FmgDecomposition out;
  out.F.resize(n);
  out.M.resize(n);
  out.G.resize(n);
  out.Delta.resize(n);
  double F = 0.0, M = 0.0, G = 0.0;
  for (int j = 0; j < n; ++j) {
    F += f_term(j) / n;
    const double ttjj = sol.T_tilde(j, j).real();
    M += rho2 * ttjj * ttjj * spec.dtilde(j) * spec.dtilde(j) / n;
    if (!spec.a_is_zero()) {
      // pairs (j, l) and (l, j) for l < j enter together; |S_jl| = |S_lj|.
      double inc = 0.0;
      for (int l = 0; l < j; ++l) inc += w(l) * std::norm(S(j, l));
      G += 2.0 * w(j) * inc / n;
    }
    out.F[j] = F;
    out.M[j] = M;
    out.G[j] = G;
    out.Delta[j] = (1.0 - F) * (1.0 - F) - g.gamma * (M + G);
  }
  return out;
}

namespace {

void add_check(BoundsSuite& suite, const std::string& name, double lower,
               double value, double upper) {
  // tiny slack so exact-equality cases (e.g. D = I) do not flicker
  const double tol = 1e-9 * std::max(1.0, std::abs(value));
  suite.checks.push_back({name, lower, value, upper,
                          value >= lower - tol && value <= upper + tol});
}

}  // namespace

bool BoundsSuite::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

BoundsSuite bounds_suite(const ModelSpec& spec,
                         const EquilibriumSolution& sol) {
  const double rho = sol.rho;
  const double dmax = spec.d_max(), dtmax = spec.dtilde_max();
  const double dmin = spec.d_mean(), dtmin = spec.dtilde_mean();
  const double amax2 = spec.a_max() * spec.a_max();
  const double lp = spec.ell_plus();
  const double denom = rho + dmax * dtmax + amax2;
  const double denom_t = rho + lp * dmax * dtmax + amax2;
  const double inf = std::numeric_limits<double>::infinity();

  const GammaSet g = gammas(spec, sol);
  const MatrixC T2 = sol.T * sol.T;
  const MatrixC Tt2 = sol.T_tilde * sol.T_tilde;
  const double trDT2 =
      (spec.d.array() * T2.diagonal().real().array()).sum() / spec.n;
  const double trDtTt2 =
      (spec.dtilde.array() * Tt2.diagonal().real().array()).sum() / spec.n;
  const double sum_d2t2 =
      (spec.d.array().square() * sol.T.diagonal().real().array().square())
          .sum() /
      spec.n;
  const double sum_dt2tt2 = (spec.dtilde.array().square() *
                             sol.T_tilde.diagonal().real().array().square())
                                .sum() /
                            spec.n;

  BoundsSuite suite;
  add_check(suite, "delta", dmin / denom, sol.delta, lp * dmax / rho);
  add_check(suite, "delta_tilde", dtmin / denom_t, sol.delta_tilde,
            dtmax / rho);
  add_check(suite, "tr_DT2", dmin / (denom * denom), trDT2,
            lp * dmax / (rho * rho));
  add_check(suite, "tr_DtTt2", dtmin / (denom_t * denom_t), trDtTt2,
            dtmax / (rho * rho));
  add_check(suite, "gamma", dmin * dmin / (lp * denom * denom), g.gamma,
            lp * dmax * dmax / (rho * rho));
  add_check(suite, "gamma_tilde", dtmin * dtmin / (denom_t * denom_t),
            g.gamma_tilde, dtmax * dtmax / (rho * rho));
  add_check(suite, "sum_d2t2", dmin * dmin / (lp * denom * denom), sum_d2t2,
            lp * dmax * dmax / (rho * rho));
  add_check(suite, "sum_dt2tt2", dtmin * dtmin / (denom_t * denom_t),
            sum_dt2tt2, dtmax * dtmax / (rho * rho));

  const auto fmg = fmg_decomposition(spec, sol);
  add_check(suite, "F_n_below_one", 0.0, fmg.F_n(), 1.0 - 1e-12);
  const double delta_lb =
      (rho / sol.delta) * trDT2 * (rho / sol.delta_tilde) * trDtTt2;
  add_check(suite, "Delta_lower_bound", delta_lb, fmg.Delta_n(), inf);
  return suite;
}

FluctuationReport make_report(const ModelSpec& spec,
                              const EquilibriumSolution& sol,
                              const EntryDistribution& dist) {
  FluctuationReport r;
  r.rho = sol.rho;
  const GammaSet g = gammas(spec, sol);
  r.gamma = g.gamma;
  r.gamma_tilde = g.gamma_tilde;
  r.gamma_under = g.gamma_under;
  r.gamma_tilde_under = g.gamma_tilde_under;
  r.V = mutual_info_equivalent(spec, sol);
  const VarianceParts v = variance_theta(spec, sol, dist);
  r.Delta = v.Delta;
  r.Delta_under = v.Delta_under;
  r.theta = v.theta;
  r.cumulant_term = v.cumulant_term;
  const auto fmg = fmg_decomposition(spec, sol);
  r.F_n = fmg.F_n();
  r.M_n = fmg.M_n();
  r.G_n = fmg.G_n();
  if (spec.a_is_zero()) r.bias = bias_centered(spec, sol, dist);
  r.bounds_ok = bounds_suite(spec, sol).all_pass();
  return r;
}

}  // namespace rmt
