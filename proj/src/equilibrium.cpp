#include "rmt/equilibrium.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace rmt {

namespace {

// Inner matrix of T: rho (I_N + dt D) + A (I + d Dtilde)^{-1} A*.
MatrixC t_inner(const ModelSpec& spec, double rho, double delta,
                double delta_tilde) {
  MatrixC M = MatrixC::Zero(spec.N, spec.N);
  M.diagonal() = (rho * (1.0 + delta_tilde * spec.d.array())).matrix().cast<Complex>();
  if (!spec.a_is_zero()) {
    const VectorC w =
        (1.0 + delta * spec.dtilde.array()).inverse().matrix().cast<Complex>();
    M.noalias() += spec.A * w.asDiagonal() * spec.A.adjoint();
  }
  return M;
}

MatrixC ttilde_inner(const ModelSpec& spec, double rho, double delta,
                     double delta_tilde) {
  MatrixC M = MatrixC::Zero(spec.n, spec.n);
  M.diagonal() = (rho * (1.0 + delta * spec.dtilde.array())).matrix().cast<Complex>();
  if (!spec.a_is_zero()) {
    const VectorC w =
        (1.0 + delta_tilde * spec.d.array()).inverse().matrix().cast<Complex>();
    M.noalias() += spec.A.adjoint() * w.asDiagonal() * spec.A;
  }
  return M;
}

MatrixC hermitian_inverse(const MatrixC& M) {
  Eigen::LLT<MatrixC> llt(M);
  if (llt.info() != Eigen::Success)
    throw SolverError("inner matrix not positive definite", 0.0, 0.0, 0);
  MatrixC inv = llt.solve(MatrixC::Identity(M.rows(), M.cols()));
  // Symmetrize to kill factorization roundoff drift.
  inv = Complex(0.5, 0.0) * (inv + inv.adjoint()).eval();
  return inv;
}

// n^{-1} Tr D (inner)^{-1} without forming the full inverse when A = 0.
double delta_update(const ModelSpec& spec, double rho, double delta,
                    double delta_tilde) {
  if (spec.a_is_zero()) {
    return (spec.d.array() / (rho * (1.0 + delta_tilde * spec.d.array()))).sum() /
           spec.n;
  }
  const MatrixC Tinv = t_inner(spec, rho, delta, delta_tilde);
  Eigen::LLT<MatrixC> llt(Tinv);
  if (llt.info() != Eigen::Success)
    throw SolverError("inner matrix not positive definite", rho, 0.0, 0);
  const MatrixC T = llt.solve(MatrixC::Identity(spec.N, spec.N));
  return (spec.d.array() * T.diagonal().real().array()).sum() / spec.n;
}

double delta_tilde_update(const ModelSpec& spec, double rho, double delta,
                          double delta_tilde) {
  if (spec.a_is_zero()) {
    return (spec.dtilde.array() / (rho * (1.0 + delta * spec.dtilde.array()))).sum() /
           spec.n;
  }
  const MatrixC Tinv = ttilde_inner(spec, rho, delta, delta_tilde);
  Eigen::LLT<MatrixC> llt(Tinv);
  if (llt.info() != Eigen::Success)
    throw SolverError("inner matrix not positive definite", rho, 0.0, 0);
  const MatrixC Tt = llt.solve(MatrixC::Identity(spec.n, spec.n));
  return (spec.dtilde.array() * Tt.diagonal().real().array()).sum() / spec.n;
}

EquilibriumSolution solve_from(const ModelSpec& spec, double rho,
                               double delta0, double delta_tilde0,
                               const SolverOptions& opts) {
  spec.validate();
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  if (opts.tol <= 0.0 || opts.max_iter < 1)
    throw std::invalid_argument("tol must be positive, max_iter >= 1");

  double delta = delta0;
  double delta_tilde = delta_tilde0;
  double residual = 0.0;
  double prev_residual = std::numeric_limits<double>::infinity();
  int non_monotone = 0;
  double damping = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double d_new = delta_update(spec, rho, delta, delta_tilde);
    const double d_mix = damping * d_new + (1.0 - damping) * delta;
    const double dt_new = delta_tilde_update(spec, rho, d_mix, delta_tilde);
    const double dt_mix = damping * dt_new + (1.0 - damping) * delta_tilde;

    residual = std::max(std::abs(d_mix - delta), std::abs(dt_mix - delta_tilde));
    delta = d_mix;
    delta_tilde = dt_mix;
    if (residual <= opts.tol) break;

    if (residual >= prev_residual) {
      if (++non_monotone >= opts.damping_trigger && damping == 1.0)
        damping = opts.damping;
    } else {
      non_monotone = 0;
    }
    prev_residual = residual;
  }
  if (residual > opts.tol)
    throw SolverError("fixed-point iteration did not converge", rho, residual,
                      it);

  EquilibriumSolution sol;
  sol.rho = rho;
  sol.delta = delta;
  sol.delta_tilde = delta_tilde;
  sol.iterations = it + 1;
  sol.residual = residual;
  build_T(spec, rho, delta, delta_tilde, sol.T, sol.T_tilde);
  return sol;
}

}  // namespace

void build_T(const ModelSpec& spec, double rho, double delta,
             double delta_tilde, MatrixC& T, MatrixC& T_tilde) {
  if (delta <= 0.0 || delta_tilde <= 0.0)
    throw std::invalid_argument("delta and delta_tilde must be positive");
  if (spec.a_is_zero()) {
    // both deterministic equivalents are diagonal when A = 0
    T = MatrixC::Zero(spec.N, spec.N);
    T.diagonal() = (1.0 / (rho * (1.0 + delta_tilde * spec.d.array())))
                       .matrix()
                       .cast<Complex>();
    T_tilde = MatrixC::Zero(spec.n, spec.n);
    T_tilde.diagonal() = (1.0 / (rho * (1.0 + delta * spec.dtilde.array())))
                             .matrix()
                             .cast<Complex>();
    return;
  }
  T = hermitian_inverse(t_inner(spec, rho, delta, delta_tilde));
  T_tilde = hermitian_inverse(ttilde_inner(spec, rho, delta, delta_tilde));
}

EquilibriumSolution solve_fundamental(const ModelSpec& spec, double rho,
                                      const SolverOptions& opts) {
  // Total masses over rho: delta is the Stieltjes transform of a measure
  // of mass n^{-1} Tr D evaluated at -rho, so this starts on the right scale.
  return solve_from(spec, rho, spec.d_mean() / rho, spec.dtilde_mean() / rho,
                    opts);
}

EquilibriumSolution solve_fundamental(const ModelSpec& spec, double rho,
                                      double tol, int max_iter) {
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_fundamental(spec, rho, opts);
}

double fixed_point_residual(const ModelSpec& spec,
                            const EquilibriumSolution& sol) {
  const double rd =
      std::abs((spec.d.array() * sol.T.diagonal().real().array()).sum() / spec.n -
               sol.delta);
  const double rdt = std::abs(
      (spec.dtilde.array() * sol.T_tilde.diagonal().real().array()).sum() /
          spec.n -
      sol.delta_tilde);
  return std::max(rd, rdt);
}

double ttilde_consistency_residual(const ModelSpec& spec,
                                   const EquilibriumSolution& sol) {
  const VectorC w = (1.0 + sol.delta * spec.dtilde.array())
                        .inverse()
                        .matrix()
                        .cast<Complex>();
  MatrixC rhs = MatrixC::Zero(spec.n, spec.n);
  rhs.diagonal() = w / sol.rho;
  if (!spec.a_is_zero()) {
    const MatrixC WAt = w.asDiagonal() * spec.A.adjoint();
    rhs.noalias() -= (WAt * sol.T * WAt.adjoint()) / sol.rho;
  }
  return (sol.T_tilde - rhs).norm();
}

double ttilde_diag_identity_residual(const ModelSpec& spec,
                                     const EquilibriumSolution& sol) {
  if (spec.a_is_zero()) {
    double worst = 0.0;
    for (int j = 0; j < spec.n; ++j) {
      const double rhs =
          1.0 / (sol.rho * (1.0 + spec.dtilde(j) * sol.delta));
      worst = std::max(worst, std::abs(sol.T_tilde(j, j) - rhs));
    }
    return worst;
  }

  const VectorC base_diag =
      (sol.rho * (1.0 + sol.delta_tilde * spec.d.array())).cast<Complex>();
  double worst = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    // Tcal_j: column j of A removed, Dtilde truncated accordingly;
    // delta, delta_tilde stay at the full-system values.
    MatrixC M = MatrixC::Zero(spec.N, spec.N);
    M.diagonal() = base_diag;
    for (int k = 0; k < spec.n; ++k) {
      if (k == j) continue;
      const double wk = 1.0 / (1.0 + sol.delta * spec.dtilde(k));
      M.noalias() += wk * spec.A.col(k) * spec.A.col(k).adjoint();
    }
    const MatrixC Tcal = hermitian_inverse(M);
    const Complex quad = (spec.A.col(j).adjoint() * Tcal * spec.A.col(j)).value();
    const Complex rhs =
        1.0 / (sol.rho * (1.0 + quad + spec.dtilde(j) * sol.delta));
    worst = std::max(worst, std::abs(sol.T_tilde(j, j) - rhs));
  }
  return worst;
}

std::vector<EquilibriumSolution> solve_on_grid(const ModelSpec& spec,
                                               const std::vector<double>& rho_grid,
                                               double tol) {
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (rho_grid[i] <= 0.0)
      throw std::invalid_argument("rho grid must be positive");
    if (i > 0 && rho_grid[i] <= rho_grid[i - 1])
      throw std::invalid_argument("rho grid must be strictly increasing");
  }
  SolverOptions opts;
  opts.tol = tol;
  std::vector<EquilibriumSolution> out;
  out.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    if (out.empty()) {
      out.push_back(solve_fundamental(spec, rho, opts));
    } else {
      out.push_back(
          solve_from(spec, rho, out.back().delta, out.back().delta_tilde, opts));
    }
  }
  return out;
}

}  // namespace rmt
