#pragma once

#include <stdexcept>
#include <vector>

#include "rmt/model.hpp"

namespace rmt {

// Converged fixed point (delta, delta_tilde) of the fundamental system at
// z = -rho, together with the deterministic-equivalent matrices
//   T      = (rho (I_N + delta_tilde D) + A (I_n + delta Dtilde)^{-1} A*)^{-1}
//   Ttilde = (rho (I_n + delta Dtilde) + A* (I_N + delta_tilde D)^{-1} A)^{-1}
// Both are Hermitian positive definite for rho > 0.
struct EquilibriumSolution {
  double rho = 0.0;
  double delta = 0.0;
  double delta_tilde = 0.0;
  MatrixC T;        // N x N
  MatrixC T_tilde;  // n x n
  int iterations = 0;
  double residual = 0.0;  // last fixed-point update size
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double rho, double residual,
              int iterations)
      : std::runtime_error(what),
        rho(rho),
        residual(residual),
        iterations(iterations) {}
  double rho;
  double residual;
  int iterations;
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  // Damping kicks in once the update residual has failed to decrease
  // this many times in a row.
  int damping_trigger = 100;
  double damping = 0.5;
};

// Gauss-Seidel fixed-point iteration for (delta, delta_tilde), started
// from the total masses over rho. Throws SolverError on iteration-limit.
EquilibriumSolution solve_fundamental(const ModelSpec& spec, double rho,
                                      const SolverOptions& opts = {});
EquilibriumSolution solve_fundamental(const ModelSpec& spec, double rho,
                                      double tol, int max_iter);

// T and Ttilde for a given (delta, delta_tilde) pair; exposed so tests
// can probe unconverged points.
void build_T(const ModelSpec& spec, double rho, double delta,
             double delta_tilde, MatrixC& T, MatrixC& T_tilde);

// Residuals of the two fixed-point equations at the solution values.
// Both are <= 10 * tol after convergence.
double fixed_point_residual(const ModelSpec& spec,
                            const EquilibriumSolution& sol);

// Frobenius norm of Ttilde minus the resolvent-equivalent expression
//   rho^{-1} W - rho^{-1} W A* T A W,  W = (I + delta Dtilde)^{-1},
// an exact algebraic identity limited only by float error.
double ttilde_consistency_residual(const ModelSpec& spec,
                                   const EquilibriumSolution& sol);

// max_j | [Ttilde]_jj - ( rho (1 + a_j^* Tcal_j a_j + dtilde_j delta) )^{-1} |
// where Tcal_j drops column j of A (direct inversion per column).
double ttilde_diag_identity_residual(const ModelSpec& spec,
                                     const EquilibriumSolution& sol);

// One converged solution per grid point, warm-starting from the
// previous point. Grid must be strictly increasing and positive.
std::vector<EquilibriumSolution> solve_on_grid(const ModelSpec& spec,
                                               const std::vector<double>& rho_grid,
                                               double tol = 1e-12);

}  // namespace rmt
