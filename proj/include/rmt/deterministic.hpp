#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmt/equilibrium.hpp"
#include "rmt/model.hpp"

namespace rmt {

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GammaSet {
  double gamma = 0.0;        // n^{-1} Tr D T D T
  double gamma_tilde = 0.0;  // n^{-1} Tr Dt Tt Dt Tt
  Complex gamma_under;       // n^{-1} Tr D T D conj(T)
  Complex gamma_tilde_under; // n^{-1} Tr Dt Tt Dt conj(Tt)
};

struct VarianceParts {
  double Delta = 0.0;
  double Delta_under = 0.0;
  double cumulant_term = 0.0;
  double theta = 0.0;
  Complex trace_under;  // n^{-1} Tr D^{1/2} conj(T) conj(A) (I+d Dt)^{-2} Dt A* T D^{1/2}
};

// Partial sums of the determinant decomposition; index j runs 1..n with
// entry j-1 holding F_j, M_j, G_j and Delta_j = (1-F_j)^2 - gamma (M_j+G_j).
struct FmgDecomposition {
  std::vector<double> F;
  std::vector<double> M;
  std::vector<double> G;
  std::vector<double> Delta;  // non-increasing in j
  double F_n() const { return F.back(); }
  double M_n() const { return M.back(); }
  double G_n() const { return G.back(); }
  double Delta_n() const { return Delta.back(); }
};

struct BoundCheck {
  std::string name;
  double lower;
  double value;
  double upper;  // +inf when one-sided
  bool pass;
};

struct BoundsSuite {
  std::vector<BoundCheck> checks;
  bool all_pass() const;
};

// Everything the CLT needs about one (spec, rho) pair.
struct FluctuationReport {
  double rho = 0.0;
  double V = 0.0;  // deterministic equivalent of E I_n
  double gamma = 0.0;
  double gamma_tilde = 0.0;
  Complex gamma_under;
  Complex gamma_tilde_under;
  double Delta = 0.0;
  double Delta_under = 0.0;
  double theta = 0.0;
  double cumulant_term = 0.0;
  double F_n = 0.0;
  double M_n = 0.0;
  double G_n = 0.0;
  std::optional<double> bias;  // only when A = 0
  bool bounds_ok = false;
};

GammaSet gammas(const ModelSpec& spec, const EquilibriumSolution& sol);

// V = N^{-1} log det(rho(I+dt D) + A (I+d Dt)^{-1} A*)
//   + N^{-1} log det(I+d Dt) - (rho n / N) d dt
double mutual_info_equivalent(const ModelSpec& spec,
                              const EquilibriumSolution& sol);

// Delta, Delta_under, cumulant term and Theta. Throws InvariantViolation
// if either determinant-like scalar is non-positive (ruled out in theory).
VarianceParts variance_theta(const ModelSpec& spec,
                             const EquilibriumSolution& sol,
                             const EntryDistribution& dist);

// Bias in the centered case: B = -(kappa/2) rho^2 g gt
// + (1/2) log(1 - |vartheta|^2 rho^2 g gt). A must be zero.
double bias_centered(const ModelSpec& spec, const EquilibriumSolution& sol,
                     const EntryDistribution& dist);

FmgDecomposition fmg_decomposition(const ModelSpec& spec,
                                   const EquilibriumSolution& sol);

// The eight delta/gamma/trace estimate brackets plus F_n < 1 and the
// lower bound on Delta_n. Failures are reported, not thrown.
BoundsSuite bounds_suite(const ModelSpec& spec, const EquilibriumSolution& sol);

FluctuationReport make_report(const ModelSpec& spec,
                              const EquilibriumSolution& sol,
                              const EntryDistribution& dist);

}  // namespace rmt
