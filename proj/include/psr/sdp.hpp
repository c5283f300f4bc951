#pragma once

#include <iosfwd>

#include "psr/taylor.hpp"

namespace psr {

// Relaxed linearized split-selection problem over (lambda, Lambda).
// Maximize  obj_offset + <obj_lin_Lambda, Lambda> + obj_lin_lambda . lambda
// subject to
//   <rate_Lambda, Lambda> + rate_lambda . lambda >= 0      (unless trivial)
//   box_lo <= lambda <= box_hi
//   Lambda_kk = diag_coupling_k * lambda_k
//   [[Lambda, lambda], [lambda', 1]] >= 0.
// The conversion efficiency tau is dropped from the objective; the argmax is
// invariant and reported energies re-apply it.
struct SdrInstance {
  int K = 0;
  VectorXd obj_lin_lambda;   // -(G2'')^T zeta
  MatrixXd obj_lin_Lambda;   // G2' / 4
  double obj_offset = 0.0;   // Gamma
  MatrixXd rate_Lambda;      // P G1 - (2^psi - 1) Sigma
  VectorXd rate_lambda;      // -(2^psi - 1) sigma
  bool rate_trivial = false; // psi == 0: the row holds for every PSD lift
  VectorXd box_lo;
  VectorXd box_hi;
  VectorXd diag_coupling;    // expansion point a
};

SdrInstance assemble_sdr(const ProblemData& pd, const LinearizedEnergy& le,
                         double psi_bits, const VectorXd& a,
                         const VectorXd& eps, const SystemParams& p);

enum class SdrStatus {
  kOptimal,
  kInfeasible,
  kMaxIterations,
  kNumericalFailure,
};

const char* to_string(SdrStatus status);

struct KktResiduals {
  double primal_feas = 0.0;     // ||A(x) - b|| / (1 + ||b||)
  double dual_feas = 0.0;       // ||A*(y) - C - Z||_F / (1 + ||C||_F)
  double complementarity = 0.0; // |obj_p - obj_d| / (1 + |obj_p| + |obj_d|)
  double psd_min_eig = 0.0;     // min eig of the returned lifted matrix
};

struct SdrSolution {
  VectorXd lambda;
  MatrixXd Lambda;
  double objective = 0.0;  // obj_offset included, tau excluded
  SdrStatus status = SdrStatus::kNumericalFailure;
  KktResiduals kkt;
  int iterations = 0;
};

// Dense primal-dual path-following solve; deterministic for fixed inputs.
// tol must lie in (0, 1e-4].
SdrSolution solve_sdr(const SdrInstance& inst, double tol);

// True iff the lifted matrix [[Lambda, lambda], [lambda', 1]] has minimum
// eigenvalue >= -tol; equivalent to Lambda - lambda lambda' >= -tol I.
bool check_schur(const MatrixXd& Lambda, const VectorXd& lambda, double tol);

// Plain-text dump for external cross-checking; format documented in README.
void dump_instance(const SdrInstance& inst, std::ostream& os);

}  // namespace psr
