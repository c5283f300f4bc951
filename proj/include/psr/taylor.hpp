#pragma once

#include "psr/model.hpp"

namespace psr {

// Reformulated problem data over the magnitude-domain variables.
struct ProblemData {
  VectorXd g1;          // |h_k|^2
  VectorXd g2;          // |h_k|
  MatrixXd G1;          // g1 g1^T
  MatrixXd G2;          // P g2 g2^T + sigma_w^2 I
  VectorXd Sigma_diag;  // equivalent antenna noise, |h_k|^2 sigma_w^2
  VectorXd sigma;       // equivalent processing noise, |h_k|^2 sigma_n^2
};

ProblemData build_problem_data(const ChannelRealization& ch,
                               const SystemParams& p);

// Fast evaluators over precomputed data. Callers guarantee lambda in [0,1]^K.
double max_rate_from_data(const ProblemData& pd, const SystemParams& p,
                          const VectorXd& lambda);
double constraint_rate_from_data(const ProblemData& pd, const SystemParams& p,
                                 const VectorXd& lambda);
// Lifted form of constraint_rate >= psi: P (g1.lambda)^2 >= (2^psi - 1) *
// (lambda^T Sigma lambda + sigma^T lambda). The all-zero split counts as
// rate 0, so it is feasible only for psi <= 0.
bool rate_feasible_lifted(const ProblemData& pd, const SystemParams& p,
                          double psi_bits, const VectorXd& lambda);
double max_energy_from_data(const ProblemData& pd, const SystemParams& p,
                            const VectorXd& lambda);
double multichain_energy_from_data(const ProblemData& pd,
                                   const SystemParams& p,
                                   const VectorXd& lambda);

// First-order expansion of sqrt(1 - lambda_k) around a_k. Requires a_k < 1.
double taylor_sqrt(double a_k, double lambda_k);

// Largest admissible expansion coordinate; the curvature of sqrt(1 - x)
// diverges at 1 and the lambda = 1 corner is handled separately.
inline constexpr double kExpansionClamp = 1.0 - 1e-6;
inline constexpr double kExpansionDomainTol = 1e-9;

VectorXd clamp_expansion_point(const VectorXd& a);

// Linearized harvested-energy model around an expansion point a.
struct LinearizedEnergy {
  VectorXd alpha;   // (1 - a_k)^{1/2}
  VectorXd beta;    // a_k (1 - a_k)^{-1/2}
  VectorXd m_diag;  // (1 - a_k)^{-1/2}
  VectorXd zeta;    // alpha + beta / 2
  double gamma;     // alpha'G2 alpha + beta'G2 beta / 4 + alpha'G2 beta
  MatrixXd G2p;     // M G2 M
  MatrixXd G2pp;    // G2 M
};

// Requires a_k <= 1 - 1e-9 for all k; clamp_expansion_point gives the margin.
LinearizedEnergy linearize_energy(const ProblemData& pd, const VectorXd& a,
                                  const SystemParams& p);

// tau * (gamma + lambda' G2p lambda / 4 - zeta' G2pp lambda), watts.
double approx_energy(const LinearizedEnergy& le, const VectorXd& lambda,
                     const SystemParams& p);

}  // namespace psr
