#include "psr/taylor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psr {

ProblemData build_problem_data(const ChannelRealization& ch,
                               const SystemParams& p) {
  p.validate();
  ProblemData pd;
  pd.g1 = ch.squared_magnitudes();
  pd.g2 = ch.magnitudes();
  pd.G1 = pd.g1 * pd.g1.transpose();
  pd.G2 = p.transmit_power * pd.g2 * pd.g2.transpose();
  pd.G2.diagonal().array() += p.antenna_noise_var;
  pd.Sigma_diag = pd.g1 * p.antenna_noise_var;
  pd.sigma = pd.g1 * p.processing_noise_var;
  return pd;
}

double max_rate_from_data(const ProblemData& pd, const SystemParams& p,
                          const VectorXd& lambda) {
  double snr = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    snr += lambda[k] * pd.g1[k] * p.transmit_power /
           (lambda[k] * p.antenna_noise_var + p.processing_noise_var);
  }
  return std::log2(1.0 + snr);
}

double constraint_rate_from_data(const ProblemData& pd, const SystemParams& p,
                                 const VectorXd& lambda) {
  const double s = pd.g1.dot(lambda);
  const double num = p.transmit_power * s * s;
  const double den = (lambda.array().square() * pd.Sigma_diag.array()).sum() +
                     pd.sigma.dot(lambda);
  if (!(den > 0.0)) {
    return 0.0;
  }
  return std::log2(1.0 + num / den);
}

bool rate_feasible_lifted(const ProblemData& pd, const SystemParams& p,
                          double psi_bits, const VectorXd& lambda) {
  const double den = (lambda.array().square() * pd.Sigma_diag.array()).sum() +
                     pd.sigma.dot(lambda);
  if (!(den > 0.0)) {
    return psi_bits <= 0.0;
  }
  const double s = pd.g1.dot(lambda);
  return p.transmit_power * s * s >= (std::exp2(psi_bits) - 1.0) * den;
}

double max_energy_from_data(const ProblemData& pd, const SystemParams& p,
                            const VectorXd& lambda) {
  double coherent = 0.0;
  double diverted = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    coherent += std::sqrt(1.0 - lambda[k]) * pd.g2[k];
    diverted += 1.0 - lambda[k];
  }
  return p.conversion_efficiency *
         (p.transmit_power * coherent * coherent +
          diverted * p.antenna_noise_var);
}

double multichain_energy_from_data(const ProblemData& pd,
                                   const SystemParams& p,
                                   const VectorXd& lambda) {
  double harvested = 0.0;
  double diverted = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    harvested += (1.0 - lambda[k]) * pd.g1[k];
    diverted += 1.0 - lambda[k];
  }
  return p.conversion_efficiency *
         (p.transmit_power * harvested + diverted * p.antenna_noise_var);
}

double taylor_sqrt(double a_k, double lambda_k) {
  if (!(a_k >= 0.0 && a_k < 1.0)) {
    throw std::domain_error("taylor_sqrt: expansion point outside [0, 1)");
  }
  const double root = std::sqrt(1.0 - a_k);
  return root - 0.5 / root * (lambda_k - a_k);
}

VectorXd clamp_expansion_point(const VectorXd& a) {
  return a.cwiseMax(0.0).cwiseMin(kExpansionClamp);
}

LinearizedEnergy linearize_energy(const ProblemData& pd, const VectorXd& a,
                                  const SystemParams& p) {
  p.validate();
  const Eigen::Index K = pd.g2.size();
  if (a.size() != K) {
    throw std::invalid_argument("expansion point: dimension mismatch");
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(a[k] >= 0.0 && a[k] <= 1.0 - kExpansionDomainTol)) {
      throw std::domain_error("expansion point: a[" + std::to_string(k) +
                              "] too close to 1 (or negative)");
    }
  }
  LinearizedEnergy le;
  le.alpha = (VectorXd::Ones(K) - a).cwiseSqrt();
  le.m_diag = le.alpha.cwiseInverse();
  le.beta = a.cwiseProduct(le.m_diag);
  le.zeta = le.alpha + 0.5 * le.beta;
  le.gamma = le.alpha.dot(pd.G2 * le.alpha) +
             0.25 * le.beta.dot(pd.G2 * le.beta) +
             le.alpha.dot(pd.G2 * le.beta);
  le.G2p = le.m_diag.asDiagonal() * pd.G2 * le.m_diag.asDiagonal();
  le.G2pp = pd.G2 * le.m_diag.asDiagonal();
  return le;
}

double approx_energy(const LinearizedEnergy& le, const VectorXd& lambda,
                     const SystemParams& p) {
  return p.conversion_efficiency *
         (le.gamma + 0.25 * lambda.dot(le.G2p * lambda) -
          le.zeta.dot(le.G2pp * lambda));
}

}  // namespace psr
