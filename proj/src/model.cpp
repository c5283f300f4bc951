#include "psr/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psr {

namespace {

constexpr double kUnitModulusTol = 1e-9;

}  // namespace

ChannelRealization::ChannelRealization(VectorXcd gains)
    : gains_(std::move(gains)) {
  if (gains_.size() < 1) {
    throw std::invalid_argument("channel: needs at least one antenna gain");
  }
  if (gains_.size() > kMaxAntennas) {
    throw std::invalid_argument("channel: more than " +
                                std::to_string(kMaxAntennas) + " antennas");
  }
  bool any_nonzero = false;
  for (Eigen::Index k = 0; k < gains_.size(); ++k) {
    if (!std::isfinite(gains_[k].real()) || !std::isfinite(gains_[k].imag())) {
      throw std::invalid_argument("channel: gain " + std::to_string(k) +
                                  " is not finite");
    }
    any_nonzero |= gains_[k] != std::complex<double>(0.0, 0.0);
  }
  if (!any_nonzero) {
    throw std::invalid_argument("channel: all gains are zero");
  }
}

VectorXd ChannelRealization::magnitudes() const {
  return gains_.cwiseAbs();
}

VectorXd ChannelRealization::squared_magnitudes() const {
  return gains_.cwiseAbs2();
}

void SystemParams::validate() const {
  if (!(transmit_power > 0.0) || !std::isfinite(transmit_power)) {
    throw std::invalid_argument("transmit_power: must be positive and finite");
  }
  if (!(antenna_noise_var >= 0.0) || !std::isfinite(antenna_noise_var)) {
    throw std::invalid_argument("antenna_noise_var: must be nonnegative");
  }
  if (!(processing_noise_var > 0.0) || !std::isfinite(processing_noise_var)) {
    throw std::invalid_argument("processing_noise_var: must be positive");
  }
  if (!(conversion_efficiency > 0.0) || conversion_efficiency > 1.0) {
    throw std::invalid_argument("conversion_efficiency: must be in (0, 1]");
  }
}

void validate_split(const VectorXd& lambda) {
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (!(lambda[k] >= 0.0 && lambda[k] <= 1.0)) {
      throw std::invalid_argument("lambda[" + std::to_string(k) +
                                  "]: outside [0, 1]");
    }
  }
}

double rate_with_combiner(const ChannelRealization& ch, const SystemParams& p,
                          const VectorXd& lambda, const VectorXcd& u) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size() || u.size() != ch.size()) {
    throw std::invalid_argument("lambda/u: dimension mismatch with channel");
  }
  if (u.norm() == 0.0) {
    throw std::invalid_argument("u: combiner must be nonzero");
  }
  const VectorXd sqrt_l = lambda.cwiseSqrt();
  const std::complex<double> signal =
      (u.conjugate().array() * sqrt_l.array() * ch.gains().array()).sum();
  const VectorXd noise_diag =
      lambda * p.antenna_noise_var +
      VectorXd::Constant(lambda.size(), p.processing_noise_var);
  const double denom = (u.cwiseAbs2().array() * noise_diag.array()).sum();
  if (!(denom > 0.0)) {
    throw std::invalid_argument("noise variances: combiner output noise is zero");
  }
  return std::log2(1.0 + std::norm(signal) * p.transmit_power / denom);
}

IdCombiner optimal_id_combiner(const ChannelRealization& ch,
                               const SystemParams& p, const VectorXd& lambda) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size()) {
    throw std::invalid_argument("lambda: dimension mismatch with channel");
  }
  const VectorXd noise_diag =
      lambda * p.antenna_noise_var +
      VectorXd::Constant(lambda.size(), p.processing_noise_var);
  VectorXcd u = (lambda.cwiseSqrt().array() * ch.gains().array() /
                 noise_diag.array())
                    .matrix();
  const double norm = u.norm();
  if (norm == 0.0) {
    // Effective channel vanished; the rate is 0 for every combiner.
    VectorXcd e1 = VectorXcd::Zero(ch.size());
    e1[0] = 1.0;
    return {e1, true};
  }
  return {u / norm, false};
}

double max_rate(const ChannelRealization& ch, const SystemParams& p,
                const VectorXd& lambda) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size()) {
    throw std::invalid_argument("lambda: dimension mismatch with channel");
  }
  const VectorXd g1 = ch.squared_magnitudes();
  double snr = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    snr += lambda[k] * g1[k] * p.transmit_power /
           (lambda[k] * p.antenna_noise_var + p.processing_noise_var);
  }
  return std::log2(1.0 + snr);
}

double constraint_rate(const ChannelRealization& ch, const SystemParams& p,
                       const VectorXd& lambda) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size()) {
    throw std::invalid_argument("lambda: dimension mismatch with channel");
  }
  const VectorXd g1 = ch.squared_magnitudes();
  const double num = p.transmit_power * std::pow(g1.dot(lambda), 2);
  const double den =
      (g1.array() * lambda.array() *
       (lambda.array() * p.antenna_noise_var + p.processing_noise_var))
          .sum();
  if (!(den > 0.0)) {
    return 0.0;  // no signal power reaches the ID chain
  }
  return std::log2(1.0 + num / den);
}

double energy_with_weights(const ChannelRealization& ch, const SystemParams& p,
                           const VectorXd& lambda, const VectorXcd& v) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size() || v.size() != ch.size()) {
    throw std::invalid_argument("lambda/v: dimension mismatch with channel");
  }
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(std::abs(v[k]) - 1.0) > kUnitModulusTol) {
      throw std::invalid_argument("v[" + std::to_string(k) +
                                  "]: weight must have unit magnitude");
    }
  }
  const VectorXd w = (VectorXd::Ones(lambda.size()) - lambda).cwiseSqrt();
  const std::complex<double> combined =
      (v.conjugate().array() * w.array() * ch.gains().array()).sum();
  const double diverted = (VectorXd::Ones(lambda.size()) - lambda).sum();
  return p.conversion_efficiency *
         (p.transmit_power * std::norm(combined) +
          diverted * p.antenna_noise_var);
}

double max_energy(const ChannelRealization& ch, const SystemParams& p,
                  const VectorXd& lambda) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size()) {
    throw std::invalid_argument("lambda: dimension mismatch with channel");
  }
  const VectorXd w = (VectorXd::Ones(lambda.size()) - lambda).cwiseSqrt();
  const double coherent = w.dot(ch.magnitudes());
  const double diverted = (VectorXd::Ones(lambda.size()) - lambda).sum();
  return p.conversion_efficiency *
         (p.transmit_power * coherent * coherent +
          diverted * p.antenna_noise_var);
}

double multichain_energy(const ChannelRealization& ch, const SystemParams& p,
                         const VectorXd& lambda) {
  p.validate();
  validate_split(lambda);
  if (lambda.size() != ch.size()) {
    throw std::invalid_argument("lambda: dimension mismatch with channel");
  }
  const VectorXd one_minus = VectorXd::Ones(lambda.size()) - lambda;
  return p.conversion_efficiency *
         (p.transmit_power * one_minus.dot(ch.squared_magnitudes()) +
          one_minus.sum() * p.antenna_noise_var);
}

}  // namespace psr
