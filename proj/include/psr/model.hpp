#pragma once

#include <Eigen/Dense>
#include <complex>

namespace psr {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Dense algebra throughout; receivers beyond this size are out of scope.
inline constexpr int kMaxAntennas = 16;

// Complex amplitude gains h_1..h_K of the SIMO link.
class ChannelRealization {
 public:
  // Requires K >= 1, all entries finite, at least one entry nonzero.
  explicit ChannelRealization(VectorXcd gains);

  int size() const { return static_cast<int>(gains_.size()); }
  const VectorXcd& gains() const { return gains_; }

  VectorXd magnitudes() const;          // g2 = (|h_1|, ..., |h_K|)
  VectorXd squared_magnitudes() const;  // g1 = (|h_1|^2, ..., |h_K|^2)

 private:
  VectorXcd gains_;
};

struct SystemParams {
  double transmit_power = 0.0;         // P, watts
  double antenna_noise_var = 0.0;      // sigma_w^2, watts
  double processing_noise_var = 0.0;   // sigma_n^2, watts
  double conversion_efficiency = 1.0;  // tau, (0, 1]

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Throws unless every lambda_k lies in [0, 1].
void validate_split(const VectorXd& lambda);

struct IdCombiner {
  VectorXcd u;              // unit Euclidean norm
  bool degenerate = false;  // effective channel L^{1/2} h vanished
};

// Rate of the ID chain with an arbitrary combiner u, bits.
double rate_with_combiner(const ChannelRealization& ch, const SystemParams& p,
                          const VectorXd& lambda, const VectorXcd& u);

// SNR-optimal combiner. The whitened rank-1 SNR matrix has the closed-form
// principal direction u = (L Sw^2 + Sn^2)^{-1} L^{1/2} h; no eigensolver needed.
IdCombiner optimal_id_combiner(const ChannelRealization& ch,
                               const SystemParams& p, const VectorXd& lambda);

// Achievable rate with the optimal combiner, bits.
double max_rate(const ChannelRealization& ch, const SystemParams& p,
                const VectorXd& lambda);

// Rate achieved by the noise-agnostic combiner u = L^{1/2} h, evaluated in the
// exact rate expression, bits. The all-zero split is defined to have rate 0.
double constraint_rate(const ChannelRealization& ch, const SystemParams& p,
                       const VectorXd& lambda);

// Harvested power for unit-modulus combining weights v, watts.
double energy_with_weights(const ChannelRealization& ch, const SystemParams& p,
                           const VectorXd& lambda, const VectorXcd& v);

// Harvested power with co-phased weights v_k = h_k/|h_k| (single-chain), watts.
double max_energy(const ChannelRealization& ch, const SystemParams& p,
                  const VectorXd& lambda);

// Harvested power of the per-antenna rectifier bank (one chain per antenna),
// watts. Lower-bounds max_energy.
double multichain_energy(const ChannelRealization& ch, const SystemParams& p,
                         const VectorXd& lambda);

}  // namespace psr
