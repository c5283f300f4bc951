#pragma once

#include <cstdint>
#include <vector>

#include "psr/randomize.hpp"

namespace psr {

struct AlgoConfig {
  // Trust-box scale per coordinate, entries in (0,1). Empty broadcasts 0.5.
  VectorXd eta;
  int n_samples = 1000;
  double conv_tol = 1e-5;  // watts
  int max_outer_iters = 30;
  int stall_iters = 3;     // consecutive sub-conv_tol iterations before stop
  double sdp_tol = 1e-7;
  std::uint64_t seed = 1;
  double eps_floor = 1e-3;  // keeps the trust box from collapsing
  // Covariance floor passed to the rounding step. The SDR covariance often
  // collapses onto a single direction at a box corner; the loop raises the
  // floor to (eps/3)^2 so candidates still cover the trust box.
  double psd_floor = 0.0;
  bool paper_covariance = false;
};

struct RegionPoint {
  double psi = 0.0;              // demanded rate, bits
  double rate_exact = 0.0;       // optimal-combiner rate at lambda, bits
  double rate_constraint = 0.0;  // noise-agnostic-combiner rate, bits
  double energy = 0.0;           // harvested power at lambda, watts
  VectorXd lambda;
  int outer_iters = 0;
  bool converged = false;
};

struct IterRecord {
  int iter = 0;
  VectorXd a;
  VectorXd eps;
  SdrStatus sdr_status = SdrStatus::kNumericalFailure;
  double sdr_objective = 0.0;
  double rounded_energy = 0.0;  // best energy seen through this iteration
  int n_feasible = 0;
};
using IterTrace = std::vector<IterRecord>;

// Expansion-point refinement for one rate demand psi in [0, max_rate(1)].
RegionPoint solve_single(const ChannelRealization& ch, const SystemParams& p,
                         double psi_bits, const AlgoConfig& cfg,
                         IterTrace* trace = nullptr);

// One point per grid entry; per-point RNG streams derive from the psi value,
// so the result does not depend on grid order or concurrency.
std::vector<RegionPoint> sweep_region(const ChannelRealization& ch,
                                      const SystemParams& p,
                                      const std::vector<double>& psi_grid,
                                      const AlgoConfig& cfg);

struct GridOracleResult {
  VectorXd lambda;
  double energy = 0.0;
  bool feasible = false;
};

// Exhaustive scan of the uniform grid over [0,1]^K with spacing delta.
// Refuses grids above 1e8 points.
GridOracleResult grid_oracle(const ChannelRealization& ch,
                             const SystemParams& p, double psi_bits,
                             double delta, bool use_exact_rate);

struct AsPoint {
  std::uint32_t mask = 0;  // bit k set: antenna k on the ID chain
  double rate = 0.0;
  double energy = 0.0;
};

struct AsRegion {
  std::vector<AsPoint> points;     // all 2^K switch configurations
  std::vector<std::size_t> hull;   // upper-right hull vertex indices,
                                   // rate ascending (time-sharing frontier)
};

AsRegion as_region(const ChannelRealization& ch, const SystemParams& p);

// Grid-oracle frontier of the per-antenna rectifier bank receiver.
std::vector<RegionPoint> multichain_region(const ChannelRealization& ch,
                                           const SystemParams& p,
                                           const std::vector<double>& psi_grid,
                                           double delta,
                                           bool use_exact_rate = true);

// Grid-oracle frontier of the power-splitting receiver, matching rows.
std::vector<RegionPoint> oracle_region(const ChannelRealization& ch,
                                       const SystemParams& p,
                                       const std::vector<double>& psi_grid,
                                       double delta,
                                       bool use_exact_rate = false);

}  // namespace psr
