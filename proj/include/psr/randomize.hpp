#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psr/sdp.hpp"

namespace psr {

struct RoundingConfig {
  int n_samples = 1000;
  std::uint64_t seed = 1;
  double psd_floor = 0.0;  // eigenvalue clamp for the covariance projection
  // Sample with covariance Lambda* instead of Lambda* - lambda* lambda*'.
  bool paper_covariance = false;
};

struct RoundingResult {
  std::optional<VectorXd> best_lambda;
  double best_energy = 0.0;  // watts, meaningful when best_lambda is set
  int n_feasible = 0;
  int candidates_examined = 0;
};

// N draws from N(lambda*, proj_psd(Lambda* - lambda* lambda*')); deterministic
// for a fixed seed.
std::vector<VectorXd> sample_candidates(const SdrSolution& sol,
                                        const RoundingConfig& cfg);

VectorXd clip_to_box(const VectorXd& candidate, const VectorXd& lo,
                     const VectorXd& hi);

// Keeps rate-feasible candidates (rank-1 lifted rate constraint) and returns
// the one with the largest exact harvested energy; ties go to the lowest
// index. Candidates must already be clipped.
RoundingResult filter_and_select(const std::vector<VectorXd>& candidates,
                                 const ProblemData& pd, const SystemParams& p,
                                 double psi_bits, const VectorXd& lo,
                                 const VectorXd& hi);

// sample + clip + filter; falls back to the clipped SDR mean when no sample
// is feasible. An empty result means even the mean violates the rate demand.
RoundingResult round_solution(const SdrSolution& sol, const ProblemData& pd,
                              const SystemParams& p, double psi_bits,
                              const VectorXd& lo, const VectorXd& hi,
                              const RoundingConfig& cfg);

}  // namespace psr
