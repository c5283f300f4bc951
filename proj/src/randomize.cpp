#include "psr/randomize.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace psr {

namespace {

// Box-Muller on top of mt19937_64; std::normal_distribution's sequence is
// implementation-defined, which would tie seeds to the standard library.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform01() {
    return double(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

std::vector<VectorXd> sample_candidates(const SdrSolution& sol,
                                        const RoundingConfig& cfg) {
  if (sol.status != SdrStatus::kOptimal) {
    throw std::invalid_argument("sample_candidates: solution is not optimal");
  }
  if (cfg.n_samples < 1) {
    throw std::invalid_argument("sample_candidates: n_samples must be >= 1");
  }
  const Eigen::Index K = sol.lambda.size();
  MatrixXd cov = sol.Lambda;
  if (!cfg.paper_covariance) {
    cov -= sol.lambda * sol.lambda.transpose();
  }
  cov = 0.5 * (cov + cov.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd clamped =
      eig.eigenvalues().cwiseMax(std::max(0.0, cfg.psd_floor));
  const MatrixXd factor =
      eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal();

  NormalSource normal(cfg.seed);
  std::vector<VectorXd> samples;
  samples.reserve(cfg.n_samples);
  VectorXd xi(K);
  for (int i = 0; i < cfg.n_samples; ++i) {
    for (Eigen::Index k = 0; k < K; ++k) {
      xi[k] = normal.next();
    }
    samples.push_back(sol.lambda + factor * xi);
  }
  return samples;
}

VectorXd clip_to_box(const VectorXd& candidate, const VectorXd& lo,
                     const VectorXd& hi) {
  if (candidate.size() != lo.size() || candidate.size() != hi.size()) {
    throw std::invalid_argument("clip_to_box: dimension mismatch");
  }
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    if (lo[k] > hi[k]) {
      throw std::invalid_argument("clip_to_box: lo exceeds hi");
    }
  }
  return candidate.cwiseMax(lo).cwiseMin(hi);
}

RoundingResult filter_and_select(const std::vector<VectorXd>& candidates,
                                 const ProblemData& pd, const SystemParams& p,
                                 double psi_bits, const VectorXd& lo,
                                 const VectorXd& hi) {
  RoundingResult result;
  result.candidates_examined = static_cast<int>(candidates.size());
  for (const VectorXd& lambda : candidates) {
    if (!rate_feasible_lifted(pd, p, psi_bits, lambda)) {
      continue;
    }
    ++result.n_feasible;
    const double energy = max_energy_from_data(pd, p, lambda);
    if (!result.best_lambda || energy > result.best_energy) {
      result.best_lambda = lambda;
      result.best_energy = energy;
    }
  }
  (void)lo;
  (void)hi;
  return result;
}

RoundingResult round_solution(const SdrSolution& sol, const ProblemData& pd,
                              const SystemParams& p, double psi_bits,
                              const VectorXd& lo, const VectorXd& hi,
                              const RoundingConfig& cfg) {
  std::vector<VectorXd> candidates = sample_candidates(sol, cfg);
  for (VectorXd& c : candidates) {
    c = clip_to_box(c, lo, hi);
  }
  RoundingResult result = filter_and_select(candidates, pd, p, psi_bits, lo, hi);
  if (!result.best_lambda) {
    const VectorXd mean = clip_to_box(sol.lambda, lo, hi);
    ++result.candidates_examined;
    if (rate_feasible_lifted(pd, p, psi_bits, mean)) {
      result.n_feasible = 1;
      result.best_lambda = mean;
      result.best_energy = max_energy_from_data(pd, p, mean);
    }
  }
  return result;
}

}  // namespace psr
