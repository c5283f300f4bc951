#include "psr/algorithm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace psr {

namespace {

// splitmix64; decouples per-point streams from the user seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t psi_salt(double psi_bits) {
  return std::bit_cast<std::uint64_t>(psi_bits);
}

VectorXd broadcast_eta(const AlgoConfig& cfg, Eigen::Index K) {
  VectorXd eta = cfg.eta;
  if (eta.size() == 0) {
    eta = VectorXd::Constant(K, 0.5);
  } else if (eta.size() == 1 && K > 1) {
    eta = VectorXd::Constant(K, eta[0]);
  }
  if (eta.size() != K) {
    throw std::invalid_argument("eta: dimension mismatch with channel");
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(eta[k] > 0.0 && eta[k] < 1.0)) {
      throw std::invalid_argument("eta: entries must lie in (0, 1)");
    }
  }
  return eta;
}

RegionPoint evaluate_point(const ChannelRealization& ch, const SystemParams& p,
                           double psi, const VectorXd& lambda, int iters,
                           bool converged) {
  RegionPoint pt;
  pt.psi = psi;
  pt.lambda = lambda;
  pt.rate_exact = max_rate(ch, p, lambda);
  pt.rate_constraint = constraint_rate(ch, p, lambda);
  pt.energy = max_energy(ch, p, lambda);
  pt.outer_iters = iters;
  pt.converged = converged;
  return pt;
}

}  // namespace

RegionPoint solve_single(const ChannelRealization& ch, const SystemParams& p,
                         double psi_bits, const AlgoConfig& cfg,
                         IterTrace* trace) {
  p.validate();
  const Eigen::Index K = ch.size();
  const VectorXd eta = broadcast_eta(cfg, K);
  if (!(cfg.conv_tol > 0.0) || cfg.max_outer_iters < 1) {
    throw std::invalid_argument("algo config: conv_tol/max_outer_iters invalid");
  }
  const VectorXd ones = VectorXd::Ones(K);
  const double rate_cap = max_rate(ch, p, ones);
  if (!(psi_bits >= 0.0) || psi_bits > rate_cap * (1.0 + 1e-12) + 1e-12) {
    throw std::invalid_argument("psi: demand exceeds the full-ID rate " +
                                std::to_string(rate_cap));
  }

  // The expansion is undefined at lambda = 1 and the box degenerates at
  // lambda = 0; both region endpoints are exact closed forms.
  if (psi_bits <= 0.0) {
    return evaluate_point(ch, p, psi_bits, VectorXd::Zero(K), 0, true);
  }
  if (psi_bits >= rate_cap * (1.0 - 1e-12)) {
    return evaluate_point(ch, p, psi_bits, ones, 0, true);
  }

  const ProblemData pd = build_problem_data(ch, p);
  VectorXd a = clamp_expansion_point((psi_bits / rate_cap) * ones);

  VectorXd best_lambda;
  double best_energy = -std::numeric_limits<double>::infinity();
  double prev_energy = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iters = 0;

  for (int l = 0; l < cfg.max_outer_iters; ++l) {
    iters = l + 1;
    const VectorXd eps =
        (eta * a.minCoeff()).cwiseMax(cfg.eps_floor);

    IterRecord rec;
    rec.iter = l;
    rec.a = a;
    rec.eps = eps;

    SdrSolution sdr;
    bool assembled = true;
    try {
      const LinearizedEnergy le = linearize_energy(pd, a, p);
      const SdrInstance inst = assemble_sdr(pd, le, psi_bits, a, eps, p);
      sdr = solve_sdr(inst, cfg.sdp_tol);
      rec.sdr_status = sdr.status;
      rec.sdr_objective = sdr.objective;

      if (sdr.status == SdrStatus::kOptimal) {
        RoundingConfig rcfg;
        rcfg.n_samples = cfg.n_samples;
        rcfg.seed = mix_seed(cfg.seed, psi_salt(psi_bits) + 0x51u * l);
        rcfg.psd_floor = cfg.psd_floor;
        rcfg.paper_covariance = cfg.paper_covariance;
        const RoundingResult rr = round_solution(
            sdr, pd, p, psi_bits, inst.box_lo, inst.box_hi, rcfg);
        rec.n_feasible = rr.n_feasible;

        if (rr.best_lambda) {
          if (rr.best_energy > best_energy) {
            best_energy = rr.best_energy;
            best_lambda = *rr.best_lambda;
          }
          a = clamp_expansion_point(*rr.best_lambda);
        }
      } else {
        assembled = false;  // rate unreachable around this expansion point
      }
    } catch (const std::domain_error&) {
      assembled = false;
    }

    rec.rounded_energy = best_energy;
    if (trace) {
      trace->push_back(rec);
    }
    if (!assembled) {
      break;
    }
    // Threshold scales with tau so the iterate path, and with it the reported
    // split, does not depend on the conversion efficiency.
    if (best_energy > -std::numeric_limits<double>::infinity() &&
        best_energy - prev_energy < cfg.conv_tol * p.conversion_efficiency &&
        l >= 1) {
      converged = true;
      break;
    }
    prev_energy = best_energy;
  }

  if (best_lambda.size() == 0) {
    // Nothing feasible was found; report the initialization for diagnostics.
    return evaluate_point(ch, p, psi_bits, a, iters, false);
  }
  return evaluate_point(ch, p, psi_bits, best_lambda, iters,
                        converged && best_lambda.size() > 0);
}

std::vector<RegionPoint> sweep_region(const ChannelRealization& ch,
                                      const SystemParams& p,
                                      const std::vector<double>& psi_grid,
                                      const AlgoConfig& cfg) {
  p.validate();
  const double rate_cap = max_rate(ch, p, VectorXd::Ones(ch.size()));
  for (std::size_t i = 0; i < psi_grid.size(); ++i) {
    if (!(psi_grid[i] >= 0.0) || psi_grid[i] > rate_cap * (1.0 + 1e-12) + 1e-12) {
      throw std::invalid_argument("psi grid: entry " + std::to_string(i) +
                                  " outside [0, max rate]");
    }
    if (i > 0 && psi_grid[i] < psi_grid[i - 1]) {
      throw std::invalid_argument("psi grid: not sorted ascending");
    }
  }
  std::vector<RegionPoint> points;
  points.reserve(psi_grid.size());
  for (double psi : psi_grid) {
    AlgoConfig point_cfg = cfg;
    point_cfg.seed = mix_seed(cfg.seed, psi_salt(psi));
    points.push_back(solve_single(ch, p, psi, point_cfg));
  }
  return points;
}

GridOracleResult grid_oracle(const ChannelRealization& ch,
                             const SystemParams& p, double psi_bits,
                             double delta, bool use_exact_rate) {
  p.validate();
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("delta: must lie in (0, 0.5]");
  }
  const int K = ch.size();
  const long long steps = std::llround(1.0 / delta);
  const double total = std::pow(double(steps + 1), K);
  if (total > 1e8) {
    throw std::invalid_argument("grid too large: ~" + std::to_string(total) +
                                " points exceed 1e8");
  }
  const ProblemData pd = build_problem_data(ch, p);
  const double rate_coeff = std::exp2(psi_bits) - 1.0;

  GridOracleResult best;
  best.lambda = VectorXd::Zero(K);
  best.energy = -std::numeric_limits<double>::infinity();

  VectorXd lambda = VectorXd::Zero(K);
  std::vector<long long> idx(K, 0);
  while (true) {
    bool feasible;
    if (use_exact_rate) {
      feasible = max_rate_from_data(pd, p, lambda) >= psi_bits;
    } else {
      const double s = pd.g1.dot(lambda);
      const double den =
          (lambda.array().square() * pd.Sigma_diag.array()).sum() +
          pd.sigma.dot(lambda);
      feasible = den > 0.0 ? p.transmit_power * s * s >= rate_coeff * den
                           : psi_bits <= 0.0;
    }
    if (feasible) {
      const double energy = max_energy_from_data(pd, p, lambda);
      if (energy > best.energy) {
        best.energy = energy;
        best.lambda = lambda;
        best.feasible = true;
      }
    }
    int k = 0;
    while (k < K && idx[k] == steps) {
      idx[k] = 0;
      lambda[k] = 0.0;
      ++k;
    }
    if (k == K) {
      break;
    }
    ++idx[k];
    lambda[k] = double(idx[k]) / double(steps);
  }
  if (!best.feasible) {
    best.energy = 0.0;
  }
  return best;
}

AsRegion as_region(const ChannelRealization& ch, const SystemParams& p) {
  p.validate();
  const int K = ch.size();
  if (K > 20) {
    throw std::invalid_argument("as_region: more than 20 antennas");
  }
  AsRegion region;
  region.points.reserve(1u << K);
  for (std::uint32_t mask = 0; mask < (1u << K); ++mask) {
    VectorXd lambda = VectorXd::Zero(K);
    for (int k = 0; k < K; ++k) {
      lambda[k] = (mask >> k) & 1u ? 1.0 : 0.0;
    }
    AsPoint pt;
    pt.mask = mask;
    pt.rate = max_rate(ch, p, lambda);
    pt.energy = max_energy(ch, p, lambda);
    region.points.push_back(pt);
  }

  // Upper concave envelope over (rate, energy); time sharing between switch
  // configurations achieves every point below it.
  std::vector<std::size_t> order(region.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const AsPoint& pa = region.points[a];
    const AsPoint& pb = region.points[b];
    return pa.rate != pb.rate ? pa.rate < pb.rate : pa.energy > pb.energy;
  });
  std::vector<std::size_t> hull;
  for (std::size_t i : order) {
    const AsPoint& pt = region.points[i];
    if (!hull.empty() &&
        region.points[hull.back()].rate == pt.rate) {
      continue;  // keep only the highest energy at equal rate
    }
    while (hull.size() >= 2) {
      const AsPoint& p1 = region.points[hull[hull.size() - 2]];
      const AsPoint& p2 = region.points[hull[hull.size() - 1]];
      const double cross = (p2.rate - p1.rate) * (pt.energy - p1.energy) -
                           (pt.rate - p1.rate) * (p2.energy - p1.energy);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  // Drop trailing vertices dominated at equal-or-lower rate; the envelope of
  // interest is the non-increasing Pareto part, which here is the whole chain
  // since energy peaks at the all-EH configuration.
  region.hull = std::move(hull);
  return region;
}

namespace {

std::vector<RegionPoint> grid_frontier(const ChannelRealization& ch,
                                       const SystemParams& p,
                                       const std::vector<double>& psi_grid,
                                       double delta, bool use_exact_rate,
                                       bool multichain_objective) {
  p.validate();
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("delta: must lie in (0, 0.5]");
  }
  const int K = ch.size();
  const long long steps = std::llround(1.0 / delta);
  const double total = std::pow(double(steps + 1), K);
  if (total > 1e8) {
    throw std::invalid_argument("grid too large: ~" + std::to_string(total) +
                                " points exceed 1e8");
  }
  const ProblemData pd = build_problem_data(ch, p);

  struct Best {
    double energy = -std::numeric_limits<double>::infinity();
    VectorXd lambda;
    bool feasible = false;
  };
  std::vector<Best> best(psi_grid.size());

  // One scan serves every demand level: a split feasible at rate r survives
  // all psi <= r, so only the binary search over the sorted grid is per-point.
  VectorXd lambda = VectorXd::Zero(K);
  std::vector<long long> idx(K, 0);
  while (true) {
    const double rate = use_exact_rate
                            ? max_rate_from_data(pd, p, lambda)
                            : constraint_rate_from_data(pd, p, lambda);
    const double energy = multichain_objective
                              ? multichain_energy_from_data(pd, p, lambda)
                              : max_energy_from_data(pd, p, lambda);
    for (std::size_t i = 0; i < psi_grid.size(); ++i) {
      if (psi_grid[i] > rate) {
        break;
      }
      if (energy > best[i].energy) {
        best[i].energy = energy;
        best[i].lambda = lambda;
        best[i].feasible = true;
      }
    }
    int k = 0;
    while (k < K && idx[k] == steps) {
      idx[k] = 0;
      lambda[k] = 0.0;
      ++k;
    }
    if (k == K) {
      break;
    }
    ++idx[k];
    lambda[k] = double(idx[k]) / double(steps);
  }

  std::vector<RegionPoint> points;
  points.reserve(psi_grid.size());
  for (std::size_t i = 0; i < psi_grid.size(); ++i) {
    RegionPoint pt;
    pt.psi = psi_grid[i];
    if (best[i].feasible) {
      pt.lambda = best[i].lambda;
      pt.rate_exact = max_rate(ch, p, pt.lambda);
      pt.rate_constraint = constraint_rate(ch, p, pt.lambda);
      pt.energy = multichain_objective ? multichain_energy(ch, p, pt.lambda)
                                       : max_energy(ch, p, pt.lambda);
      pt.converged = true;
    } else {
      pt.lambda = VectorXd::Zero(K);
      pt.converged = false;
    }
    points.push_back(std::move(pt));
  }
  return points;
}

}  // namespace

std::vector<RegionPoint> multichain_region(const ChannelRealization& ch,
                                           const SystemParams& p,
                                           const std::vector<double>& psi_grid,
                                           double delta, bool use_exact_rate) {
  for (std::size_t i = 1; i < psi_grid.size(); ++i) {
    if (psi_grid[i] < psi_grid[i - 1]) {
      throw std::invalid_argument("psi grid: not sorted ascending");
    }
  }
  return grid_frontier(ch, p, psi_grid, delta, use_exact_rate,
                       /*multichain_objective=*/true);
}

std::vector<RegionPoint> oracle_region(const ChannelRealization& ch,
                                       const SystemParams& p,
                                       const std::vector<double>& psi_grid,
                                       double delta, bool use_exact_rate) {
  for (std::size_t i = 1; i < psi_grid.size(); ++i) {
    if (psi_grid[i] < psi_grid[i - 1]) {
      throw std::invalid_argument("psi grid: not sorted ascending");
    }
  }
  return grid_frontier(ch, p, psi_grid, delta, use_exact_rate,
                       /*multichain_objective=*/false);
}

}  // namespace psr
