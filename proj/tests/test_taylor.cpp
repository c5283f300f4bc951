#include "psr/taylor.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace psr {
namespace {

using psrtest::default_params;
using psrtest::preset_h1;

TEST(BuildProblemData, ReferenceChannelMatrices) {
  const ProblemData pd = build_problem_data(preset_h1(), default_params());
  EXPECT_NEAR(pd.g1[0], 0.1681, 1e-12);
  EXPECT_NEAR(pd.g1[1], 0.0841, 1e-12);
  // G2 = 2 g2 g2' + 0.1 I.
  EXPECT_NEAR(pd.G2(0, 0), 0.4362, 1e-12);
  EXPECT_NEAR(pd.G2(0, 1), 0.2378, 1e-12);
  EXPECT_NEAR(pd.G2(1, 0), 0.2378, 1e-12);
  EXPECT_NEAR(pd.G2(1, 1), 0.2682, 1e-12);
  // G1 = g1 g1'.
  EXPECT_NEAR(pd.G1(0, 1), 0.1681 * 0.0841, 1e-14);
  EXPECT_NEAR(pd.Sigma_diag[0], 0.01681, 1e-14);
  EXPECT_NEAR(pd.sigma[1], 0.00841, 1e-14);
}

TEST(BuildProblemData, NoAntennaNoiseMakesG2RankOne) {
  SystemParams p = default_params();
  p.antenna_noise_var = 0.0;
  const ProblemData pd = build_problem_data(preset_h1(), p);
  EXPECT_NEAR(pd.G2.determinant(), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(pd.Sigma_diag.norm(), 0.0);
}

TEST(FastEvaluators, AgreeWithModelPath) {
  std::mt19937_64 rng(7200);
  const SystemParams p = default_params();
  for (int i = 0; i < 200; ++i) {
    const int K = 1 + int(rng() % 5);
    const ChannelRealization ch(psrtest::random_gains(rng, K));
    const ProblemData pd = build_problem_data(ch, p);
    const VectorXd lambda = psrtest::random_lambda(rng, K);
    EXPECT_NEAR(max_rate_from_data(pd, p, lambda), max_rate(ch, p, lambda),
                1e-12);
    EXPECT_NEAR(constraint_rate_from_data(pd, p, lambda),
                constraint_rate(ch, p, lambda), 1e-12);
    EXPECT_NEAR(max_energy_from_data(pd, p, lambda),
                max_energy(ch, p, lambda), 1e-12);
    EXPECT_NEAR(multichain_energy_from_data(pd, p, lambda),
                multichain_energy(ch, p, lambda), 1e-12);
  }
}

TEST(RateFeasibleLifted, MatchesConstraintRateThreshold) {
  std::mt19937_64 rng(7201);
  const SystemParams p = default_params();
  const ChannelRealization ch = preset_h1();
  const ProblemData pd = build_problem_data(ch, p);
  for (int i = 0; i < 200; ++i) {
    const VectorXd lambda = psrtest::random_lambda(rng, 2);
    const double rate = constraint_rate(ch, p, lambda);
    EXPECT_TRUE(rate_feasible_lifted(pd, p, rate - 1e-9, lambda));
    EXPECT_FALSE(rate_feasible_lifted(pd, p, rate + 1e-9, lambda));
  }
  // The all-zero split carries rate 0: only a zero demand is satisfiable.
  EXPECT_TRUE(rate_feasible_lifted(pd, p, 0.0, VectorXd::Zero(2)));
  EXPECT_FALSE(rate_feasible_lifted(pd, p, 0.5, VectorXd::Zero(2)));
}

TEST(TaylorSqrt, ExactAtExpansionPoint) {
  EXPECT_NEAR(taylor_sqrt(0.5, 0.5), std::sqrt(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(taylor_sqrt(0.0, 0.0), 1.0);
}

TEST(TaylorSqrt, FirstOrderErrorBound) {
  const double a = 0.5, l = 0.6;
  const double approx = taylor_sqrt(a, l);
  EXPECT_NEAR(approx, std::sqrt(0.5) - 0.1 / (2.0 * std::sqrt(0.5)), 1e-12);
  const double exact = std::sqrt(1.0 - l);
  // Quadratic remainder: |f''| peaks at lambda inside [a, l].
  const double max_f2 = 0.25 * std::pow(1.0 - l, -1.5);
  EXPECT_LE(std::abs(approx - exact), 0.5 * max_f2 * 0.01);
}

TEST(TaylorSqrt, DomainErrors) {
  EXPECT_THROW(taylor_sqrt(1.0, 0.5), std::domain_error);
  EXPECT_THROW(taylor_sqrt(1.5, 0.5), std::domain_error);
  EXPECT_THROW(taylor_sqrt(-0.1, 0.5), std::domain_error);
}

TEST(ClampExpansionPoint, ClampsIntoDomain) {
  VectorXd a(3);
  a << -0.2, 0.5, 1.0;
  const VectorXd c = clamp_expansion_point(a);
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[1], 0.5);
  EXPECT_DOUBLE_EQ(c[2], kExpansionClamp);
}

TEST(LinearizeEnergy, ZeroExpansionPoint) {
  const SystemParams p = default_params();
  const ProblemData pd = build_problem_data(preset_h1(), p);
  const LinearizedEnergy le = linearize_energy(pd, VectorXd::Zero(2), p);
  EXPECT_TRUE(le.alpha.isApprox(VectorXd::Ones(2)));
  EXPECT_DOUBLE_EQ(le.beta.norm(), 0.0);
  EXPECT_TRUE(le.m_diag.isApprox(VectorXd::Ones(2)));
  EXPECT_TRUE(le.zeta.isApprox(VectorXd::Ones(2)));
  const double expected = max_energy(preset_h1(), p, VectorXd::Zero(2));
  EXPECT_NEAR(approx_energy(le, VectorXd::Zero(2), p), expected, 1e-12);
  EXPECT_NEAR(le.gamma, VectorXd::Ones(2).dot(pd.G2 * VectorXd::Ones(2)),
              1e-12);
}

TEST(LinearizeEnergy, ReferenceMidpoint) {
  const SystemParams p = default_params();
  const ProblemData pd = build_problem_data(preset_h1(), p);
  const VectorXd a = VectorXd::Constant(2, 0.5);
  const LinearizedEnergy le = linearize_energy(pd, a, p);
  // 2 * (0.41 + 0.29)^2 * 0.5 + 0.1 = 0.59 W.
  EXPECT_NEAR(approx_energy(le, a, p), 0.59, 1e-9);
}

TEST(LinearizeEnergy, DomainErrorNamesIndex) {
  const SystemParams p = default_params();
  const ProblemData pd = build_problem_data(preset_h1(), p);
  VectorXd a(2);
  a << 0.3, 1.0 - 1e-12;
  try {
    linearize_energy(pd, a, p);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("a[1]"), std::string::npos);
  }
}

TEST(LinearizeEnergy, ExactAtExpansionPoint) {
  std::mt19937_64 rng(7202);
  const SystemParams p = default_params();
  std::uniform_real_distribution<double> ua(0.0, 0.95);
  for (int i = 0; i < 100; ++i) {
    const int K = 1 + int(rng() % 5);
    const ChannelRealization ch(psrtest::random_gains(rng, K));
    const ProblemData pd = build_problem_data(ch, p);
    VectorXd a(K);
    for (int k = 0; k < K; ++k) {
      a[k] = ua(rng);
    }
    const LinearizedEnergy le = linearize_energy(pd, a, p);
    const double exact = max_energy(ch, p, a);
    EXPECT_NEAR(approx_energy(le, a, p), exact, 1e-9 * (1.0 + exact));
  }
}

TEST(LinearizeEnergy, UnexpandedFormIdentity) {
  // approx_energy(lambda) equals tau (alpha + (beta - M lambda)/2)' G2
  // (alpha + (beta - M lambda)/2) for every lambda, not only near a.
  std::mt19937_64 rng(7203);
  const SystemParams p = default_params();
  std::uniform_real_distribution<double> ua(0.0, 0.9);
  for (int i = 0; i < 100; ++i) {
    const int K = 1 + int(rng() % 5);
    const ChannelRealization ch(psrtest::random_gains(rng, K));
    const ProblemData pd = build_problem_data(ch, p);
    VectorXd a(K);
    for (int k = 0; k < K; ++k) {
      a[k] = ua(rng);
    }
    const LinearizedEnergy le = linearize_energy(pd, a, p);
    const VectorXd lambda = psrtest::random_lambda(rng, K);
    const VectorXd hat =
        le.alpha + 0.5 * (le.beta - le.m_diag.cwiseProduct(lambda));
    const double direct = p.conversion_efficiency * hat.dot(pd.G2 * hat);
    EXPECT_NEAR(approx_energy(le, lambda, p), direct, 1e-12 * (1.0 + direct));
  }
}

TEST(LinearizeEnergy, QuadraticErrorDecay) {
  // Halving the box halves the worst linearization error twice over.
  std::mt19937_64 rng(7204);
  const SystemParams p = default_params();
  // Expansion points clear of both ends so the half-width box never clamps.
  std::uniform_real_distribution<double> ua(0.12, 0.7);
  std::uniform_real_distribution<double> ue(0.02, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 1 + int(rng() % 4);
    const ChannelRealization ch(psrtest::random_gains(rng, K));
    const ProblemData pd = build_problem_data(ch, p);
    VectorXd a(K);
    for (int k = 0; k < K; ++k) {
      a[k] = ua(rng);
    }
    const double eps = ue(rng);
    const LinearizedEnergy le = linearize_energy(pd, a, p);

    auto box_error = [&](double halfwidth) {
      double worst = 0.0;
      // Corner offsets dominate the box error for this concave integrand.
      for (int corner = 0; corner < (1 << K); ++corner) {
        VectorXd lambda(K);
        for (int k = 0; k < K; ++k) {
          lambda[k] = a[k] + ((corner >> k) & 1 ? halfwidth : -halfwidth);
        }
        const double err = std::abs(approx_energy(le, lambda, p) -
                                    max_energy(ch, p, lambda));
        worst = std::max(worst, err);
      }
      return worst;
    };

    const double e_full = box_error(eps);
    const double e_half = box_error(0.5 * eps);
    if (e_half < 1e-14) {
      continue;  // degenerate draw, no curvature in the box
    }
    const double ratio = e_full / e_half;
    EXPECT_GE(ratio, 3.5) << "trial " << trial;
    EXPECT_LE(ratio, 4.5) << "trial " << trial;
  }
}

}  // namespace
}  // namespace psr
