#include "pbcs/core_math.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pbcs/errors.hpp"

namespace pbcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_losses(std::mt19937_64& gen, std::size_t n, bool binary = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n);
  for (double& v : c) v = binary ? (u(gen) < 0.5 ? 0.0 : 1.0) : u(gen);
  return c;
}

TEST(SolverTolerancesTest, DefaultsAreValid) { EXPECT_NO_THROW(SolverTolerances{}.validate()); }

TEST(SolverTolerancesTest, RejectsNonPositiveValues) {
  SolverTolerances t;
  t.lambda_tol = 0.0;
  EXPECT_THROW(t.validate(), DomainError);
  t = {};
  t.max_iters = 0;
  EXPECT_THROW(t.validate(), DomainError);
}

TEST(LossVectorTest, RejectsEmptyAndOutOfRange) {
  EXPECT_THROW(LossVector({}), DomainError);
  EXPECT_THROW(LossVector({0.5, 1.5}), DomainError);
  EXPECT_THROW(LossVector({-0.1}), DomainError);
  EXPECT_THROW(LossVector({std::nan("")}), DomainError);
  EXPECT_DOUBLE_EQ(LossVector({0.0, 1.0, 0.5}).mean(), 0.5);
}

TEST(DiscreteDistributionTest, RequiresUnitMass) {
  EXPECT_NO_THROW(DiscreteDistribution({0.1, 0.9}));
  EXPECT_THROW(DiscreteDistribution({0.1, 0.8}), DomainError);
  EXPECT_THROW(DiscreteDistribution({-0.1, 1.1}), DomainError);
  EXPECT_THROW(DiscreteDistribution({}), DomainError);
}

TEST(LogWealthTest, Examples) {
  const std::vector<double> flat{0.5, 0.5};
  EXPECT_EQ(log_wealth(flat, 0.5, 0.7), 0.0);
  const std::vector<double> one{1.0};
  EXPECT_NEAR(log_wealth(one, 0.5, 2.0), std::log(2.0), 1e-15);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(log_wealth(zero, 0.5, 2.0), -kInf);
}

TEST(PsiStarTest, ConstantLossesAtTheirValue) {
  for (double c : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    const std::vector<double> losses(5, c);
    const PsiStarResult r = psi_star(losses, c);
    EXPECT_EQ(r.value, 0.0) << c;
    EXPECT_EQ(r.lambda_star, 0.0) << c;
  }
}

TEST(PsiStarTest, BinaryExampleMatchesScaledKl) {
  const std::vector<double> losses{1, 1, 1, 0};
  const PsiStarResult r = psi_star(losses, 0.5);
  EXPECT_NEAR(r.value, 4.0 * testing::kl_direct(0.75, 0.5), 1e-10);
  EXPECT_NEAR(r.value, 0.523248, 1e-6);
  EXPECT_NEAR(r.value, testing::psi_grid_max(losses, 0.5), 1e-6);
}

TEST(PsiStarTest, ContinuousExampleMatchesGrid) {
  const std::vector<double> losses{0.9, 0.1, 0.5, 0.7};
  const double oracle = testing::psi_grid_max(losses, 0.3);
  EXPECT_NEAR(psi_star(losses, 0.3).value, oracle, 1e-6);
}

TEST(PsiStarTest, SingleLossMaximumAtEndpoint) {
  const std::vector<double> losses{0.8};
  // ln(1 + lambda 0.4) is increasing, so the best bet is 1/mu.
  const PsiStarResult r = psi_star(losses, 0.4);
  EXPECT_NEAR(r.lambda_star, 2.5, 1e-12);
  EXPECT_NEAR(r.value, std::log(2.0), 1e-12);
}

TEST(PsiStarTest, BoundaryMeans) {
  const std::vector<double> zeros(3, 0.0);
  const std::vector<double> mixed{0.0, 0.3};
  EXPECT_EQ(psi_star(zeros, 0.0).value, 0.0);
  EXPECT_EQ(psi_star(mixed, 0.0).value, kInf);
  EXPECT_EQ(psi_star(mixed, 1.0).value, kInf);
  const std::vector<double> ones(3, 1.0);
  EXPECT_EQ(psi_star(ones, 1.0).value, 0.0);
}

TEST(PsiStarTest, RejectsInvalidInputs) {
  const std::vector<double> losses{0.5};
  EXPECT_THROW(psi_star(losses, 1.5), DomainError);
  EXPECT_THROW(psi_star(losses, -0.1), DomainError);
  const std::vector<double> bad{1.2};
  EXPECT_THROW(psi_star(bad, 0.5), DomainError);
}

TEST(PsiStarTest, ThrowsSolverErrorWhenIterationsRunOut) {
  const std::vector<double> losses{0.9, 0.1, 0.5, 0.7};
  SolverTolerances tol;
  tol.max_iters = 3;
  EXPECT_THROW(psi_star(losses, 0.3, tol), SolverError);
}

TEST(PsiStarProperty, ZeroAtEmpiricalMeanAndNonNegative) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_losses(gen, 1 + trial % 16);
    EXPECT_EQ(psi_star(c, mean_of(c)).value, 0.0);
    EXPECT_GE(psi_star(c, u(gen)).value, 0.0);
  }
}

TEST(PsiStarProperty, GridOracleOnRandomInstances) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<std::size_t> size(1, 16);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_losses(gen, size(gen));
    const double mu = u(gen);
    EXPECT_NEAR(psi_star(c, mu).value, testing::psi_grid_max(c, mu, 200'000), 1e-6) << "trial " << trial;
  }
}

TEST(PsiStarProperty, BinaryLossesAttainScaledKl) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = random_losses(gen, 1 + trial % 40, true);
    const double mu = u(gen);
    const double n = static_cast<double>(c.size());
    EXPECT_NEAR(psi_star(c, mu).value, n * bernoulli_kl(mean_of(c), mu), 1e-8);
  }
}

TEST(PsiStarProperty, DominatesScaledKl) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = random_losses(gen, 1 + trial % 40);
    const double mu = u(gen);
    const double n = static_cast<double>(c.size());
    EXPECT_GE(psi_star(c, mu).value, n * bernoulli_kl(mean_of(c), mu) - 1e-9);
  }
}

TEST(PsiStarProperty, ConvexInMean) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  std::uniform_real_distribution<double> t01(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = random_losses(gen, 1 + trial % 20);
    const double a = u(gen);
    const double b = u(gen);
    const double t = t01(gen);
    const double mid = psi_star(c, t * a + (1 - t) * b).value;
    EXPECT_LE(mid, t * psi_star(c, a).value + (1 - t) * psi_star(c, b).value + 1e-8);
  }
}

TEST(PsiStarProperty, MonotoneOnEachSideOfMean) {
  const std::vector<double> c{0.2, 0.9, 0.4, 0.6, 0.1};
  const double m = mean_of(c);
  double prev = psi_star(c, m).value;
  for (double mu = m + 0.01; mu < 1.0; mu += 0.01) {
    const double v = psi_star(c, mu).value;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  prev = psi_star(c, m).value;
  for (double mu = m - 0.01; mu > 0.0; mu -= 0.01) {
    const double v = psi_star(c, mu).value;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  EXPECT_GT(psi_star(c, 1.0 - 1e-9).value, 15.0);
  EXPECT_GT(psi_star(c, 1e-9).value, 15.0);
}

TEST(BernoulliKlTest, Examples) {
  EXPECT_EQ(bernoulli_kl(0.3, 0.3), 0.0);
  EXPECT_NEAR(bernoulli_kl(0.75, 0.5), 0.130812, 1e-6);
  EXPECT_NEAR(bernoulli_kl(0.75, 0.5), testing::kl_direct(0.75, 0.5), 1e-15);
  EXPECT_NEAR(bernoulli_kl(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_EQ(bernoulli_kl(0.5, 1.0), kInf);
  EXPECT_EQ(bernoulli_kl(0.5, 0.0), kInf);
  EXPECT_EQ(bernoulli_kl(1.0, 1.0), 0.0);
}

TEST(BernoulliKlTest, NonNegativeOnGrid) {
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    for (double q = 0.01; q < 1.0; q += 0.05) EXPECT_GE(bernoulli_kl(p, q), 0.0);
  }
}

TEST(KlInverseTest, UpperExamples) {
  EXPECT_EQ(kl_upper_inverse(0.5, 0.0), 0.5);
  for (double c : {0.01, 0.3, 2.0}) EXPECT_NEAR(kl_upper_inverse(0.0, c), 1.0 - std::exp(-c), 1e-12);
  const double mu = kl_upper_inverse(0.2, 0.05);
  EXPECT_GT(mu, 0.2);
  EXPECT_NEAR(bernoulli_kl(0.2, mu), 0.05, 1e-9);
  EXPECT_EQ(kl_upper_inverse(0.3, kInf), 1.0);
  EXPECT_EQ(kl_upper_inverse(1.0, 0.2), 1.0);
}

TEST(KlInverseTest, LowerExamples) {
  EXPECT_EQ(kl_lower_inverse(0.5, 0.0), 0.5);
  for (double c : {0.01, 0.3, 2.0}) EXPECT_NEAR(kl_lower_inverse(1.0, c), std::exp(-c), 1e-12);
  EXPECT_EQ(kl_lower_inverse(0.3, kInf), 0.0);
  EXPECT_EQ(kl_lower_inverse(0.0, 0.2), 0.0);
}

TEST(KlInverseTest, RejectsBadArguments) {
  EXPECT_THROW(kl_upper_inverse(1.2, 0.1), DomainError);
  EXPECT_THROW(kl_lower_inverse(0.5, -0.1), DomainError);
}

TEST(KlInverseProperty, RoundTripAndMirror) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> cc(0.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = u(gen);
    const double c = cc(gen);
    const double up = kl_upper_inverse(p, c);
    const double lo = kl_lower_inverse(p, c);
    EXPECT_GE(up, p);
    EXPECT_LE(lo, p);
    // up is the last double inside the sublevel set.
    EXPECT_LE(bernoulli_kl(p, up), c + 1e-12);
    if (up < 1.0) EXPECT_GT(bernoulli_kl(p, std::nextafter(up, 2.0)), c);
    if (up < 1.0 - 1e-3) EXPECT_NEAR(bernoulli_kl(p, up), c, 1e-9);
    EXPECT_NEAR(up, 1.0 - kl_lower_inverse(1.0 - p, c), 1e-12);
    EXPECT_LE(bernoulli_kl(p, lo), c + 1e-9);
  }
}

TEST(RegretBudgetTest, Examples) {
  EXPECT_NEAR(regret_budget(1), std::log(2.0), 1e-12);
  const double oracle100 = std::log(std::sqrt(std::numbers::pi) * std::tgamma(101.0) / std::tgamma(100.5));
  EXPECT_NEAR(regret_budget(100), oracle100, 1e-12);
  EXPECT_NEAR(regret_budget(100), 2.8762, 1e-4);
  const double n = 1e6;
  EXPECT_NEAR(std::exp(regret_budget(1'000'000)) / std::sqrt(std::numbers::pi * n), 1.0, 1e-4);
  EXPECT_THROW(regret_budget(0), DomainError);
}

TEST(RegretBudgetTest, IncreasingAndBelowTwoRootN) {
  double prev = 0.0;
  for (std::size_t n = 1; n <= 4096; ++n) {
    const double r = regret_budget(n);
    EXPECT_GT(r, prev);
    EXPECT_LE(std::exp(r), 2.0 * std::sqrt(static_cast<double>(n)) * (1 + 1e-14));
    prev = r;
  }
}

TEST(DiscreteKlTest, Examples) {
  const DiscreteDistribution p({0.1, 0.9});
  const DiscreteDistribution q({0.2, 0.8});
  EXPECT_EQ(discrete_kl(p, p), 0.0);
  EXPECT_NEAR(discrete_kl(p, q), 0.9 * std::log(0.9 / 0.8) + 0.1 * std::log(0.1 / 0.2), 1e-15);
  EXPECT_NEAR(discrete_kl(p, q), 0.036690, 1e-6);
}

TEST(DiscreteKlTest, BinomialMatchesDirectSum) {
  std::vector<double> post(7), prior(7);
  double oracle = 0.0;
  for (int k = 0; k <= 6; ++k) {
    post[k] = testing::binomial_pmf_gamma(6, k, 0.8);
    prior[k] = testing::binomial_pmf_gamma(6, k, 0.7);
  }
  // Direct form: sum_k P(k) [k ln(0.8/0.7) + (6-k) ln(0.2/0.3)], the binomial coefficients cancel.
  for (int k = 0; k <= 6; ++k) oracle += post[k] * (k * std::log(0.8 / 0.7) + (6 - k) * std::log(0.2 / 0.3));
  double s = 0.0;
  for (double v : post) s += v;
  for (double& v : post) v /= s;
  s = 0.0;
  for (double v : prior) s += v;
  for (double& v : prior) v /= s;
  EXPECT_NEAR(discrete_kl(DiscreteDistribution(post), DiscreteDistribution(prior)), oracle, 1e-12);
}

TEST(DiscreteKlTest, EdgeCases) {
  EXPECT_EQ(discrete_kl(DiscreteDistribution({0.5, 0.5}), DiscreteDistribution({1.0, 0.0})), kInf);
  EXPECT_NEAR(discrete_kl(DiscreteDistribution({1.0, 0.0}), DiscreteDistribution({0.5, 0.5})), std::log(2.0), 1e-15);
  EXPECT_THROW(discrete_kl(DiscreteDistribution({1.0}), DiscreteDistribution({0.5, 0.5})), SchemaError);
}

}  // namespace
}  // namespace pbcs
