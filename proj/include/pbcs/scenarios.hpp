#pragma once

// Seeded synthetic scenarios with known ground truth:
//   bernoulli_x_theta  X ~ Bernoulli(1/2), theta in {0,1}, f = x theta,
//                      P_0 = Bernoulli(0.8), P_n = Bernoulli(0.9)
//   binomial_erf       X ~ N(0,1), theta = (k - 3)/4 for k = 0..6,
//                      P_0 = Bin(6, 0.7), P_n = Bin(6, 0.8), f = (erf(x theta) + 1)/2
//   gaussian_erf       X ~ N(0,1), theta ~ P_n = N(0, v) with v = 0.25 by default,
//                      P_0 = N(0,1), same f; only samplable
//
// The data X_1, X_2, ... is drawn sequentially from one stream, so the
// instance for n is a prefix of the instance for any larger n with the same seed.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "pbcs/bounds.hpp"
#include "pbcs/core_math.hpp"
#include "pbcs/montecarlo.hpp"
#include "pbcs/optimizer.hpp"

namespace pbcs {

enum class ScenarioKind { BernoulliXTheta, BinomialErf, GaussianErf };

std::string_view scenario_name(ScenarioKind kind) noexcept;
ScenarioKind parse_scenario(std::string_view name);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::BernoulliXTheta;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  double posterior_variance = 0.25;  ///< gaussian_erf only
};

struct FiniteScenario {
  std::vector<double> atoms;  ///< parameter values theta
  DiscreteDistribution posterior;
  DiscreteDistribution prior;
  std::vector<std::vector<double>> losses;  ///< one row per atom
  std::vector<double> true_means;           ///< mu_theta = E f(theta, X)
};

struct ScenarioInstance {
  ScenarioKind kind = ScenarioKind::BernoulliXTheta;
  std::size_t n = 0;
  double true_integral = 0.0;  ///< integral of mu_theta under P_n
  double kl_post_prior = 0.0;
  std::optional<FiniteScenario> finite;
  std::shared_ptr<const ParamSampler> sampler;

  bool is_finite() const noexcept { return finite.has_value(); }

  /// Finite-support program at the given budget. Throws DomainError for samplable-only scenarios.
  FiniteSupportProblem problem(double budget, ConstraintKind kind) const;
  /// Posterior-averaged statistics for the closed-form bounds.
  BoundInputs bound_inputs(double delta) const;
};

/// Error function, odd, |result - erf(x)| <= 1e-7.
double erf(double x) noexcept;

/// (erf(x theta) + 1) / 2, in [0,1].
double erf_loss(double x, double theta) noexcept;

ScenarioInstance gen_bernoulli(std::size_t n, std::uint64_t seed);
ScenarioInstance gen_binomial_erf(std::size_t n, std::uint64_t seed);
ScenarioInstance gen_gaussian_erf(std::size_t n, std::uint64_t seed, double posterior_variance = 0.25);
ScenarioInstance generate(const ScenarioSpec& spec);

/// KL(N(0, v) || N(0, 1)) = (v - 1 - ln v) / 2.
double gaussian_kl_to_standard(double variance);

/// Binomial(trials, p) probability mass function on 0..trials.
std::vector<double> binomial_pmf(std::size_t trials, double p);

/// Samples atom indices from a finite posterior; the atom coordinate is the index.
class DiscreteSampler final : public ParamSampler {
 public:
  DiscreteSampler(std::vector<double> weights, std::vector<std::vector<double>> losses, double kl_post_prior);

  double draw(Rng& rng) const override;
  std::vector<double> losses(double atom) const override;
  double kl_post_prior() const override { return kl_; }
  std::size_t sample_size() const override { return losses_.empty() ? 0 : losses_.front().size(); }

 private:
  std::vector<double> weights_;
  std::vector<std::vector<double>> losses_;
  double kl_;
};

/// theta ~ N(0, v) with losses (erf(X_i theta) + 1)/2 on a fixed Gaussian sample.
class GaussianErfSampler final : public ParamSampler {
 public:
  GaussianErfSampler(std::vector<double> data, double posterior_variance);

  double draw(Rng& rng) const override;
  std::vector<double> losses(double theta) const override;
  double kl_post_prior() const override { return gaussian_kl_to_standard(variance_); }
  std::size_t sample_size() const override { return data_.size(); }

 private:
  std::vector<double> data_;
  double variance_;
};

}  // namespace pbcs
