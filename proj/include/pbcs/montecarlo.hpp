#pragma once

// Monte Carlo inversion for posteriors that can only be sampled: the
// boosting-the-confidence procedure over K independent blocks of m parameter
// draws, and the Hoeffding-widened kl baseline it is compared against.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "pbcs/bounds.hpp"
#include "pbcs/core_math.hpp"
#include "pbcs/optimizer.hpp"
#include "pbcs/rng.hpp"

namespace pbcs {

/// Source of parameter draws theta ~ P_n and of their losses on a fixed sample.
class ParamSampler {
 public:
  virtual ~ParamSampler() = default;

  /// One parameter draw. Atoms are real coordinates (an index for discrete posteriors).
  virtual double draw(Rng& rng) const = 0;
  /// f(theta, X_1..X_n) on the fixed data sample.
  virtual std::vector<double> losses(double atom) const = 0;
  /// KL(P_n || P_0), supplied analytically.
  virtual double kl_post_prior() const = 0;
  virtual std::size_t sample_size() const = 0;
};

struct McConfig {
  std::size_t K = 3;                     ///< number of blocks
  std::size_t m = 256;                   ///< draws per block
  double multiplier = std::numbers::e;   ///< Markov multiplier C > 1
  double delta = 0.05;

  /// K = ceil(ln(1/delta)) with C = e, so that C^-K <= delta.
  static McConfig defaults_for(double delta, std::size_t m);

  /// Requires K, m >= 1, C > 1, delta in (0,1] and C^-K <= delta. The last
  /// check allows a relative slack of 1e-3 so that rounded multipliers such
  /// as C = 2.1147 for K = 4, delta = 0.05 are accepted.
  void validate() const;
};

struct BlockResult {
  double nu_bar = 0.0;           ///< block objective, the average of mu_assignment
  MeanAssignment mu_assignment;  ///< optimal per-draw means
  bool feasible = true;
};

struct Algorithm1Result {
  ConfidenceInterval interval;
  std::vector<BlockResult> upper_blocks;
  std::vector<BlockResult> lower_blocks;
  std::size_t k_upper = 0;
  std::size_t k_lower = 0;
  double kl_correction = 0.0;        ///< ln(K / (2 delta)) / m
  double effective_confidence = 0.0; ///< 1 - 3 delta
};

/// Solves one block: optimize (1/m) sum nu_i subject to
/// (1/(C m)) sum psi*(theta_i, nu_i) <= budget.
BlockResult solve_block(const std::vector<std::vector<double>>& block_losses, double budget, double multiplier,
                        Direction direction, const SolverTolerances& tol = {});

/// Boosted Monte Carlo confidence interval for the posterior-averaged mean.
///
/// Draws K blocks of m atoms (block k uses the stream mix_seed({seed, k})),
/// solves the per-block upper and lower programs at budget C_n + ln(1/delta),
/// keeps the most extreme block on each side and widens it by kl inversion at
/// level ln(K / (2 delta)) / m. The guarantee holds with probability 1 - 3 delta.
Algorithm1Result run_algorithm1(const ParamSampler& sampler, std::size_t n, const McConfig& cfg, std::uint64_t seed,
                                const SolverTolerances& tol = {});

/// min_k block_mean_k / C, a lower bound on the psi* integral with probability 1 - C^-K.
double boosting_floor(std::span<const double> psi_block_means, double multiplier);

/// Maurer's kl bound evaluated at the Hoeffding-widened Monte Carlo estimate
/// of the posterior-averaged empirical mean, using M draws.
ConfidenceInterval run_maurer_mc(const ParamSampler& sampler, std::size_t n, std::size_t M, double delta,
                                 std::uint64_t seed);

/// Hoeffding width sqrt(ln(2/delta) / (2 M)) used by run_maurer_mc.
double maurer_mc_width(std::size_t M, double delta);

/// Smallest m with sqrt(2 ln(1/delta) E[psi^2] / m) <= target_ratio * E[psi],
/// moments estimated from a pilot sample. Returns SIZE_MAX when the pilot mean is 0.
std::size_t recommend_m(std::span<const double> psi_samples, double delta, double target_ratio);

}  // namespace pbcs
