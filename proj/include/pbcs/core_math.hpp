#pragma once

// Scalar kernels shared by every bound: coin-betting log-wealth, the optimal
// log-wealth psi*, Bernoulli kl and its inverses, and the regret constant of
// the betting algorithm whose existence backs the time-uniform bound.

#include <cstddef>
#include <span>
#include <vector>

namespace pbcs {

struct SolverTolerances {
  double lambda_tol = 1e-10;
  double mu_tol = 1e-10;
  double budget_tol = 1e-9;
  int max_iters = 200;

  /// Throws DomainError unless every tolerance is positive and max_iters >= 1.
  void validate() const;
};

/// Losses f(theta, X_1..X_n) of one parameter atom. Every entry is in [0,1].
class LossVector {
 public:
  explicit LossVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double mean() const noexcept;

  operator std::span<const double>() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Finite-support probability vector over parameter atoms.
class DiscreteDistribution {
 public:
  /// Weights must be nonnegative and sum to one within 1e-12.
  explicit DiscreteDistribution(std::vector<double> weights);

  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

struct PsiStarResult {
  double value = 0.0;        ///< optimal log-wealth, in [0, +inf]
  double lambda_star = 0.0;  ///< maximizing bet fraction
  int iterations = 0;
};

/// Throws DomainError unless losses is nonempty and inside [0,1].
void check_losses(std::span<const double> losses);

double mean_of(std::span<const double> values) noexcept;

/// sum_i ln(1 + lambda (c_i - mu)); -inf as soon as a factor is <= 0.
double log_wealth(std::span<const double> losses, double mu, double lambda) noexcept;

/// d/dlambda of log_wealth. Requires all factors strictly positive.
double log_wealth_slope(std::span<const double> losses, double mu, double lambda) noexcept;

/// Maximum of log_wealth over lambda in [-1/(1-mu), 1/mu].
///
/// The objective is concave in lambda. It is maximized by golden-section search
/// on the bet range followed by one Newton step on the slope; the closed
/// endpoints are compared explicitly because the maximum sits there whenever
/// the slope does not change sign (e.g. n = 1 or constant losses). For mu in
/// {0,1} the value is the limit of the supremum: 0 when every loss equals mu,
/// +inf otherwise.
///
/// Throws SolverError if the bracket does not shrink below lambda_tol within
/// max_iters golden steps.
PsiStarResult psi_star(std::span<const double> losses, double mu, const SolverTolerances& tol = {});

/// kl(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q)) with 0 ln 0 = 0.
double bernoulli_kl(double p, double q) noexcept;

/// max{mu in [p,1] : kl(p, mu) <= c}.
double kl_upper_inverse(double p, double c);

/// min{mu in [0,p] : kl(p, mu) <= c}.
double kl_lower_inverse(double p, double c);

/// ln(sqrt(pi) Gamma(n+1) / Gamma(n+1/2)), the log regret of the betting algorithm.
double regret_budget(std::size_t n);

/// sum_i p_i ln(p_i / q_i); +inf when q_i = 0 < p_i. Throws SchemaError on size mismatch.
double discrete_kl(const DiscreteDistribution& posterior, const DiscreteDistribution& prior);

}  // namespace pbcs
