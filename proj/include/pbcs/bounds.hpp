#pragma once

// Closed-form confidence intervals obtained by relaxing the coin-betting
// inequality, plus the classical fixed-n kl baseline.

#include <cstddef>
#include <string>
#include <string_view>

namespace pbcs {

enum class Method {
  CoinBetting,
  KlVer,
  MaurerRelaxed,
  MaurerOriginal,
  McAllester,
  EmpiricalBernstein,
  Intersection,
  McAlgorithm1,
  MaurerMc,
};

/// Canonical snake_case name used in configs and CSV files.
std::string_view method_name(Method method) noexcept;

/// Inverse of method_name. Throws DomainError on unknown names.
Method parse_method(std::string_view name);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 1.0;
  Method method = Method::CoinBetting;
  std::size_t n = 0;
  double delta = 0.0;
  // Endpoints before clipping to [0,1].
  double raw_lower = 0.0;
  double raw_upper = 1.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

struct BoundInputs {
  std::size_t n = 1;
  double kl_post_prior = 0.0;  ///< KL(P_n || P_0)
  double delta = 0.05;
  double mu_hat_bar = 0.0;     ///< posterior average of the empirical means
  double v_hat = 0.0;          ///< posterior average of the per-sample empirical variance

  /// Throws DomainError when a field is outside its range.
  void validate() const;
};

/// KL(P_n||P_0) + regret_budget(n).
double budget_c_n(std::size_t n, double kl_post_prior);

/// budget_c_n(n, kl) + ln(1/delta), the right-hand side every relaxation shares.
double budget_c_n_delta(std::size_t n, double kl_post_prior, double delta);

/// Symmetric interval of half-width 2 sqrt(C_{n,delta} / n).
ConfidenceInterval mcallester_interval(const BoundInputs& inp);

/// kl(mu_hat_bar, mu) <= C_{n,delta} / n inverted on both sides.
ConfidenceInterval maurer_relaxed_interval(const BoundInputs& inp);

/// Classical fixed-n baseline: kl(mu_hat_bar, mu) <= (KL + ln(2 sqrt(n) / delta)) / n.
ConfidenceInterval maurer_original_interval(const BoundInputs& inp);

/// Empirical Bernstein relaxation. Vacuous [0,1] once C_{n,delta} >= n/2.
ConfidenceInterval empirical_bernstein_interval(const BoundInputs& inp);

/// Intersection of the McAllester, relaxed Maurer and empirical Bernstein
/// intervals. All three relax one event, so no union bound over delta.
ConfidenceInterval intersect_relaxations(const BoundInputs& inp);

}  // namespace pbcs
