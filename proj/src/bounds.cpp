#include "pbcs/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "pbcs/core_math.hpp"
#include "pbcs/errors.hpp"

namespace pbcs {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> kMethodNames{{
    {Method::CoinBetting, "coin_betting"},
    {Method::KlVer, "kl_ver"},
    {Method::MaurerRelaxed, "maurer_relaxed"},
    {Method::MaurerOriginal, "maurer_original"},
    {Method::McAllester, "mcallester"},
    {Method::EmpiricalBernstein, "emp_bernstein"},
    {Method::Intersection, "intersection"},
    {Method::McAlgorithm1, "mc_algorithm1"},
    {Method::MaurerMc, "maurer_mc"},
}};

ConfidenceInterval clipped(Method method, const BoundInputs& inp, double raw_lower, double raw_upper) {
  ConfidenceInterval ci;
  ci.method = method;
  ci.n = inp.n;
  ci.delta = inp.delta;
  ci.raw_lower = raw_lower;
  ci.raw_upper = raw_upper;
  ci.lower = std::clamp(raw_lower, 0.0, 1.0);
  ci.upper = std::clamp(raw_upper, 0.0, 1.0);
  return ci;
}

ConfidenceInterval kl_inverted(Method method, const BoundInputs& inp, double per_sample_budget) {
  const double lower = kl_lower_inverse(inp.mu_hat_bar, per_sample_budget);
  const double upper = kl_upper_inverse(inp.mu_hat_bar, per_sample_budget);
  return clipped(method, inp, lower, upper);
}

}  // namespace

std::string_view method_name(Method method) noexcept {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [m, known] : kMethodNames) {
    if (known == name) return m;
  }
  throw DomainError("unknown method '" + std::string(name) + "'");
}

void BoundInputs::validate() const {
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(kl_post_prior >= 0.0)) throw DomainError("kl_post_prior must be nonnegative");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0,1]");
  if (!(mu_hat_bar >= 0.0 && mu_hat_bar <= 1.0)) throw DomainError("mu_hat_bar must lie in [0,1]");
  if (!(v_hat >= 0.0 && v_hat <= static_cast<double>(n) / 4.0 + 1e-12)) {
    throw DomainError("v_hat must lie in [0, n/4]");
  }
}

double budget_c_n(std::size_t n, double kl_post_prior) {
  if (!(kl_post_prior >= 0.0)) throw DomainError("kl_post_prior must be nonnegative");
  return kl_post_prior + regret_budget(n);
}

double budget_c_n_delta(std::size_t n, double kl_post_prior, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0,1]");
  return budget_c_n(n, kl_post_prior) + std::log(1.0 / delta);
}

ConfidenceInterval mcallester_interval(const BoundInputs& inp) {
  inp.validate();
  const double c = budget_c_n_delta(inp.n, inp.kl_post_prior, inp.delta);
  const double half = 2.0 * std::sqrt(c / static_cast<double>(inp.n));
  return clipped(Method::McAllester, inp, inp.mu_hat_bar - half, inp.mu_hat_bar + half);
}

ConfidenceInterval maurer_relaxed_interval(const BoundInputs& inp) {
  inp.validate();
  const double c = budget_c_n_delta(inp.n, inp.kl_post_prior, inp.delta);
  return kl_inverted(Method::MaurerRelaxed, inp, c / static_cast<double>(inp.n));
}

ConfidenceInterval maurer_original_interval(const BoundInputs& inp) {
  inp.validate();
  const double n = static_cast<double>(inp.n);
  const double c = inp.kl_post_prior + std::log(2.0 * std::sqrt(n) / inp.delta);
  return kl_inverted(Method::MaurerOriginal, inp, c / n);
}

ConfidenceInterval empirical_bernstein_interval(const BoundInputs& inp) {
  inp.validate();
  const double n = static_cast<double>(inp.n);
  const double c = budget_c_n_delta(inp.n, inp.kl_post_prior, inp.delta);
  const double root_den = std::sqrt(n) - 2.0 * c / std::sqrt(n);
  const double lin_den = n - 2.0 * c;
  if (!(root_den > 0.0) || !(lin_den > 0.0)) {
    return clipped(Method::EmpiricalBernstein, inp, 0.0, 1.0);
  }
  const double half = std::sqrt(2.0 * c * inp.v_hat) / root_den + 2.0 * c / lin_den;
  return clipped(Method::EmpiricalBernstein, inp, inp.mu_hat_bar - half, inp.mu_hat_bar + half);
}

ConfidenceInterval intersect_relaxations(const BoundInputs& inp) {
  const ConfidenceInterval parts[] = {
      mcallester_interval(inp),
      maurer_relaxed_interval(inp),
      empirical_bernstein_interval(inp),
  };
  ConfidenceInterval out = parts[0];
  out.method = Method::Intersection;
  for (const auto& part : parts) {
    out.lower = std::max(out.lower, part.lower);
    out.upper = std::min(out.upper, part.upper);
  }
  out.raw_lower = out.lower;
  out.raw_upper = out.upper;
  return out;
}

}  // namespace pbcs
