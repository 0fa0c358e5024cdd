#include "pbcs/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pbcs/errors.hpp"

namespace pbcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x ln(x / y) with 0 ln 0 = 0.
double xlogxy(double x, double y) noexcept {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInf;
  return x * std::log(x / y);
}

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(x));
  }
}

void check_budget(double c) {
  if (!(c >= 0.0)) throw DomainError("kl budget must be nonnegative, got " + std::to_string(c));
}

}  // namespace

void SolverTolerances::validate() const {
  if (!(lambda_tol > 0.0) || !(mu_tol > 0.0) || !(budget_tol > 0.0)) {
    throw DomainError("solver tolerances must be positive");
  }
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
}

void check_losses(std::span<const double> losses) {
  if (losses.empty()) throw DomainError("loss vector must have at least one entry");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!(losses[i] >= 0.0 && losses[i] <= 1.0)) {
      throw DomainError("loss " + std::to_string(i) + " is outside [0,1]: " + std::to_string(losses[i]));
    }
  }
}

double mean_of(std::span<const double> values) noexcept {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

LossVector::LossVector(std::vector<double> values) : values_(std::move(values)) { check_losses(values_); }

double LossVector::mean() const noexcept { return mean_of(values_); }

DiscreteDistribution::DiscreteDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw DomainError("distribution needs at least one atom");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("distribution weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("distribution weights sum to " + std::to_string(total) + ", expected 1");
  }
}

double log_wealth(std::span<const double> losses, double mu, double lambda) noexcept {
  double sum = 0.0;
  for (double c : losses) {
    const double x = lambda * (c - mu);
    if (!(x > -1.0)) return -kInf;
    sum += std::log1p(x);
  }
  return sum;
}

double log_wealth_slope(std::span<const double> losses, double mu, double lambda) noexcept {
  double slope = 0.0;
  for (double c : losses) {
    const double d = c - mu;
    slope += d / (1.0 + lambda * d);
  }
  return slope;
}

PsiStarResult psi_star(std::span<const double> losses, double mu, const SolverTolerances& tol) {
  check_losses(losses);
  check_unit(mu, "mu");

  if (mu == 0.0 || mu == 1.0) {
    const bool constant = std::all_of(losses.begin(), losses.end(), [mu](double c) { return c == mu; });
    if (constant) return {0.0, 0.0, 0};
    return {kInf, mu == 0.0 ? kInf : -kInf, 0};
  }

  if (mu == mean_of(losses)) return {0.0, 0.0, 0};

  const double left = -1.0 / (1.0 - mu);
  const double right = 1.0 / mu;
  const auto objective = [&](double lambda) { return log_wealth(losses, mu, lambda); };

  // Golden-section search for the maximum of a concave function.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = left;
  double hi = right;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  int iterations = 0;
  while (hi - lo > tol.lambda_tol * std::max(1.0, std::abs(0.5 * (lo + hi)))) {
    if (++iterations > tol.max_iters) throw SolverError("psi_star: golden-section did not converge", lo, hi);
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }

  PsiStarResult best{0.0, 0.0, iterations};
  const auto consider = [&best](double lambda, double value) {
    if (value > best.value) {
      best.value = value;
      best.lambda_star = lambda;
    }
  };
  consider(x1, f1);
  consider(x2, f2);

  // Newton polish on the slope from the best golden point.
  const double start = f1 >= f2 ? x1 : x2;
  if (std::isfinite(objective(start))) {
    double slope = 0.0;
    double curvature = 0.0;
    for (double c : losses) {
      const double d = c - mu;
      const double f = 1.0 + start * d;
      slope += d / f;
      curvature -= (d * d) / (f * f);
    }
    if (curvature < 0.0) {
      const double polished = std::clamp(start - slope / curvature, left, right);
      consider(polished, objective(polished));
    }
  }

  consider(left, objective(left));
  consider(right, objective(right));
  return best;
}

double bernoulli_kl(double p, double q) noexcept {
  if (p == q) return 0.0;
  const double value = xlogxy(p, q) + xlogxy(1.0 - p, 1.0 - q);
  return value > 0.0 ? value : 0.0;
}

double kl_upper_inverse(double p, double c) {
  check_unit(p, "p");
  check_budget(c);
  if (c == 0.0 || p == 1.0) return p;
  if (std::isinf(c)) return 1.0;
  double lo = p;
  double hi = 1.0;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (bernoulli_kl(p, mid) <= c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double kl_lower_inverse(double p, double c) {
  check_unit(p, "p");
  check_budget(c);
  if (c == 0.0 || p == 0.0) return p;
  if (std::isinf(c)) return 0.0;
  double lo = 0.0;
  double hi = p;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (bernoulli_kl(p, mid) <= c) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double regret_budget(std::size_t n) {
  if (n < 1) throw DomainError("regret_budget needs n >= 1");
  const double x = static_cast<double>(n);
  return 0.5 * std::log(std::numbers::pi) + std::lgamma(x + 1.0) - std::lgamma(x + 0.5);
}

double discrete_kl(const DiscreteDistribution& posterior, const DiscreteDistribution& prior) {
  if (posterior.size() != prior.size()) {
    throw SchemaError("posterior has " + std::to_string(posterior.size()) + " atoms but prior has " +
                      std::to_string(prior.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) sum += xlogxy(posterior[i], prior[i]);
  return sum > 0.0 ? sum : 0.0;
}

}  // namespace pbcs
