#include "pbcs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbcs/errors.hpp"

namespace pbcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct AtomView {
  double weight;
  std::span<const double> losses;
  double mean;
};

// Slope of the log-wealth in lambda, evaluated at the fixed bet `bet` as a
// function of mu. +inf when a factor is exhausted (the optimal bet lies above).
double bet_slope(std::span<const double> losses, double mu, double bet, double* derivative) {
  double slope = 0.0;
  double deriv = 0.0;
  for (double c : losses) {
    const double d = c - mu;
    const double f = 1.0 + bet * d;
    if (!(f > 0.0)) return kInf;
    slope += d / f;
    deriv -= 1.0 / (f * f);
  }
  if (derivative != nullptr) *derivative = deriv;
  return slope;
}

// Smallest mu >= mean at which the optimal bet lambda*(mu) drops to `bet` (< 0).
// lambda*(mu) is nonincreasing in mu, and for mu below 1 + 1/bet the bet lies
// outside the admissible range, so the root is searched above that point.
double coin_betting_stationary_mean(std::span<const double> losses, double mean, double bet,
                                    const SolverTolerances& tol) {
  if (mean >= 1.0) return 1.0;
  double lo = std::max(mean, 1.0 + 1.0 / bet);
  double slope_lo = bet_slope(losses, lo, bet, nullptr);
  if (slope_lo <= 0.0) return lo;
  double hi = 1.0;
  double x = lo;
  double slope = slope_lo;
  double deriv = 0.0;
  if (!std::isfinite(slope)) {
    x = lo + 0.5 * (hi - lo);
    slope = bet_slope(losses, x, bet, &deriv);
  } else {
    bet_slope(losses, x, bet, &deriv);
  }
  double step_before = hi - lo;
  for (int iter = 0; iter < tol.max_iters; ++iter) {
    if (slope == 0.0) return x;
    if (slope > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * kEps * hi) return lo;
    // Newton on the slope, falling back to bisection when it leaves the
    // bracket or stops halving the step.
    double next = lo + 0.5 * (hi - lo);
    if (std::isfinite(slope) && deriv < 0.0) {
      const double newton = x - slope / deriv;
      if (newton > lo && newton < hi && std::abs(2.0 * slope) <= std::abs(step_before * deriv)) next = newton;
    }
    step_before = std::abs(next - x);
    if (step_before <= 2.0 * kEps * x) {
      // A tiny step means convergence only if the sign changes just above it;
      // next to the pole the slope is steep but the root can be far away.
      const double probe = std::min(hi, next + 4.0 * kEps * x);
      const double slope_probe = bet_slope(losses, probe, bet, nullptr);
      if (slope_probe <= 0.0) return next;
      lo = probe;
      next = lo + 0.5 * (hi - lo);
      step_before = hi - lo;
    }
    x = next;
    slope = bet_slope(losses, x, bet, &deriv);
  }
  throw SolverError("solve_bound: stationary mean did not converge", lo, hi);
}

// Root in [mean, 1] of mu (1 - mu) = a (mu - mean), i.e. n kl'(mean, mu) = 1/eta with a = eta n.
double kl_stationary_mean(double mean, double a) {
  const double b = 1.0 - a;
  const double disc = std::sqrt(b * b + 4.0 * a * mean);
  const double root = b >= 0.0 ? 0.5 * (b + disc) : 2.0 * a * mean / (disc - b);
  return std::clamp(root, mean, 1.0);
}

struct InnerResult {
  double constraint = 0.0;
  std::vector<double> mu;
};

class UpperSolver {
 public:
  UpperSolver(std::vector<AtomView> atoms, std::size_t n, ConstraintKind kind, const SolverTolerances& tol)
      : atoms_(std::move(atoms)), n_(static_cast<double>(n)), kind_(kind), tol_(tol) {}

  InnerResult at(double eta) const {
    InnerResult out;
    out.mu.resize(atoms_.size());
    const double bet = -1.0 / (eta * n_);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const AtomView& atom = atoms_[i];
      double mu = 0.0;
      double g = 0.0;
      if (kind_ == ConstraintKind::KlVer) {
        mu = kl_stationary_mean(atom.mean, eta * n_);
        g = n_ * bernoulli_kl(atom.mean, mu);
      } else {
        mu = coin_betting_stationary_mean(atom.losses, atom.mean, bet, tol_);
        // At the stationary mean the optimal bet is `bet` itself.
        g = std::max(0.0, log_wealth(atom.losses, mu, bet));
      }
      out.mu[i] = mu;
      out.constraint += atom.weight * g;
    }
    return out;
  }

 private:
  std::vector<AtomView> atoms_;
  double n_;
  ConstraintKind kind_;
  SolverTolerances tol_;
};

BoundSolution solve_upper(const std::vector<AtomView>& atoms, std::size_t n, double budget, ConstraintKind kind,
                          const SolverTolerances& tol) {
  BoundSolution sol;
  sol.mu.mu.resize(atoms.size());

  if (budget == 0.0) {
    for (std::size_t i = 0; i < atoms.size(); ++i) sol.mu.mu[i] = atoms[i].mean;
    sol.multiplier = kInf;
    return sol;
  }

  // Saturation: every atom at 1 is feasible only when every loss is 1.
  const bool saturated = std::all_of(atoms.begin(), atoms.end(), [](const AtomView& a) { return a.mean >= 1.0; });
  if (saturated) {
    std::fill(sol.mu.mu.begin(), sol.mu.mu.end(), 1.0);
    sol.multiplier = 0.0;
    return sol;
  }

  const UpperSolver inner(atoms, n, kind, tol);
  constexpr int kMaxDoublings = 60;

  double lo = 0.0;
  double hi = 1.0;
  InnerResult best = inner.at(hi);
  if (best.constraint > budget) {
    int doublings = 0;
    lo = hi;
    for (;;) {
      if (++doublings > kMaxDoublings) throw SolverError("solve_bound: multiplier bracket not found", lo, hi);
      hi *= 2.0;
      InnerResult trial = inner.at(hi);
      if (trial.constraint <= budget) {
        best = std::move(trial);
        break;
      }
      lo = hi;
    }
  } else {
    double probe = hi;
    for (int halvings = 0; halvings < kMaxDoublings; ++halvings) {
      probe *= 0.5;
      InnerResult trial = inner.at(probe);
      if (trial.constraint > budget) {
        lo = probe;
        break;
      }
      hi = probe;
      best = std::move(trial);
    }
  }

  int iterations = 0;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi || hi - lo <= 4.0 * kEps * hi) break;
    if (++iterations > tol.max_iters) throw SolverError("solve_bound: multiplier bisection did not converge", lo, hi);
    InnerResult trial = inner.at(mid);
    if (trial.constraint <= budget) {
      hi = mid;
      best = std::move(trial);
      if (budget - best.constraint == 0.0) break;
    } else {
      lo = mid;
    }
  }

  sol.mu.mu = std::move(best.mu);
  sol.multiplier = hi;
  sol.iterations = iterations;
  return sol;
}

}  // namespace

void FiniteSupportProblem::validate() const {
  if (weights.empty()) throw DomainError("problem needs at least one atom");
  if (weights.size() != losses.size()) {
    throw SchemaError("problem has " + std::to_string(weights.size()) + " weights but " +
                      std::to_string(losses.size()) + " loss rows");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("atom weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12 * std::max<double>(1.0, static_cast<double>(weights.size()))) {
    throw DomainError("atom weights sum to " + std::to_string(total) + ", expected 1");
  }
  const std::size_t n = losses.front().size();
  for (const auto& row : losses) {
    if (row.size() != n) throw SchemaError("all loss rows must have the same length");
    check_losses(row);
  }
  if (!(budget >= 0.0)) throw DomainError("budget must be nonnegative");
}

double atom_constraint(std::span<const double> losses, double mu, ConstraintKind kind, const SolverTolerances& tol) {
  if (kind == ConstraintKind::KlVer) {
    check_losses(losses);
    if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mu must lie in [0,1]");
    return static_cast<double>(losses.size()) * bernoulli_kl(mean_of(losses), mu);
  }
  return psi_star(losses, mu, tol).value;
}

double constraint_value(const FiniteSupportProblem& prob, const MeanAssignment& mu, const SolverTolerances& tol) {
  if (mu.mu.size() != prob.atom_count()) {
    throw SchemaError("mean assignment has " + std::to_string(mu.mu.size()) + " entries for " +
                      std::to_string(prob.atom_count()) + " atoms");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < prob.atom_count(); ++i) {
    if (prob.weights[i] == 0.0) continue;
    total += prob.weights[i] * atom_constraint(prob.losses[i], mu.mu[i], prob.kind, tol);
  }
  return total;
}

BoundSolution solve_bound(const FiniteSupportProblem& prob, Direction direction, const SolverTolerances& tol) {
  prob.validate();
  tol.validate();

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < prob.atom_count(); ++i) {
    if (prob.weights[i] > 0.0) active.push_back(i);
  }

  // The lower program on losses c equals one minus the upper program on 1 - c.
  std::vector<std::vector<double>> reflected;
  if (direction == Direction::Lower) {
    reflected.reserve(active.size());
    for (std::size_t i : active) {
      std::vector<double> row(prob.losses[i].size());
      std::transform(prob.losses[i].begin(), prob.losses[i].end(), row.begin(), [](double c) { return 1.0 - c; });
      reflected.push_back(std::move(row));
    }
  }

  std::vector<AtomView> atoms;
  atoms.reserve(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    const std::size_t i = active[k];
    std::span<const double> row = direction == Direction::Lower ? std::span<const double>(reflected[k])
                                                                : std::span<const double>(prob.losses[i]);
    atoms.push_back({prob.weights[i], row, mean_of(row)});
  }

  BoundSolution upper = solve_upper(atoms, prob.sample_size(), prob.budget, prob.kind, tol);

  BoundSolution out;
  out.multiplier = upper.multiplier;
  out.iterations = upper.iterations;
  out.mu.mu.resize(prob.atom_count());
  for (std::size_t i = 0; i < prob.atom_count(); ++i) out.mu.mu[i] = mean_of(prob.losses[i]);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double m = upper.mu.mu[k];
    out.mu.mu[active[k]] = direction == Direction::Lower ? 1.0 - m : m;
  }
  if (prob.budget == 0.0) {
    for (std::size_t i : active) out.mu.mu[i] = mean_of(prob.losses[i]);
  }
  for (std::size_t i : active) out.value += prob.weights[i] * out.mu.mu[i];
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

bool theorem1_event_check(const FiniteSupportProblem& prob, const MeanAssignment& true_means,
                          const SolverTolerances& tol) {
  prob.validate();
  return constraint_value(prob, true_means, tol) <= prob.budget;
}

}  // namespace pbcs
