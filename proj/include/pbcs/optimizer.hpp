#pragma once

// Exact inversion of the coin-betting inequality on a finite-support
// posterior: maximize (or minimize) sum_theta w_theta mu_theta subject to
// sum_theta w_theta g_theta(mu_theta) <= budget, where g_theta is either the
// optimal log-wealth psi* or its n * kl relaxation.

#include <cstddef>
#include <span>
#include <vector>

#include "pbcs/core_math.hpp"

namespace pbcs {

enum class ConstraintKind { CoinBetting, KlVer };

enum class Direction { Upper, Lower };

struct FiniteSupportProblem {
  std::vector<double> weights;              ///< posterior mass per atom, sums to 1
  std::vector<std::vector<double>> losses;  ///< one loss row per atom, all of length n
  double budget = 0.0;                      ///< C_n + ln(1/delta)
  ConstraintKind kind = ConstraintKind::CoinBetting;

  std::size_t atom_count() const noexcept { return weights.size(); }
  std::size_t sample_size() const noexcept { return losses.empty() ? 0 : losses.front().size(); }

  /// Throws DomainError or SchemaError when the invariants do not hold.
  void validate() const;
};

struct MeanAssignment {
  std::vector<double> mu;
};

struct BoundSolution {
  double value = 0.0;       ///< M_U or M_L
  MeanAssignment mu;        ///< optimal per-atom means
  double multiplier = 0.0;  ///< Lagrange multiplier eta of the budget constraint
  int iterations = 0;       ///< outer bisection steps
};

/// g_theta(mu) for one atom: psi*(losses, mu) or n kl(mean(losses), mu).
double atom_constraint(std::span<const double> losses, double mu, ConstraintKind kind,
                       const SolverTolerances& tol = {});

/// sum_theta w_theta g_theta(mu_theta). Zero-weight atoms contribute nothing.
double constraint_value(const FiniteSupportProblem& prob, const MeanAssignment& mu,
                        const SolverTolerances& tol = {});

/// Solves the convex program by bisection on the Lagrange multiplier.
///
/// For a multiplier eta the Lagrangian separates into one concave scalar
/// problem per atom: maximize mu - eta g(mu) over [mean, 1]. Its stationarity
/// condition is g'(mu) = 1/eta. For the coin-betting constraint the envelope
/// identity g'(mu) = -n lambda*(mu) turns this into "the optimal bet at mu
/// equals -1/(eta n)", a monotone root in mu. For kl it is a quadratic. The
/// aggregated constraint is nonincreasing in eta, which is bisected until the
/// bracket collapses; the returned assignment is always on the feasible side.
/// Lower bounds reuse the upper solver on reflected losses 1 - c.
///
/// Throws SolverError when the multiplier cannot be bracketed or max_iters is exhausted.
BoundSolution solve_bound(const FiniteSupportProblem& prob, Direction direction,
                          const SolverTolerances& tol = {});

/// True iff the budget constraint holds at the supplied (true) means.
bool theorem1_event_check(const FiniteSupportProblem& prob, const MeanAssignment& true_means,
                          const SolverTolerances& tol = {});

}  // namespace pbcs
