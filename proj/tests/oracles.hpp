#pragma once

// Brute-force reference computations used only by the tests. None of these
// call into the solver paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace pbcs::testing {

/// Maximum of sum_i ln(1 + lambda (c_i - mu)) over an evenly spaced grid of
/// `points` bets covering the closed range [-1/(1-mu), 1/mu] endpoints included.
/// Products of factors are accumulated and logged in chunks for speed.
inline double psi_grid_max(std::span<const double> losses, double mu, std::size_t points = 1'000'000) {
  const double left = -1.0 / (1.0 - mu);
  const double right = 1.0 / mu;
  double best = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double lambda = left + (right - left) * static_cast<double>(j) / static_cast<double>(points - 1);
    double total = 0.0;
    double prod = 1.0;
    bool dead = false;
    for (std::size_t i = 0; i < losses.size(); ++i) {
      const double f = 1.0 + lambda * (losses[i] - mu);
      if (!(f > 0.0)) {
        dead = true;
        break;
      }
      prod *= f;
      if ((i & 7u) == 7u) {
        total += std::log(prod);
        prod = 1.0;
      }
    }
    if (dead) continue;
    total += std::log(prod);
    best = std::max(best, total);
  }
  return best;
}

/// kl(p, q) written out independently of the library.
inline double kl_direct(double p, double q) {
  double v = 0.0;
  if (p > 0.0) v += p * std::log(p / q);
  if (p < 1.0) v += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return v;
}

/// Binomial pmf via the Gamma function.
inline double binomial_pmf_gamma(int trials, int k, double p) {
  const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
  return std::exp(log_choose + k * std::log(p) + (trials - k) * std::log1p(-p));
}

/// Exhaustive search over a grid of (mu1, mu2) for a two-atom program.
/// `g1`, `g2` hold the constraint value of each atom at mu = grid[i].
struct TwoAtomGridResult {
  double upper = -std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
};

inline TwoAtomGridResult two_atom_grid(const std::vector<double>& grid, const std::vector<double>& g1,
                                       const std::vector<double>& g2, double w1, double w2, double budget) {
  TwoAtomGridResult r;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(w1 * g1[i] <= budget)) continue;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (w1 * g1[i] + w2 * g2[j] <= budget) {
        const double v = w1 * grid[i] + w2 * grid[j];
        r.upper = std::max(r.upper, v);
        r.lower = std::min(r.lower, v);
      }
    }
  }
  return r;
}

}  // namespace pbcs::testing
