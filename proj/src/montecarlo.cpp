#include "pbcs/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbcs/errors.hpp"

namespace pbcs {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0,1]");
}

std::vector<std::vector<double>> draw_block(const ParamSampler& sampler, std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::vector<double>> block;
  block.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row = sampler.losses(sampler.draw(rng));
    if (row.size() != n) {
      throw SchemaError("sampler produced " + std::to_string(row.size()) + " losses, expected " + std::to_string(n));
    }
    block.push_back(std::move(row));
  }
  return block;
}

}  // namespace

McConfig McConfig::defaults_for(double delta, std::size_t m) {
  check_delta(delta);
  McConfig cfg;
  cfg.delta = delta;
  cfg.m = m;
  cfg.K = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log(1.0 / delta))));
  cfg.multiplier = std::numbers::e;
  return cfg;
}

void McConfig::validate() const {
  std::vector<std::string> problems;
  if (K < 1) problems.emplace_back("K must be at least 1");
  if (m < 1) problems.emplace_back("m must be at least 1");
  if (!(multiplier > 1.0)) problems.emplace_back("multiplier must exceed 1");
  if (!(delta > 0.0 && delta <= 1.0)) problems.emplace_back("delta must lie in (0,1]");
  if (problems.empty()) {
    const double failure = std::pow(multiplier, -static_cast<double>(K));
    if (failure > delta * (1.0 + 1e-3)) {
      problems.emplace_back("multiplier^-K = " + std::to_string(failure) + " exceeds delta = " + std::to_string(delta));
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

BlockResult solve_block(const std::vector<std::vector<double>>& block_losses, double budget, double multiplier,
                        Direction direction, const SolverTolerances& tol) {
  if (block_losses.empty()) throw DomainError("block must contain at least one draw");
  FiniteSupportProblem prob;
  prob.weights.assign(block_losses.size(), 1.0 / static_cast<double>(block_losses.size()));
  prob.losses = block_losses;
  prob.budget = multiplier * budget;
  prob.kind = ConstraintKind::CoinBetting;

  BoundSolution sol = solve_bound(prob, direction, tol);
  BlockResult out;
  out.nu_bar = mean_of(sol.mu.mu);
  out.mu_assignment = std::move(sol.mu);
  out.feasible = true;
  return out;
}

Algorithm1Result run_algorithm1(const ParamSampler& sampler, std::size_t n, const McConfig& cfg, std::uint64_t seed,
                                const SolverTolerances& tol) {
  cfg.validate();
  if (sampler.sample_size() != n) throw SchemaError("sampler sample size does not match n");

  const double budget = budget_c_n_delta(n, sampler.kl_post_prior(), cfg.delta);

  Algorithm1Result out;
  out.upper_blocks.reserve(cfg.K);
  out.lower_blocks.reserve(cfg.K);
  for (std::size_t k = 0; k < cfg.K; ++k) {
    Rng rng(mix_seed({seed, static_cast<std::uint64_t>(k)}));
    const auto block = draw_block(sampler, n, cfg.m, rng);
    out.upper_blocks.push_back(solve_block(block, budget, cfg.multiplier, Direction::Upper, tol));
    out.lower_blocks.push_back(solve_block(block, budget, cfg.multiplier, Direction::Lower, tol));
  }

  for (std::size_t k = 1; k < cfg.K; ++k) {
    if (out.upper_blocks[k].nu_bar > out.upper_blocks[out.k_upper].nu_bar) out.k_upper = k;
    if (out.lower_blocks[k].nu_bar < out.lower_blocks[out.k_lower].nu_bar) out.k_lower = k;
  }

  out.kl_correction =
      std::max(0.0, std::log(static_cast<double>(cfg.K) / (2.0 * cfg.delta))) / static_cast<double>(cfg.m);
  const double upper_center = std::clamp(out.upper_blocks[out.k_upper].nu_bar, 0.0, 1.0);
  const double lower_center = std::clamp(out.lower_blocks[out.k_lower].nu_bar, 0.0, 1.0);

  ConfidenceInterval& ci = out.interval;
  ci.method = Method::McAlgorithm1;
  ci.n = n;
  ci.delta = cfg.delta;
  ci.upper = kl_upper_inverse(upper_center, out.kl_correction);
  ci.lower = kl_lower_inverse(lower_center, out.kl_correction);
  ci.raw_upper = ci.upper;
  ci.raw_lower = ci.lower;
  out.effective_confidence = 1.0 - 3.0 * cfg.delta;
  return out;
}

double boosting_floor(std::span<const double> psi_block_means, double multiplier) {
  if (psi_block_means.empty()) throw DomainError("boosting_floor needs at least one block");
  if (!(multiplier > 1.0)) throw DomainError("multiplier must exceed 1");
  double lowest = std::numeric_limits<double>::infinity();
  for (double v : psi_block_means) {
    if (!(v >= 0.0)) throw DomainError("block means must be nonnegative");
    lowest = std::min(lowest, v);
  }
  return lowest / multiplier;
}

double maurer_mc_width(std::size_t M, double delta) {
  if (M < 1) throw DomainError("M must be at least 1");
  check_delta(delta);
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(M)));
}

ConfidenceInterval run_maurer_mc(const ParamSampler& sampler, std::size_t n, std::size_t M, double delta,
                                 std::uint64_t seed) {
  const double w = maurer_mc_width(M, delta);
  if (sampler.sample_size() != n) throw SchemaError("sampler sample size does not match n");

  Rng rng(seed);
  double total = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    std::vector<double> row = sampler.losses(sampler.draw(rng));
    if (row.size() != n) throw SchemaError("sampler produced a loss row of the wrong length");
    total += mean_of(row);
  }
  const double estimate = total / static_cast<double>(M);

  const double budget = (budget_c_n(n, sampler.kl_post_prior()) + std::log(2.0 / delta)) / static_cast<double>(n);
  const double k_upper = std::clamp(estimate + w, 0.0, 1.0);
  const double k_lower = std::clamp(estimate - w, 0.0, 1.0);

  ConfidenceInterval ci;
  ci.method = Method::MaurerMc;
  ci.n = n;
  ci.delta = delta;
  ci.upper = kl_upper_inverse(k_upper, budget);
  ci.lower = kl_lower_inverse(k_lower, budget);
  ci.raw_upper = ci.upper;
  ci.raw_lower = ci.lower;
  return ci;
}

std::size_t recommend_m(std::span<const double> psi_samples, double delta, double target_ratio) {
  if (psi_samples.empty()) throw DomainError("pilot sample must be nonempty");
  check_delta(delta);
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) throw DomainError("target_ratio must lie in (0,1)");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : psi_samples) {
    if (!(v >= 0.0)) throw DomainError("psi samples must be nonnegative");
    sum += v;
    sum_sq += v * v;
  }
  const double count = static_cast<double>(psi_samples.size());
  const double mean = sum / count;
  if (mean == 0.0) return std::numeric_limits<std::size_t>::max();
  const double second_moment = sum_sq / count;
  const double m = 2.0 * std::log(1.0 / delta) * second_moment / (target_ratio * target_ratio * mean * mean);
  if (!std::isfinite(m) || m >= 1e18) return std::numeric_limits<std::size_t>::max();
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m)));
}

}  // namespace pbcs
