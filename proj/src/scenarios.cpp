#include "pbcs/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbcs/errors.hpp"
#include "pbcs/rng.hpp"

namespace pbcs {

namespace {

// Stream tag for the data sample, kept apart from parameter-draw streams.
constexpr std::uint64_t kDataStream = 0xDA7A;

std::vector<double> standard_normal_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed({seed, kDataStream}));
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

void check_n(std::size_t n) {
  if (n < 1) throw DomainError("scenario sample size must be at least 1");
}

}  // namespace

std::string_view scenario_name(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::BernoulliXTheta:
      return "bernoulli_x_theta";
    case ScenarioKind::BinomialErf:
      return "binomial_erf";
    case ScenarioKind::GaussianErf:
      return "gaussian_erf";
  }
  return "unknown";
}

ScenarioKind parse_scenario(std::string_view name) {
  for (ScenarioKind kind : {ScenarioKind::BernoulliXTheta, ScenarioKind::BinomialErf, ScenarioKind::GaussianErf}) {
    if (scenario_name(kind) == name) return kind;
  }
  throw DomainError("unknown scenario kind '" + std::string(name) + "'");
}

double erf(double x) noexcept { return std::erf(x); }

double erf_loss(double x, double theta) noexcept {
  return std::clamp(0.5 * (pbcs::erf(x * theta) + 1.0), 0.0, 1.0);
}

double gaussian_kl_to_standard(double variance) {
  if (!(variance > 0.0)) throw DomainError("posterior variance must be positive");
  return 0.5 * (variance - 1.0 - std::log(variance));
}

std::vector<double> binomial_pmf(std::size_t trials, double p) {
  std::vector<double> pmf(trials + 1);
  double choose = 1.0;
  for (std::size_t k = 0; k <= trials; ++k) {
    if (k > 0) choose = choose * static_cast<double>(trials - k + 1) / static_cast<double>(k);
    pmf[k] = choose * std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(trials - k));
  }
  return pmf;
}

DiscreteSampler::DiscreteSampler(std::vector<double> weights, std::vector<std::vector<double>> losses,
                                 double kl_post_prior)
    : weights_(std::move(weights)), losses_(std::move(losses)), kl_(kl_post_prior) {
  if (weights_.size() != losses_.size() || weights_.empty()) {
    throw SchemaError("discrete sampler needs one loss row per weight");
  }
}

double DiscreteSampler::draw(Rng& rng) const { return static_cast<double>(rng.discrete(weights_)); }

std::vector<double> DiscreteSampler::losses(double atom) const {
  const auto index = static_cast<std::size_t>(atom);
  if (index >= losses_.size()) throw DomainError("atom index out of range");
  return losses_[index];
}

GaussianErfSampler::GaussianErfSampler(std::vector<double> data, double posterior_variance)
    : data_(std::move(data)), variance_(posterior_variance) {
  if (!(variance_ > 0.0)) throw DomainError("posterior variance must be positive");
}

double GaussianErfSampler::draw(Rng& rng) const { return std::sqrt(variance_) * rng.normal(); }

std::vector<double> GaussianErfSampler::losses(double theta) const {
  std::vector<double> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(), [theta](double x) { return erf_loss(x, theta); });
  return out;
}

FiniteSupportProblem ScenarioInstance::problem(double budget, ConstraintKind kind) const {
  if (!finite) throw DomainError(std::string(scenario_name(this->kind)) + " has no finite support");
  FiniteSupportProblem prob;
  prob.weights.assign(finite->posterior.weights().begin(), finite->posterior.weights().end());
  prob.losses = finite->losses;
  prob.budget = budget;
  prob.kind = kind;
  return prob;
}

BoundInputs ScenarioInstance::bound_inputs(double delta) const {
  if (!finite) throw DomainError(std::string(scenario_name(kind)) + " has no finite support");
  BoundInputs inp;
  inp.n = n;
  inp.kl_post_prior = kl_post_prior;
  inp.delta = delta;
  for (std::size_t i = 0; i < finite->losses.size(); ++i) {
    const auto& row = finite->losses[i];
    const double w = finite->posterior[i];
    const double mean = mean_of(row);
    double ss = 0.0;
    for (double c : row) ss += (c - mean) * (c - mean);
    inp.mu_hat_bar += w * mean;
    inp.v_hat += w * ss / static_cast<double>(row.size());
  }
  inp.mu_hat_bar = std::clamp(inp.mu_hat_bar, 0.0, 1.0);
  return inp;
}

ScenarioInstance gen_bernoulli(std::size_t n, std::uint64_t seed) {
  check_n(n);
  Rng rng(mix_seed({seed, kDataStream}));
  std::vector<double> x(n);
  for (double& v : x) v = rng.bernoulli(0.5) ? 1.0 : 0.0;

  FiniteScenario fs{
      {0.0, 1.0},
      DiscreteDistribution({0.1, 0.9}),
      DiscreteDistribution({0.2, 0.8}),
      {std::vector<double>(n, 0.0), x},
      {0.0, 0.5},
  };
  ScenarioInstance inst;
  inst.kind = ScenarioKind::BernoulliXTheta;
  inst.n = n;
  inst.true_integral = 0.9 * 0.5;
  inst.kl_post_prior = discrete_kl(fs.posterior, fs.prior);
  inst.sampler = std::make_shared<DiscreteSampler>(std::vector<double>{0.1, 0.9}, fs.losses, inst.kl_post_prior);
  inst.finite = std::move(fs);
  return inst;
}

ScenarioInstance gen_binomial_erf(std::size_t n, std::uint64_t seed) {
  check_n(n);
  const std::vector<double> x = standard_normal_sample(n, seed);

  std::vector<double> atoms(7);
  std::vector<std::vector<double>> losses(7, std::vector<double>(n));
  for (std::size_t k = 0; k < 7; ++k) {
    atoms[k] = (static_cast<double>(k) - 3.0) / 4.0;
    for (std::size_t i = 0; i < n; ++i) losses[k][i] = erf_loss(x[i], atoms[k]);
  }

  FiniteScenario fs{
      atoms,
      DiscreteDistribution(binomial_pmf(6, 0.8)),
      DiscreteDistribution(binomial_pmf(6, 0.7)),
      std::move(losses),
      std::vector<double>(7, 0.5),
  };
  ScenarioInstance inst;
  inst.kind = ScenarioKind::BinomialErf;
  inst.n = n;
  inst.true_integral = 0.5;
  inst.kl_post_prior = discrete_kl(fs.posterior, fs.prior);
  std::vector<double> weights(fs.posterior.weights().begin(), fs.posterior.weights().end());
  inst.sampler = std::make_shared<DiscreteSampler>(std::move(weights), fs.losses, inst.kl_post_prior);
  inst.finite = std::move(fs);
  return inst;
}

ScenarioInstance gen_gaussian_erf(std::size_t n, std::uint64_t seed, double posterior_variance) {
  check_n(n);
  ScenarioInstance inst;
  inst.kind = ScenarioKind::GaussianErf;
  inst.n = n;
  inst.true_integral = 0.5;
  inst.kl_post_prior = gaussian_kl_to_standard(posterior_variance);
  inst.sampler = std::make_shared<GaussianErfSampler>(standard_normal_sample(n, seed), posterior_variance);
  return inst;
}

ScenarioInstance generate(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::BernoulliXTheta:
      return gen_bernoulli(spec.n, spec.seed);
    case ScenarioKind::BinomialErf:
      return gen_binomial_erf(spec.n, spec.seed);
    case ScenarioKind::GaussianErf:
      return gen_gaussian_erf(spec.n, spec.seed, spec.posterior_variance);
  }
  throw DomainError("unknown scenario kind");
}

}  // namespace pbcs
