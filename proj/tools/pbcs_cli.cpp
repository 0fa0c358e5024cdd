// pbcs: command-line front end.
//
//   pbcs psi-star   --losses 1,1,1,0 --mu 0.5
//   pbcs bound      --input matrix.json [--delta 0.05]
//   pbcs mc         --scenario gaussian_erf --n 32 [--delta 0.15] [--K 4 --m 256 --multiplier 2.1147]
//   pbcs experiment --config run.json [--workers N] [--timing]
//   pbcs aggregate  --input results.csv [--output summary.csv]
//
// Exit codes: 0 success, 2 usage or validation, 3 solver failure, 4 I/O.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbcs/bounds.hpp"
#include "pbcs/core_math.hpp"
#include "pbcs/errors.hpp"
#include "pbcs/harness.hpp"
#include "pbcs/montecarlo.hpp"
#include "pbcs/optimizer.hpp"
#include "pbcs/scenarios.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

std::vector<double> parse_losses(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw pbcs::DomainError("--losses: '" + item + "' is not a number");
    }
    if (used != item.size()) throw pbcs::DomainError("--losses: '" + item + "' is not a number");
    if (!(v >= 0.0 && v <= 1.0)) throw pbcs::DomainError("--losses: " + item + " is outside [0,1]");
    out.push_back(v);
  }
  if (out.empty()) throw pbcs::DomainError("--losses: at least one loss is required");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pbcs::IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json interval_json(const pbcs::ConfidenceInterval& ci) {
  return {{"method", std::string(pbcs::method_name(ci.method))},
          {"n", ci.n},
          {"delta", ci.delta},
          {"lower", ci.lower},
          {"upper", ci.upper},
          {"width", ci.width()}};
}

int cmd_psi_star(const std::string& losses_text, double mu) {
  const auto losses = parse_losses(losses_text);
  const pbcs::PsiStarResult r = pbcs::psi_star(losses, mu);
  json out = {{"value", number_or_string(r.value)},
              {"lambda_star", number_or_string(r.lambda_star)},
              {"iterations", r.iterations}};
  std::cout << out.dump() << '\n';
  return 0;
}

// Loss matrix document: {"weights": [...], "losses": [[...], ...], "prior": [...]}
// or "kl_post_prior": x in place of "prior".
int cmd_bound(const std::string& path, double delta) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw pbcs::ValidationError({std::string("loss matrix is not valid JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  if (!doc.is_object()) throw pbcs::ValidationError({"loss matrix must be a JSON object"});
  for (const auto& item : doc.items()) {
    if (item.key() != "weights" && item.key() != "losses" && item.key() != "prior" && item.key() != "kl_post_prior") {
      problems.push_back("unknown field '" + item.key() + "'");
    }
  }
  if (!doc.contains("weights")) problems.emplace_back("field 'weights' is required");
  if (!doc.contains("losses")) problems.emplace_back("field 'losses' is required");
  if (doc.contains("prior") == doc.contains("kl_post_prior")) {
    problems.emplace_back("exactly one of 'prior' or 'kl_post_prior' is required");
  }
  if (!problems.empty()) throw pbcs::ValidationError(std::move(problems));

  pbcs::ScenarioInstance inst;
  std::vector<double> weights;
  std::vector<std::vector<double>> losses;
  try {
    weights = doc["weights"].get<std::vector<double>>();
    losses = doc["losses"].get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw pbcs::ValidationError({std::string("weights/losses have the wrong type: ") + e.what()});
  }
  pbcs::DiscreteDistribution posterior(weights);
  double kl = 0.0;
  if (doc.contains("prior")) {
    kl = pbcs::discrete_kl(posterior, pbcs::DiscreteDistribution(doc["prior"].get<std::vector<double>>()));
  } else {
    kl = doc["kl_post_prior"].get<double>();
  }
  if (losses.empty()) throw pbcs::ValidationError({"field 'losses' must have one row per weight"});
  inst.n = losses.front().size();
  inst.kl_post_prior = kl;
  inst.finite = pbcs::FiniteScenario{std::vector<double>(weights.size()), posterior, posterior, losses,
                                     std::vector<double>(weights.size(), 0.0)};
  inst.problem(0.0, pbcs::ConstraintKind::CoinBetting).validate();

  const pbcs::McConfig unused_mc;
  json rows = json::array();
  for (pbcs::Method m : {pbcs::Method::CoinBetting, pbcs::Method::KlVer, pbcs::Method::MaurerRelaxed,
                         pbcs::Method::MaurerOriginal, pbcs::Method::McAllester, pbcs::Method::EmpiricalBernstein,
                         pbcs::Method::Intersection}) {
    rows.push_back(interval_json(pbcs::compute_method(m, inst, delta, unused_mc, 0)));
  }
  json out = {{"n", inst.n}, {"kl_post_prior", kl}, {"delta", delta}, {"intervals", rows}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct McArgs {
  std::string scenario = "gaussian_erf";
  std::size_t n = 32;
  std::uint64_t seed = 0;
  double delta_total = 0.15;
  std::size_t K = 0;
  std::size_t m = 256;
  double multiplier = 0.0;
  double posterior_variance = 0.25;
};

int cmd_mc(const McArgs& a) {
  pbcs::ScenarioSpec spec;
  spec.kind = pbcs::parse_scenario(a.scenario);
  spec.n = a.n;
  spec.seed = a.seed;
  spec.posterior_variance = a.posterior_variance;
  const pbcs::ScenarioInstance inst = pbcs::generate(spec);

  // The guarantee is 1 - 3 delta, so the target total failure is split in three.
  const double delta = a.delta_total / 3.0;
  pbcs::McConfig cfg = pbcs::McConfig::defaults_for(delta, a.m);
  if (a.K > 0) cfg.K = a.K;
  if (a.multiplier > 0.0) cfg.multiplier = a.multiplier;

  const pbcs::Algorithm1Result r =
      pbcs::run_algorithm1(*inst.sampler, inst.n, cfg, pbcs::mix_seed({a.seed, 0xA1}));
  json blocks = json::array();
  for (std::size_t k = 0; k < cfg.K; ++k) {
    blocks.push_back({{"nu_upper", r.upper_blocks[k].nu_bar}, {"nu_lower", r.lower_blocks[k].nu_bar}});
  }
  json out = interval_json(r.interval);
  out["delta_total"] = a.delta_total;
  out["delta_algorithm"] = delta;
  out["effective_confidence"] = r.effective_confidence;
  out["K"] = cfg.K;
  out["m"] = cfg.m;
  out["multiplier"] = cfg.multiplier;
  out["kl_correction"] = r.kl_correction;
  out["k_upper"] = r.k_upper;
  out["k_lower"] = r.k_lower;
  out["blocks"] = blocks;
  out["true_integral"] = inst.true_integral;
  std::cout << out.dump() << '\n';
  return 0;
}

int cmd_experiment(const std::string& config_path, std::size_t workers, bool timing) {
  const pbcs::RunConfig cfg = pbcs::RunConfig::parse(read_file(config_path));
  const auto rows = pbcs::run_experiment(cfg, workers == 0 ? pbcs::default_worker_count() : workers, timing);
  pbcs::write_results_csv(cfg.output, rows);
  std::cerr << "wrote " << rows.size() << " rows to " << cfg.output << '\n';
  return 0;
}

int cmd_aggregate(const std::string& input, const std::string& output) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw pbcs::IoError("cannot open '" + input + "'");
  const auto summary = pbcs::aggregate(pbcs::read_results_csv(in));
  if (output.empty()) {
    pbcs::write_aggregate_csv(std::cout, summary);
    return 0;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw pbcs::IoError("cannot open '" + output + "' for writing");
  pbcs::write_aggregate_csv(out, summary);
  if (!out) throw pbcs::IoError("failed writing '" + output + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-uniform PAC-Bayes confidence intervals via coin betting"};
  app.require_subcommand(1);

  std::string losses_text;
  double mu = 0.0;
  auto* psi = app.add_subcommand("psi-star", "Optimal log-wealth of a loss sequence at a candidate mean");
  psi->add_option("--losses", losses_text, "Comma-separated losses in [0,1]")->required();
  psi->add_option("--mu", mu, "Candidate mean in [0,1]")->required()->check(CLI::Range(0.0, 1.0));

  std::string matrix_path;
  double bound_delta = 0.05;
  auto* bound = app.add_subcommand("bound", "All exact and closed-form intervals for a loss matrix JSON");
  bound->add_option("--input", matrix_path, "Loss matrix JSON")->required();
  bound->add_option("--delta", bound_delta, "Failure probability")->check(CLI::Range(1e-300, 1.0));

  McArgs mc_args;
  auto* mc = app.add_subcommand("mc", "Boosted Monte Carlo interval on a generated scenario");
  mc->add_option("--scenario", mc_args.scenario, "bernoulli_x_theta | binomial_erf | gaussian_erf");
  mc->add_option("--n", mc_args.n, "Sample size")->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_args.seed, "Master seed");
  mc->add_option("--delta", mc_args.delta_total, "Total failure probability (split in three)")
      ->check(CLI::Range(1e-300, 1.0));
  mc->add_option("--K", mc_args.K, "Number of blocks (default ceil(ln(3/delta)))");
  mc->add_option("--m", mc_args.m, "Draws per block")->check(CLI::PositiveNumber);
  mc->add_option("--multiplier", mc_args.multiplier, "Markov multiplier C > 1 (default e)");
  mc->add_option("--posterior-variance", mc_args.posterior_variance, "Variance of the Gaussian posterior");

  std::string config_path;
  std::size_t workers = 0;
  bool timing = false;
  auto* experiment = app.add_subcommand("experiment", "Run a configured sweep and write a results CSV");
  experiment->add_option("--config", config_path, "Run configuration JSON")->required();
  experiment->add_option("--workers", workers, "Worker threads (default PBCS_WORKERS or hardware)");
  experiment->add_flag("--timing", timing, "Record wall time per cell (output no longer byte-reproducible)");

  std::string agg_in;
  std::string agg_out;
  auto* agg = app.add_subcommand("aggregate", "Per-(method, n) means and coverage of a results CSV");
  agg->add_option("--input", agg_in, "Results CSV")->required();
  agg->add_option("--output", agg_out, "Destination CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*psi) return cmd_psi_star(losses_text, mu);
    if (*bound) return cmd_bound(matrix_path, bound_delta);
    if (*mc) return cmd_mc(mc_args);
    if (*experiment) return cmd_experiment(config_path, workers, timing);
    if (*agg) return cmd_aggregate(agg_in, agg_out);
  } catch (const pbcs::ValidationError& e) {
    for (const auto& p : e.problems()) std::cerr << "error: " << p << '\n';
    return kExitUsage;
  } catch (const pbcs::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const pbcs::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const pbcs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
