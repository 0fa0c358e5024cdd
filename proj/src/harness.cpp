#include "pbcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pbcs/errors.hpp"
#include "pbcs/optimizer.hpp"

namespace pbcs {

namespace {

using nlohmann::json;

constexpr const char* kResultsHeader = "method,n,repetition,seed,lower,upper,width,true_integral,covered,runtime_ms";
constexpr const char* kAggregateHeader = "method,n,mean_width,mean_lower,mean_upper,coverage_rate";

bool needs_finite_support(Method method) {
  return method != Method::McAlgorithm1 && method != Method::MaurerMc;
}

bool is_monte_carlo(Method method) { return !needs_finite_support(method); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                    std::vector<std::string>& problems) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) problems.push_back("unknown field '" + where + item.key() + "'");
  }
}

template <typename T>
bool read_number(const json& obj, const char* key, T& out, const std::string& where,
                 std::vector<std::string>& problems) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) {
      problems.push_back("field '" + where + key + "' must be a number");
      return false;
    }
  } else {
    if (!v.is_number_unsigned()) {
      problems.push_back("field '" + where + key + "' must be a nonnegative integer");
      return false;
    }
  }
  out = v.get<T>();
  return true;
}

ConfidenceInterval exact_interval(Method method, const ScenarioInstance& instance, double delta,
                                  const SolverTolerances& tol) {
  const ConstraintKind kind = method == Method::CoinBetting ? ConstraintKind::CoinBetting : ConstraintKind::KlVer;
  const double budget = budget_c_n_delta(instance.n, instance.kl_post_prior, delta);
  const FiniteSupportProblem prob = instance.problem(budget, kind);
  ConfidenceInterval ci;
  ci.method = method;
  ci.n = instance.n;
  ci.delta = delta;
  ci.upper = solve_bound(prob, Direction::Upper, tol).value;
  ci.lower = solve_bound(prob, Direction::Lower, tol).value;
  ci.raw_lower = ci.lower;
  ci.raw_upper = ci.upper;
  return ci;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

RunConfig RunConfig::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("config is not valid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ValidationError({"config must be a JSON object"});

  std::vector<std::string> problems;
  reject_unknown(doc, {"scenario", "n_grid", "repetitions", "delta", "methods", "mc", "seed", "output"}, "",
                 problems);

  RunConfig cfg;
  cfg.n_grid.clear();
  for (int c = 1; c <= 15; ++c) cfg.n_grid.push_back(std::size_t{1} << c);

  if (!doc.contains("scenario") || !doc["scenario"].is_object()) {
    problems.emplace_back("field 'scenario' is required and must be an object");
  } else {
    const json& sc = doc["scenario"];
    reject_unknown(sc, {"kind", "posterior_variance"}, "scenario.", problems);
    if (!sc.contains("kind") || !sc["kind"].is_string()) {
      problems.emplace_back("field 'scenario.kind' is required and must be a string");
    } else {
      try {
        cfg.scenario.kind = parse_scenario(sc["kind"].get<std::string>());
      } catch (const DomainError& e) {
        problems.push_back(std::string("field 'scenario.kind': ") + e.what());
      }
    }
    read_number(sc, "posterior_variance", cfg.scenario.posterior_variance, "scenario.", problems);
  }

  if (doc.contains("n_grid")) {
    if (!doc["n_grid"].is_array()) {
      problems.emplace_back("field 'n_grid' must be an array of positive integers");
    } else {
      cfg.n_grid.clear();
      for (const auto& v : doc["n_grid"]) {
        if (!v.is_number_unsigned()) {
          problems.emplace_back("field 'n_grid' must contain positive integers only");
          break;
        }
        cfg.n_grid.push_back(v.get<std::size_t>());
      }
    }
  }
  read_number(doc, "repetitions", cfg.repetitions, "", problems);
  read_number(doc, "delta", cfg.delta, "", problems);
  read_number(doc, "seed", cfg.seed, "", problems);

  if (!doc.contains("methods") || !doc["methods"].is_array()) {
    problems.emplace_back("field 'methods' is required and must be an array of method names");
  } else {
    for (const auto& v : doc["methods"]) {
      if (!v.is_string()) {
        problems.emplace_back("field 'methods' must contain strings only");
        continue;
      }
      try {
        cfg.methods.push_back(parse_method(v.get<std::string>()));
      } catch (const DomainError& e) {
        problems.push_back(std::string("field 'methods': ") + e.what());
      }
    }
  }

  if (doc.contains("mc")) {
    if (!doc["mc"].is_object()) {
      problems.emplace_back("field 'mc' must be an object");
    } else {
      const json& mc = doc["mc"];
      reject_unknown(mc, {"K", "m", "multiplier"}, "mc.", problems);
      read_number(mc, "K", cfg.mc.K, "mc.", problems);
      read_number(mc, "m", cfg.mc.m, "mc.", problems);
      read_number(mc, "multiplier", cfg.mc.multiplier, "mc.", problems);
    }
  }

  if (!doc.contains("output") || !doc["output"].is_string()) {
    problems.emplace_back("field 'output' is required and must be a string");
  } else {
    cfg.output = doc["output"].get<std::string>();
  }

  cfg.mc.delta = cfg.delta;
  // Range checks run too, skipping fields that already failed to parse.
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    const auto field_of = [](const std::string& message) {
      const auto start = message.find('\'');
      const auto stop = message.find('\'', start + 1);
      return start == std::string::npos || stop == std::string::npos ? message
                                                                      : message.substr(start + 1, stop - start - 1);
    };
    std::set<std::string> reported;
    for (const auto& p : problems) reported.insert(field_of(p));
    for (const auto& p : e.problems()) {
      if (!reported.count(field_of(p))) problems.push_back(p);
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return cfg;
}

std::string RunConfig::to_json() const {
  json doc;
  doc["scenario"] = {{"kind", std::string(scenario_name(scenario.kind))}};
  if (scenario.kind == ScenarioKind::GaussianErf) doc["scenario"]["posterior_variance"] = scenario.posterior_variance;
  doc["n_grid"] = n_grid;
  doc["repetitions"] = repetitions;
  doc["delta"] = delta;
  json names = json::array();
  for (Method m : methods) names.push_back(std::string(method_name(m)));
  doc["methods"] = names;
  doc["mc"] = {{"K", mc.K}, {"m", mc.m}, {"multiplier", mc.multiplier}};
  doc["seed"] = seed;
  doc["output"] = output;
  return doc.dump(2);
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (n_grid.empty()) problems.emplace_back("field 'n_grid' must not be empty");
  for (std::size_t n : n_grid) {
    if (n < 1) {
      problems.emplace_back("field 'n_grid' entries must be at least 1");
      break;
    }
  }
  if (repetitions < 1) problems.emplace_back("field 'repetitions' must be at least 1");
  if (!(delta > 0.0 && delta <= 1.0)) problems.emplace_back("field 'delta' must lie in (0,1]");
  if (methods.empty()) problems.emplace_back("field 'methods' must not be empty");
  std::set<Method> seen;
  for (Method m : methods) {
    if (!seen.insert(m).second) problems.push_back("field 'methods' lists '" + std::string(method_name(m)) + "' twice");
    if (scenario.kind == ScenarioKind::GaussianErf && needs_finite_support(m)) {
      problems.push_back("field 'methods': '" + std::string(method_name(m)) +
                         "' needs a finite-support scenario, not gaussian_erf");
    }
  }
  if (!(scenario.posterior_variance > 0.0)) problems.emplace_back("field 'scenario.posterior_variance' must be positive");
  if (std::any_of(methods.begin(), methods.end(), is_monte_carlo)) {
    McConfig checked = mc;
    checked.delta = delta;
    try {
      checked.validate();
    } catch (const ValidationError& e) {
      for (const auto& p : e.problems()) problems.push_back("field 'mc': " + p);
    }
  }
  if (output.empty()) problems.emplace_back("field 'output' must not be empty");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::uint64_t repetition_seed(std::uint64_t master, std::size_t repetition) noexcept {
  return mix_seed({master, static_cast<std::uint64_t>(repetition)});
}

std::uint64_t cell_seed(std::uint64_t master, Method method, std::size_t n, std::size_t repetition) noexcept {
  return mix_seed({master, static_cast<std::uint64_t>(method), static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(repetition)});
}

ConfidenceInterval compute_method(Method method, const ScenarioInstance& instance, double delta, const McConfig& mc,
                                  std::uint64_t seed, const SolverTolerances& tol) {
  switch (method) {
    case Method::CoinBetting:
    case Method::KlVer:
      return exact_interval(method, instance, delta, tol);
    case Method::MaurerRelaxed:
      return maurer_relaxed_interval(instance.bound_inputs(delta));
    case Method::MaurerOriginal:
      return maurer_original_interval(instance.bound_inputs(delta));
    case Method::McAllester:
      return mcallester_interval(instance.bound_inputs(delta));
    case Method::EmpiricalBernstein:
      return empirical_bernstein_interval(instance.bound_inputs(delta));
    case Method::Intersection:
      return intersect_relaxations(instance.bound_inputs(delta));
    case Method::McAlgorithm1: {
      McConfig cfg = mc;
      cfg.delta = delta;
      return run_algorithm1(*instance.sampler, instance.n, cfg, seed, tol).interval;
    }
    case Method::MaurerMc:
      return run_maurer_mc(*instance.sampler, instance.n, mc.K * mc.m, delta, seed);
  }
  throw DomainError("unknown method");
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("PBCS_WORKERS")) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_experiment(const RunConfig& config, std::size_t workers, bool timing) {
  config.validate();

  struct Job {
    Method method;
    std::size_t n;
    std::size_t repetition;
  };
  std::vector<Job> jobs;
  for (Method m : config.methods) {
    for (std::size_t n : config.n_grid) {
      for (std::size_t r = 0; r < config.repetitions; ++r) jobs.push_back({m, n, r});
    }
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    const auto key_a = std::make_tuple(method_name(a.method), a.n, a.repetition);
    const auto key_b = std::make_tuple(method_name(b.method), b.n, b.repetition);
    return key_a < key_b;
  });

  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= jobs.size()) return;
      try {
        const Job& job = jobs[index];
        ScenarioSpec spec = config.scenario;
        spec.n = job.n;
        spec.seed = repetition_seed(config.seed, job.repetition);
        const std::uint64_t seed = cell_seed(config.seed, job.method, job.n, job.repetition);

        const auto start = std::chrono::steady_clock::now();
        const ScenarioInstance instance = generate(spec);
        const ConfidenceInterval ci = compute_method(job.method, instance, config.delta, config.mc, seed);
        const auto stop = std::chrono::steady_clock::now();

        ResultRow& row = rows[index];
        row.method = job.method;
        row.n = job.n;
        row.repetition = job.repetition;
        row.seed = seed;
        row.lower = ci.lower;
        row.upper = ci.upper;
        row.width = ci.upper - ci.lower;
        row.true_integral = instance.true_integral;
        row.covered = ci.contains(instance.true_integral);
        row.runtime_ms = timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };

  const std::size_t pool = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << method_name(r.method) << ',' << r.n << ',' << r.repetition << ',' << r.seed << ',' << format_double(r.lower)
        << ',' << format_double(r.upper) << ',' << format_double(r.width) << ',' << format_double(r.true_integral)
        << ',' << (r.covered ? 1 : 0) << ',' << format_double(r.runtime_ms) << '\n';
  }
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_results_csv(out, rows);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("results CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw SchemaError("unexpected results header: " + line);

  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() != 10) throw SchemaError(where + "expected 10 fields, got " + std::to_string(fields.size()));
    ResultRow r;
    try {
      r.method = parse_method(fields[0]);
      r.n = std::stoull(fields[1]);
      r.repetition = std::stoull(fields[2]);
      r.seed = std::stoull(fields[3]);
      r.lower = std::stod(fields[4]);
      r.upper = std::stod(fields[5]);
      r.width = std::stod(fields[6]);
      r.true_integral = std::stod(fields[7]);
      if (fields[8] != "0" && fields[8] != "1") throw SchemaError("covered must be 0 or 1");
      r.covered = fields[8] == "1";
      r.runtime_ms = std::stod(fields[9]);
    } catch (const Error& e) {
      throw SchemaError(where + e.what());
    } catch (const std::exception&) {
      throw SchemaError(where + "malformed number");
    }
    if (!(0.0 <= r.lower && r.lower <= r.upper && r.upper <= 1.0)) {
      throw SchemaError(where + "interval must satisfy 0 <= lower <= upper <= 1");
    }
    if (std::abs(r.width - (r.upper - r.lower)) > 1e-12) throw SchemaError(where + "width != upper - lower");
    if (r.covered != (r.lower <= r.true_integral && r.true_integral <= r.upper)) {
      throw SchemaError(where + "covered flag disagrees with the interval");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw DomainError("cannot aggregate an empty result set");
  std::map<std::pair<std::string_view, std::size_t>, AggregateRow> groups;
  for (const auto& r : rows) {
    AggregateRow& g = groups[{method_name(r.method), r.n}];
    g.method = r.method;
    g.n = r.n;
    g.mean_width += r.width;
    g.mean_lower += r.lower;
    g.mean_upper += r.upper;
    g.coverage_rate += r.covered ? 1.0 : 0.0;
    ++g.count;
  }
  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    const double count = static_cast<double>(g.count);
    g.mean_width /= count;
    g.mean_lower /= count;
    g.mean_upper /= count;
    g.coverage_rate /= count;
    out.push_back(g);
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << method_name(r.method) << ',' << r.n << ',' << format_double(r.mean_width) << ','
        << format_double(r.mean_lower) << ',' << format_double(r.mean_upper) << ',' << format_double(r.coverage_rate)
        << '\n';
  }
}

}  // namespace pbcs
