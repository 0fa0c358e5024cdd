#pragma once

// Experiment harness: JSON run configuration, sweeps over (method, n,
// repetition) cells on a worker pool, CSV results and per-(method, n)
// aggregation.
//
// Seeding. Repetition r draws its data from mix_seed({seed, r}); every n in
// the grid sees a prefix of that one stream. Monte Carlo methods draw their
// parameters from the cell seed mix_seed({seed, method_index, n, r}), where
// method_index is the position in the canonical Method enumeration, so
// adding or removing methods never perturbs other cells.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pbcs/bounds.hpp"
#include "pbcs/core_math.hpp"
#include "pbcs/montecarlo.hpp"
#include "pbcs/scenarios.hpp"

namespace pbcs {

struct RunConfig {
  ScenarioSpec scenario;  ///< n and seed are filled per cell
  std::vector<std::size_t> n_grid;
  std::size_t repetitions = 20;
  double delta = 0.05;
  std::vector<Method> methods;
  McConfig mc{4, 256, 2.1147, 0.05};  ///< delta is taken from the run
  std::uint64_t seed = 0;
  std::string output;

  /// Parses a JSON document. Unknown fields are rejected; every problem found
  /// is reported in one ValidationError.
  static RunConfig parse(std::string_view json_text);
  std::string to_json() const;

  /// Throws ValidationError listing every violated field.
  void validate() const;
};

struct ResultRow {
  Method method = Method::CoinBetting;
  std::size_t n = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double lower = 0.0;
  double upper = 0.0;
  double width = 0.0;
  double true_integral = 0.0;
  bool covered = false;
  double runtime_ms = 0.0;
};

struct AggregateRow {
  Method method = Method::CoinBetting;
  std::size_t n = 0;
  double mean_width = 0.0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  double coverage_rate = 0.0;
  std::size_t count = 0;
};

/// Data seed of repetition r.
std::uint64_t repetition_seed(std::uint64_t master, std::size_t repetition) noexcept;
/// Seed of one (method, n, repetition) cell.
std::uint64_t cell_seed(std::uint64_t master, Method method, std::size_t n, std::size_t repetition) noexcept;

/// Interval produced by `method` on one scenario instance.
ConfidenceInterval compute_method(Method method, const ScenarioInstance& instance, double delta, const McConfig& mc,
                                  std::uint64_t seed, const SolverTolerances& tol = {});

/// Worker count from PBCS_WORKERS, else the hardware concurrency (at least 1).
std::size_t default_worker_count();

/// Runs every cell. Rows come back sorted by (method name, n, repetition)
/// regardless of completion order. runtime_ms is measured only when `timing`
/// is set and is 0 otherwise, so the default output is byte-reproducible.
std::vector<ResultRow> run_experiment(const RunConfig& config, std::size_t workers, bool timing = false);

/// Formats with 17 significant digits.
std::string format_double(double value);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Writes to a file; throws IoError when it cannot be opened or written.
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);

/// Parses and checks every row (interval inside [0,1], width and covered
/// consistent with the endpoints). Throws SchemaError naming the bad line.
std::vector<ResultRow> read_results_csv(std::istream& in);

/// One row per (method, n). Throws DomainError on empty input.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace pbcs
