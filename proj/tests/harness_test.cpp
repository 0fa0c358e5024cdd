#include "pbcs/harness.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pbcs/errors.hpp"

namespace pbcs {
namespace {

const char* kSmallConfig = R"({
  "scenario": {"kind": "bernoulli_x_theta"},
  "n_grid": [4],
  "repetitions": 2,
  "delta": 0.05,
  "methods": ["coin_betting", "maurer_relaxed"],
  "seed": 7,
  "output": "out.csv"
})";

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_results_csv(out, rows);
  return out.str();
}

ResultRow row(Method m, std::size_t n, std::size_t rep, double lo, double hi, double truth = 0.5) {
  ResultRow r;
  r.method = m;
  r.n = n;
  r.repetition = rep;
  r.lower = lo;
  r.upper = hi;
  r.width = hi - lo;
  r.true_integral = truth;
  r.covered = lo <= truth && truth <= hi;
  return r;
}

TEST(RunConfigTest, ParsesAndRoundTrips) {
  const RunConfig cfg = RunConfig::parse(kSmallConfig);
  EXPECT_EQ(cfg.scenario.kind, ScenarioKind::BernoulliXTheta);
  EXPECT_EQ(cfg.n_grid, std::vector<std::size_t>{4});
  EXPECT_EQ(cfg.repetitions, 2u);
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::CoinBetting, Method::MaurerRelaxed}));
  EXPECT_EQ(cfg.seed, 7u);
  const RunConfig again = RunConfig::parse(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
}

TEST(RunConfigTest, DefaultGridIsPowersOfTwo) {
  const RunConfig cfg = RunConfig::parse(R"({"scenario": {"kind": "binomial_erf"}, "methods": ["kl_ver"],
                                             "output": "x.csv"})");
  ASSERT_EQ(cfg.n_grid.size(), 15u);
  EXPECT_EQ(cfg.n_grid.front(), 2u);
  EXPECT_EQ(cfg.n_grid.back(), 32768u);
  EXPECT_EQ(cfg.repetitions, 20u);
}

TEST(RunConfigTest, ReportsEveryProblem) {
  try {
    RunConfig::parse(R"({"scenario": {"kind": "nope"}, "methods": ["coin_betting", "bogus"],
                         "delta": 2, "repetitions": 0, "colour": 1, "output": "o.csv"})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string all = e.what();
    EXPECT_GE(e.problems().size(), 5u) << all;
    EXPECT_NE(all.find("colour"), std::string::npos);
    EXPECT_NE(all.find("scenario.kind"), std::string::npos);
    EXPECT_NE(all.find("bogus"), std::string::npos);
    EXPECT_NE(all.find("delta"), std::string::npos);
    EXPECT_NE(all.find("repetitions"), std::string::npos);
  }
}

TEST(RunConfigTest, RejectsMalformedJsonAndBadCombinations) {
  EXPECT_THROW(RunConfig::parse("{not json"), ValidationError);
  EXPECT_THROW(RunConfig::parse(R"({"scenario": {"kind": "gaussian_erf"}, "methods": ["coin_betting"],
                                    "output": "o.csv"})"),
               ValidationError);
  EXPECT_THROW(RunConfig::parse(R"({"scenario": {"kind": "bernoulli_x_theta"}, "methods": ["kl_ver", "kl_ver"],
                                    "output": "o.csv"})"),
               ValidationError);
  EXPECT_THROW(RunConfig::parse(R"({"scenario": {"kind": "gaussian_erf"}, "methods": ["mc_algorithm1"],
                                    "mc": {"K": 1, "m": 4, "multiplier": 2}, "output": "o.csv"})"),
               ValidationError);
  EXPECT_THROW(RunConfig::parse(R"({"scenario": {"kind": "bernoulli_x_theta"}, "methods": ["kl_ver"],
                                    "n_grid": [], "output": "o.csv"})"),
               ValidationError);
}

TEST(SeedTest, CellSeedsDifferAcrossCoordinates) {
  const auto base = cell_seed(1, Method::McAlgorithm1, 32, 0);
  EXPECT_NE(base, cell_seed(1, Method::MaurerMc, 32, 0));
  EXPECT_NE(base, cell_seed(1, Method::McAlgorithm1, 64, 0));
  EXPECT_NE(base, cell_seed(1, Method::McAlgorithm1, 32, 1));
  EXPECT_NE(base, cell_seed(2, Method::McAlgorithm1, 32, 0));
  EXPECT_NE(repetition_seed(1, 0), repetition_seed(1, 1));
}

TEST(RunExperimentTest, CardinalityAndOrdering) {
  const RunConfig cfg = RunConfig::parse(kSmallConfig);
  const auto rows = run_experiment(cfg, 1);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].method, Method::CoinBetting);
  EXPECT_EQ(rows[0].repetition, 0u);
  EXPECT_EQ(rows[3].method, Method::MaurerRelaxed);
  for (const auto& r : rows) {
    EXPECT_EQ(r.n, 4u);
    EXPECT_EQ(r.true_integral, 0.45);
    EXPECT_EQ(r.width, r.upper - r.lower);
    EXPECT_EQ(r.covered, r.lower <= 0.45 && 0.45 <= r.upper);
    EXPECT_EQ(r.runtime_ms, 0.0);
  }
}

TEST(RunExperimentTest, ByteIdenticalAcrossRunsAndWorkerCounts) {
  RunConfig cfg = RunConfig::parse(R"({
    "scenario": {"kind": "binomial_erf"}, "n_grid": [2, 8, 32], "repetitions": 3,
    "methods": ["coin_betting", "kl_ver", "intersection", "mc_algorithm1", "maurer_mc"],
    "mc": {"K": 4, "m": 8, "multiplier": 2.1147}, "seed": 3, "output": "o.csv"})");
  const std::string a = to_csv(run_experiment(cfg, 1));
  const std::string b = to_csv(run_experiment(cfg, 1));
  const std::string c = to_csv(run_experiment(cfg, 4));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(RunExperimentTest, MethodsShareDataAndNestedPrefixes) {
  RunConfig cfg = RunConfig::parse(R"({
    "scenario": {"kind": "bernoulli_x_theta"}, "n_grid": [16, 64], "repetitions": 4,
    "methods": ["coin_betting", "kl_ver", "maurer_relaxed"], "seed": 9, "output": "o.csv"})");
  const auto rows = run_experiment(cfg, 2);
  // Rows sorted by (method name, n, rep): coin_betting, kl_ver, maurer_relaxed.
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& coin = rows[i];
    const auto& kl = rows[8 + i];
    const auto& maurer = rows[16 + i];
    EXPECT_EQ(coin.n, kl.n);
    EXPECT_EQ(coin.repetition, maurer.repetition);
    EXPECT_LE(coin.width, kl.width + 1e-9);
    EXPECT_LE(kl.width, maurer.width + 1e-9);
  }
}

TEST(RunExperimentTest, TimingFlagFillsRuntime) {
  const RunConfig cfg = RunConfig::parse(kSmallConfig);
  const auto rows = run_experiment(cfg, 1, true);
  for (const auto& r : rows) EXPECT_GE(r.runtime_ms, 0.0);
}

TEST(CsvTest, RoundTripThroughValidatingReader) {
  const RunConfig cfg = RunConfig::parse(kSmallConfig);
  const auto rows = run_experiment(cfg, 1);
  std::istringstream in(to_csv(rows));
  const auto back = read_results_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].lower, rows[i].lower);
    EXPECT_EQ(back[i].upper, rows[i].upper);
    EXPECT_EQ(back[i].seed, rows[i].seed);
  }
}

TEST(CsvTest, ReaderRejectsBadRows) {
  const std::string header = "method,n,repetition,seed,lower,upper,width,true_integral,covered,runtime_ms\n";
  const auto expect_bad = [&](const std::string& body, const std::string& needle) {
    std::istringstream in(header + body);
    try {
      read_results_csv(in);
      FAIL() << "accepted: " << body;
    } catch (const SchemaError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_bad("coin_betting,4,0,1,0.6,0.4,-0.2,0.5,0,0\n", "line 2");
  expect_bad("coin_betting,4,0,1,0.1,0.9,0.8,0.5,0,0\n", "covered");
  expect_bad("coin_betting,4,0,1,0.1,0.9,0.5,0.5,1,0\n", "width");
  expect_bad("coin_betting,4,0,1,abc,0.9,0.8,0.5,1,0\n", "malformed");
  expect_bad("nope,4,0,1,0.1,0.9,0.8,0.5,1,0\n", "nope");
  expect_bad("coin_betting,4,0\n", "fields");
  std::istringstream wrong_header("a,b\n");
  EXPECT_THROW(read_results_csv(wrong_header), SchemaError);
}

TEST(CsvTest, UnwritablePathIsIoError) {
  EXPECT_THROW(write_results_csv("/nonexistent-dir/x/results.csv", {}), IoError);
}

TEST(AggregateTest, Examples) {
  EXPECT_THROW(aggregate({}), DomainError);
  const auto single = aggregate({row(Method::KlVer, 8, 0, 0.2, 0.7)});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].mean_width, 0.7 - 0.2);
  EXPECT_EQ(single[0].mean_lower, 0.2);
  EXPECT_EQ(single[0].mean_upper, 0.7);
  EXPECT_EQ(single[0].coverage_rate, 1.0);
  EXPECT_EQ(single[0].count, 1u);

  const auto two = aggregate({row(Method::KlVer, 8, 0, 0.3, 0.5), row(Method::KlVer, 8, 1, 0.6, 1.0),
                              row(Method::McAllester, 8, 0, 0.0, 1.0)});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].method, Method::KlVer);
  EXPECT_NEAR(two[0].mean_width, 0.3, 1e-15);
  EXPECT_NEAR(two[0].coverage_rate, 0.5, 1e-15);
  EXPECT_EQ(two[1].method, Method::McAllester);

  std::ostringstream out;
  write_aggregate_csv(out, two);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "method,n,mean_width,mean_lower,mean_upper,coverage_rate");
}

TEST(FormatDoubleTest, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, 0.45, 1e-300, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}

}  // namespace
}  // namespace pbcs
