#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mechband/banded_solver.hpp"
#include "mechband/bench.hpp"
#include "mechband/errors.hpp"

namespace mechband {
namespace {

TEST(LoglogSlope, RecoversExactPowerLaw) {
  const std::vector<double> x{8, 16, 32, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v * v);
  EXPECT_NEAR(loglog_slope(x, y), 3.0, 1e-12);
}

TEST(LoglogSlope, RejectsDegenerateInput) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(loglog_slope(one, one), Error);
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> y{1.0, 0.0};
  EXPECT_THROW(loglog_slope(x, y), Error);
}

TEST(BenchCase, DimensionsKeepSinglePointDetermined) {
  BenchCase c;
  c.time_points = 1;
  const Dimensions d = c.dims();
  EXPECT_GE(d.constraints(), d.unknowns());
}

TEST(RunBench, BandedCaseReportsExactBytesAndSmallResidual) {
  BenchCase c;
  c.time_points = 20;
  c.batch = 3;
  c.repeats = 3;
  c.warmup = 1;
  const std::vector<BenchResult> r = run_bench(std::span<const BenchCase>(&c, 1));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].skipped);
  EXPECT_GT(r[0].median_seconds, 0.0);
  EXPECT_LE(r[0].residual, kBenchResidualLimit);
  EXPECT_EQ(r[0].retained_bytes, banded_retained_bytes(c.dims()) * 3);
}

TEST(RunBench, DenseCaseRuns) {
  BenchCase c;
  c.solver = SolverKind::kDense;
  c.time_points = 10;
  c.batch = 2;
  c.repeats = 3;
  c.warmup = 0;
  const std::vector<BenchResult> r = run_bench(std::span<const BenchCase>(&c, 1));
  EXPECT_GT(r[0].median_seconds, 0.0);
  EXPECT_LE(r[0].residual, kBenchResidualLimit);
}

TEST(RunBench, RejectsTooFewRepeats) {
  BenchCase c;
  c.repeats = 2;
  EXPECT_THROW(run_bench(std::span<const BenchCase>(&c, 1)), Error);
}

TEST(RunBench, DenseAboveOracleCapThrows) {
  BenchCase c;
  c.solver = SolverKind::kDense;
  c.time_points = 1000;
  try {
    run_bench(std::span<const BenchCase>(&c, 1));
    FAIL() << "expected OracleTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleTooLarge);
  }
}

TEST(RunBench, OverBudgetCasesAreSkipped) {
  BenchCase c;
  c.solver = SolverKind::kDense;
  c.time_points = 500;
  c.batch = 64;
  const std::vector<BenchResult> r = run_bench(std::span<const BenchCase>(&c, 1));
  EXPECT_TRUE(r[0].skipped);
  EXPECT_TRUE(std::isnan(r[0].median_seconds));
}

TEST(Presets, LorenzGrid) {
  const std::vector<BenchCase> cases = lorenz_preset();
  ASSERT_EQ(cases.size(), 18u);
  std::size_t banded = 0;
  for (const BenchCase& c : cases) {
    banded += c.solver == SolverKind::kBanded;
    EXPECT_EQ(c.variables, 3u);
    EXPECT_EQ(c.order, 1u);
    EXPECT_EQ(c.equations, 3u);
    EXPECT_EQ(c.repeats, 7u);
    EXPECT_EQ(c.warmup, 2u);
  }
  EXPECT_EQ(banded, 9u);
  // Every dense T = 500 case is over the default budget, every banded case
  // is within it.
  const BenchOptions options;
  for (const BenchCase& c : cases) {
    if (c.solver == SolverKind::kBanded) EXPECT_LE(bench_working_bytes(c), options.memory_budget_bytes);
    if (c.solver == SolverKind::kDense && c.time_points == 500)
      EXPECT_GT(bench_working_bytes(c), options.memory_budget_bytes);
  }
}

TEST(Presets, ScalingGrid) {
  const std::vector<BenchCase> cases = scaling_preset();
  std::vector<std::size_t> banded, dense;
  for (const BenchCase& c : cases)
    (c.solver == SolverKind::kBanded ? banded : dense).push_back(c.time_points);
  EXPECT_EQ(banded, (std::vector<std::size_t>{64, 128, 256, 512, 1024}));
  EXPECT_EQ(dense, (std::vector<std::size_t>{8, 16, 32, 64}));
}

TEST(BandedBytes, ExactlyLinearInT) {
  BenchCase c;
  std::vector<std::size_t> bytes;
  for (std::size_t t : {64, 128, 256, 512, 1024}) {
    c.time_points = t;
    bytes.push_back(banded_retained_bytes(c.dims()));
  }
  const std::size_t b = c.dims().block_size();
  for (std::size_t i = 0; i + 1 < bytes.size(); ++i) {
    // Doubling T adds exactly T (2 B^2 + B) doubles.
    const std::size_t t = 64u << i;
    EXPECT_EQ(bytes[i + 1] - bytes[i], t * (2 * b * b + b) * sizeof(double));
  }
}

TEST(WriteBenchCsv, HeaderAndSkippedRows) {
  BenchResult ran;
  ran.median_seconds = 0.5;
  ran.retained_bytes = 10;
  ran.residual = 1e-15;
  BenchResult skipped;
  skipped.bench_case.solver = SolverKind::kDense;
  skipped.skipped = true;
  skipped.retained_bytes = 20;
  const std::vector<BenchResult> rows{ran, skipped};
  std::ostringstream out;
  write_bench_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "solver,T,batch,V,R,Q,median_seconds,retained_bytes,residual");
  std::getline(in, line);
  EXPECT_EQ(line, "banded,50,1,3,1,3,0.5,10,1.0000000000000001e-15");
  std::getline(in, line);
  EXPECT_EQ(line, "dense,50,1,3,1,3,skipped,20,skipped");
}

}  // namespace
}  // namespace mechband
