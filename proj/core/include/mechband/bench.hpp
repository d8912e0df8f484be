#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mechband/ode_spec.hpp"

namespace mechband {

enum class SolverKind { kBanded, kDense };

std::string to_string(SolverKind kind);

struct BenchCase {
  SolverKind solver = SolverKind::kBanded;
  std::size_t time_points = 50;
  std::size_t batch = 1;
  std::size_t variables = 3;
  std::size_t order = 1;
  std::size_t equations = 3;
  std::size_t repeats = 7;
  std::size_t warmup = 2;

  /// Dimensions of every spec in the case: one initial time point carrying
  /// all R + 1 orders, so T = 1 stays determined.
  Dimensions dims() const;
};

struct BenchResult {
  BenchCase bench_case;
  double median_seconds = 0.0;  // whole batch, forward + backward
  std::size_t retained_bytes = 0;  // closed-form count for the whole batch
  // max over the batch of |M y - beta|_inf / (|M|_inf |y|_inf + |beta|_inf)
  double residual = 0.0;
  bool skipped = false;  // estimated working set above the memory budget
};

struct BenchOptions {
  std::uint64_t seed = 0;
  // Timed regions run on one worker unless this is set.
  bool parallel = false;
  // Cases whose estimated peak working set exceeds this are reported as
  // skipped instead of run.
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
};

inline constexpr double kBenchResidualLimit = 1e-8;

/// Estimated peak bytes while a case runs (inputs, factors and gradients).
std::size_t bench_working_bytes(const BenchCase& bench_case);

/// Runs warmups then timed repeats of forward + backward on seeded random
/// specs and reports the median. Throws InvalidArgument if repeats < 3 and
/// OracleTooLarge if a dense case exceeds the oracle cap.
std::vector<BenchResult> run_bench(std::span<const BenchCase> cases,
                                   const BenchOptions& options = {});

/// Banded and dense over batch {64, 512, 4096} x T {5, 50, 500}, with
/// V = 3, R = 1, Q = 3.
std::vector<BenchCase> lorenz_preset();

/// Banded over T {64, ..., 1024} and dense over T {8, ..., 64}, batch 8.
std::vector<BenchCase> scaling_preset();

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Slope of median time against T over the non-skipped rows of one solver;
/// NaN with fewer than two rows.
double time_slope(std::span<const BenchResult> results, SolverKind solver);

/// Header solver,T,batch,V,R,Q,median_seconds,retained_bytes,residual.
/// Skipped rows carry "skipped" in the timing and residual columns.
void write_bench_csv(std::ostream& out, std::span<const BenchResult> results);

}  // namespace mechband
