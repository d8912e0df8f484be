// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and never read from outside.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mechband/banded_solver.hpp"
#include "mechband/bench.hpp"
#include "mechband/block_assembly.hpp"
#include "mechband/dense_oracle.hpp"
#include "mechband/errors.hpp"
#include "mechband/experiments.hpp"
#include "mechband/gradient_chain.hpp"
#include "mechband/lorenz.hpp"
#include "mechband/parallel.hpp"
#include "oracles.hpp"

namespace {

using namespace mechband;
using Clock = std::chrono::steady_clock;

constexpr double kValidationLoose = 1e-6;
constexpr double kValidationStrict = 1e-8;
constexpr std::size_t kValidationStrictCount = 4;
constexpr double kValidationSeconds = 10.0;

constexpr std::size_t kOracleSpecs = 100;
constexpr double kSolutionTolerance = 1e-8;
constexpr double kBlockTolerance = 1e-10;
constexpr double kOracleSeconds = 30.0;

constexpr double kFactorTolerance = 1e-9;

constexpr std::size_t kGradientSpecs = 20;
constexpr std::size_t kGradientMaxT = 8;
constexpr double kGradientTolerance = 1e-5;
constexpr double kGradientSeconds = 60.0;

constexpr double kLorenzBand = 0.05;
constexpr double kLorenzSeconds = 30.0 * 60.0;

constexpr double kBandedSlopeMax = 1.3;
constexpr double kDenseSlopeMin = 2.3;

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

Outcome standalone_validation() {
  const auto start = Clock::now();
  const std::vector<ValidationRow> rows = run_validation(1000, 0.01);
  const double elapsed = seconds_since(start);
  bool all_loose = true;
  std::size_t strict = 0;
  double worst = 0.0;
  for (const ValidationRow& row : rows) {
    all_loose = all_loose && row.mse[0] < kValidationLoose;
    strict += row.mse[0] < kValidationStrict;
    worst = std::max(worst, row.mse[0]);
  }
  return {rows.size() == 6 && all_loose && strict >= kValidationStrictCount &&
              elapsed < kValidationSeconds,
          fmt("worst mse %.3e, %zu/6 below 1e-8, %.2fs", worst, strict, elapsed)};
}

// Criteria 2 and 3 share one suite of random specs.
struct OracleSuite {
  double worst_solution = 0.0;
  double worst_blocks = 0.0;
  double worst_factor = 0.0;
  double seconds = 0.0;
};

OracleSuite run_oracle_suite() {
  OracleSuite out;
  const auto start = Clock::now();
  for (const OdeSpec& spec : fixtures::random_specs(kOracleSpecs, 2024)) {
    const BlockSystem sys = assemble_blocks(spec);
    const ForwardResult banded = solve_forward(sys);
    const DenseSystem dense_sys = assemble_dense(spec);
    const Solution dense = solve_dense(dense_sys);

    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dense.values.size(); ++i) {
      diff = std::max(diff, std::abs(banded.solution.values[i] - dense.values[i]));
      scale = std::max(scale, std::abs(dense.values[i]));
    }
    out.worst_solution = std::max(out.worst_solution, scale > 0.0 ? diff / scale : diff);

    const Eigen::MatrixXd normal = dense_sys.normal_matrix();
    const Eigen::MatrixXd blocks = oracle::dense_blocks(sys);
    out.worst_blocks = std::max(out.worst_blocks, (blocks - normal).norm() / normal.norm());

    const Matrix full = expand_to_full(sys);
    const Matrix rebuilt = reconstruct(banded.factorization);
    out.worst_factor = std::max(out.worst_factor, norm_inf(rebuilt - full) / norm_inf(full));
  }
  out.seconds = seconds_since(start);
  return out;
}

Outcome oracle_equivalence(const OracleSuite& s) {
  return {s.worst_solution <= kSolutionTolerance && s.worst_blocks <= kBlockTolerance &&
              s.seconds < kOracleSeconds,
          fmt("solution rel inf %.3e, blocks rel frob %.3e, %.2fs", s.worst_solution,
              s.worst_blocks, s.seconds)};
}

Outcome factorization_property(const OracleSuite& s) {
  return {s.worst_factor <= kFactorTolerance,
          fmt("|PLL'P' - M|inf / |M|inf worst %.3e", s.worst_factor)};
}

Outcome gradient_suite() {
  RandomSpecLimits limits;
  limits.max_time_points = kGradientMaxT;
  const auto start = Clock::now();
  double worst = 0.0;
  std::uint64_t seed = 0;
  for (const OdeSpec& spec : fixtures::random_specs(kGradientSpecs, 606, limits)) {
    const std::vector<double> target = fixtures::random_target(spec.dims.unknowns(), seed++);
    const BlockSystem sys = assemble_blocks(spec);
    const ForwardResult fwd = solve_forward(sys);
    std::vector<double> dl_dy(target.size());
    for (std::size_t i = 0; i < dl_dy.size(); ++i) dl_dy[i] = fwd.solution.values[i] - target[i];
    const GradientBundle g = solve_backward(fwd.factorization, dl_dy);
    const SpecGradients chained = chain_to_spec(spec, sys, g);

    const oracle::BlockGradientsFd block_fd = oracle::block_gradients_fd(sys, target);
    const oracle::SpecGradientsFd spec_fd = oracle::spec_gradients_fd(spec, target);

    worst = std::max(worst, oracle::relative_error(g.d_rhs, block_fd.rhs));
    const std::size_t b = spec.dims.block_size();
    std::vector<double> m_analytic, m_fd, n_analytic, n_fd;
    for (std::size_t t = 0; t < g.d_diagonal.size(); ++t)
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          m_analytic.push_back(i == j ? g.d_diagonal[t](i, i)
                                      : g.d_diagonal[t](i, j) + g.d_diagonal[t](j, i));
          m_fd.push_back(block_fd.diagonal_pairs[t](i, j));
        }
    for (std::size_t t = 0; t < g.d_subdiagonal.size(); ++t)
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) {
          n_analytic.push_back(g.d_subdiagonal[t](i, j));
          n_fd.push_back(block_fd.subdiagonal[t](i, j));
        }
    worst = std::max(worst, oracle::relative_error(m_analytic, m_fd));
    worst = std::max(worst, oracle::relative_error(n_analytic, n_fd));
    worst = std::max(worst, oracle::relative_error(chained.coefficients, spec_fd.coefficients));
    worst = std::max(worst, oracle::relative_error(chained.constants, spec_fd.constants));
    worst = std::max(worst, oracle::relative_error(chained.initial_values, spec_fd.initial_values));
  }
  const double elapsed = seconds_since(start);
  return {worst <= kGradientTolerance && elapsed < kGradientSeconds,
          fmt("worst relative error %.3e over beta, M, N, c, d, u; %.2fs", worst, elapsed)};
}

Outcome lorenz_discovery() {
  const LorenzConfig cfg;  // defaults, seed 0
  const auto start = Clock::now();
  const DiscoveryResult result = discover_lorenz(cfg);
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  std::string coefficients;
  for (std::size_t i = 0; i < kLorenzTruth.size(); ++i) {
    worst = std::max(worst, std::abs(result.best[i] - kLorenzTruth[i]));
    coefficients += fmt("%s%.4f", i == 0 ? "" : " ", result.best[i]);
  }
  return {worst <= kLorenzBand && elapsed <= kLorenzSeconds,
          fmt("max |a - truth| %.4f, a = (%s), batch %zu, %.1fs on %zu thread(s)", worst,
              coefficients.c_str(), cfg.batch, elapsed, thread_count())};
}

Outcome scaling() {
  const std::vector<BenchCase> cases = scaling_preset();
  const std::vector<BenchResult> results = run_bench(cases);
  const double banded = time_slope(results, SolverKind::kBanded);
  const double dense = time_slope(results, SolverKind::kDense);

  // Retained bytes: doubling T must add exactly T (2 B^2 + B) doubles.
  bool linear = true;
  for (const BenchResult& r : results) {
    if (r.bench_case.solver != SolverKind::kBanded) continue;
    const Dimensions d = r.bench_case.dims();
    const std::size_t b = d.block_size();
    const std::size_t t = d.time_points;
    const std::size_t expected = ((2 * t - 1) * b * b + t * b) * sizeof(double) * r.bench_case.batch;
    linear = linear && r.retained_bytes == expected;
  }
  bool residuals = true;
  for (const BenchResult& r : results) residuals = residuals && r.residual <= kBenchResidualLimit;

  return {banded <= kBandedSlopeMax && dense >= kDenseSlopeMin && linear && residuals,
          fmt("banded slope %.3f, dense slope %.3f, bytes %s, residuals %s", banded, dense,
              linear ? "linear" : "NOT linear", residuals ? "ok" : "too large")};
}

Outcome degenerate_inputs() {
  bool single_point = false;
  {
    Dimensions d{1, 2, 1, 1, 1, 1};
    OdeSpec spec = OdeSpec::zeros(d);
    spec.coefficients = {1.0, 0.0, 1.0, 0.0};
    spec.constants = {3.0};
    spec.initial_values = {1.0, 0.5, 2.0, -1.0};
    const Solution y = solve_forward(assemble_blocks(spec)).solution;
    const std::vector<double> ref = oracle::qr_solution(spec);
    double diff = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) diff = std::max(diff, std::abs(y.values[i] - ref[i]));
    single_point = diff < 1e-12;
  }

  bool names_block = false;
  {
    OdeSpec spec = fixtures::toy_spec();
    spec.dims.time_points = 5;
    spec.coefficients.assign(5, 1.0);
    spec.constants.assign(5, 1.0);
    spec.steps.assign(4, 0.1);
    BlockSystem sys = assemble_blocks(spec);
    sys.diagonal[3](0, 0) = -2.0;
    try {
      decompose(sys);
    } catch (const NotPositiveDefinite& e) {
      names_block = e.block() == 3 && std::string(e.what()).find("block index 3") != std::string::npos;
    }
  }
  return {single_point && names_block,
          fmt("T=1 solve %s, NotPositiveDefinite names block %s", single_point ? "ok" : "wrong",
              names_block ? "ok" : "wrong")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };

  OracleSuite suite;
  bool suite_ready = false;
  auto shared_suite = [&]() -> const OracleSuite& {
    if (!suite_ready) {
      suite = run_oracle_suite();
      suite_ready = true;
    }
    return suite;
  };

  const std::vector<Criterion> criteria{
      {1, "standalone validation", standalone_validation},
      {2, "oracle equivalence", [&] { return oracle_equivalence(shared_suite()); }},
      {3, "factorization property", [&] { return factorization_property(shared_suite()); }},
      {4, "gradient suite", gradient_suite},
      {5, "lorenz discovery", lorenz_discovery},
      {6, "scaling", scaling},
      {7, "degenerate inputs", degenerate_inputs},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.passed;
    std::printf("%s [%d] %s: %s\n", outcome.passed ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
