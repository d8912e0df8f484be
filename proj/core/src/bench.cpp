#include "mechband/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>

#include "mechband/banded_solver.hpp"
#include "mechband/block_assembly.hpp"
#include "mechband/dense_oracle.hpp"
#include "mechband/errors.hpp"
#include "mechband/random_spec.hpp"

namespace mechband {

std::string to_string(SolverKind kind) {
  return kind == SolverKind::kBanded ? "banded" : "dense";
}

Dimensions BenchCase::dims() const {
  Dimensions d;
  d.time_points = time_points;
  d.variables = variables;
  d.equations = equations;
  d.order = order;
  d.init_time_points = 1;
  d.init_order = order;
  return d;
}

std::size_t bench_working_bytes(const BenchCase& c) {
  const Dimensions d = c.dims();
  if (c.solver == SolverKind::kDense) return dense_retained_bytes(d) * c.batch;
  // Block system, factorization and gradient bundle are alive together.
  return 3 * banded_retained_bytes(d) * c.batch;
}

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

template <typename Fn>
double median_time(const BenchCase& c, Fn&& run) {
  for (std::size_t i = 0; i < c.warmup; ++i) run();
  std::vector<double> samples;
  samples.reserve(c.repeats);
  for (std::size_t i = 0; i < c.repeats; ++i) {
    const auto start = Clock::now();
    run();
    samples.push_back(std::chrono::duration<double>(Clock::now() - start).count());
  }
  return median(std::move(samples));
}

// Steps are kept away from zero so the smoothness rows stay well scaled.
RandomSpecLimits bench_limits() {
  RandomSpecLimits limits;
  limits.min_step = 0.05;
  limits.max_step = 0.5;
  return limits;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

double relative_residual(double residual, double matrix_norm, double y_norm, double rhs_norm) {
  const double scale = matrix_norm * y_norm + rhs_norm;
  return scale > 0.0 ? residual / scale : residual;
}

BenchResult run_banded(const BenchCase& c, std::mt19937_64& rng, const BenchOptions& options) {
  const Dimensions d = c.dims();
  std::vector<BlockSystem> systems;
  std::vector<std::vector<double>> dl_dy;
  systems.reserve(c.batch);
  dl_dy.reserve(c.batch);
  for (std::size_t b = 0; b < c.batch; ++b) {
    systems.push_back(assemble_blocks(random_spec(d, rng, bench_limits())));
    dl_dy.push_back(random_vector(d.unknowns(), rng));
  }

  SolverOptions solver;
  solver.workers = options.parallel ? 0 : 1;
  std::vector<ForwardResult> forward;
  auto run = [&] {
    forward = solve_forward(std::span<const BlockSystem>(systems), solver);
    std::vector<Factorization> factors;
    factors.reserve(forward.size());
    for (ForwardResult& f : forward) factors.push_back(std::move(f.factorization));
    const std::vector<GradientBundle> grads = solve_backward(
        std::span<const Factorization>(factors), std::span<const std::vector<double>>(dl_dy),
        solver);
    for (std::size_t b = 0; b < factors.size(); ++b)
      forward[b].factorization = std::move(factors[b]);
  };

  BenchResult result{c};
  result.median_seconds = median_time(c, run);
  result.retained_bytes = banded_retained_bytes(d) * c.batch;
  for (std::size_t b = 0; b < c.batch; ++b) {
    const std::vector<double>& y = forward[b].solution.values;
    std::vector<double> r = multiply(systems[b], y);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= systems[b].rhs[i];
    double matrix_norm = 0.0;
    for (std::size_t t = 0; t < d.time_points; ++t) {
      // Row sums of the block row t: M_t plus the neighbouring couplings.
      for (std::size_t i = 0; i < d.block_size(); ++i) {
        double row = 0.0;
        for (double x : systems[b].diagonal[t].row(i)) row += std::abs(x);
        if (t > 0)
          for (double x : systems[b].subdiagonal[t - 1].row(i)) row += std::abs(x);
        if (t + 1 < d.time_points)
          for (std::size_t k = 0; k < d.block_size(); ++k)
            row += std::abs(systems[b].subdiagonal[t](k, i));
        matrix_norm = std::max(matrix_norm, row);
      }
    }
    result.residual = std::max(
        result.residual,
        relative_residual(norm_inf(r), matrix_norm, norm_inf(y), norm_inf(systems[b].rhs)));
  }
  return result;
}

BenchResult run_dense(const BenchCase& c, std::mt19937_64& rng) {
  const Dimensions d = c.dims();
  std::vector<DenseSystem> systems;
  std::vector<std::vector<double>> dl_dy;
  systems.reserve(c.batch);
  dl_dy.reserve(c.batch);
  for (std::size_t b = 0; b < c.batch; ++b) {
    systems.push_back(assemble_dense(random_spec(d, rng, bench_limits())));
    dl_dy.push_back(random_vector(d.unknowns(), rng));
  }

  std::vector<Solution> solutions(c.batch);
  auto run = [&] {
    for (std::size_t b = 0; b < c.batch; ++b)
      solutions[b] = solve_dense_with_gradient(systems[b], dl_dy[b]).solution;
  };

  BenchResult result{c};
  result.median_seconds = median_time(c, run);
  result.retained_bytes = dense_retained_bytes(d) * c.batch;
  for (std::size_t b = 0; b < c.batch; ++b) {
    const Eigen::MatrixXd normal = systems[b].normal_matrix();
    const Eigen::VectorXd rhs = systems[b].normal_rhs();
    const Eigen::Map<const Eigen::VectorXd> y(solutions[b].values.data(),
                                              static_cast<Eigen::Index>(d.unknowns()));
    const double residual = (normal * y - rhs).lpNorm<Eigen::Infinity>();
    const double matrix_norm = normal.cwiseAbs().rowwise().sum().maxCoeff();
    result.residual =
        std::max(result.residual, relative_residual(residual, matrix_norm,
                                                    y.lpNorm<Eigen::Infinity>(),
                                                    rhs.lpNorm<Eigen::Infinity>()));
  }
  return result;
}

void check_case(const BenchCase& c) {
  if (c.repeats < 3) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 3");
  if (c.batch < 1) throw Error(ErrorCode::kInvalidArgument, "batch must be >= 1");
  const Dimensions d = c.dims();
  if (c.solver == SolverKind::kDense && d.unknowns() > kDenseOracleMaxUnknowns) {
    throw Error(ErrorCode::kOracleTooLarge,
                "dense case with n = " + std::to_string(d.unknowns()) + " exceeds " +
                    std::to_string(kDenseOracleMaxUnknowns));
  }
}

}  // namespace

std::vector<BenchResult> run_bench(std::span<const BenchCase> cases, const BenchOptions& options) {
  for (const BenchCase& c : cases) check_case(c);

  std::vector<BenchResult> results;
  results.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const BenchCase& c = cases[i];
    if (bench_working_bytes(c) > options.memory_budget_bytes) {
      BenchResult skipped{c};
      skipped.median_seconds = std::numeric_limits<double>::quiet_NaN();
      skipped.residual = std::numeric_limits<double>::quiet_NaN();
      skipped.retained_bytes = c.solver == SolverKind::kBanded
                                   ? banded_retained_bytes(c.dims()) * c.batch
                                   : dense_retained_bytes(c.dims()) * c.batch;
      skipped.skipped = true;
      results.push_back(skipped);
      continue;
    }
    // Each case gets its own stream so results do not depend on case order.
    std::mt19937_64 rng(options.seed + i);
    results.push_back(c.solver == SolverKind::kBanded ? run_banded(c, rng, options)
                                                      : run_dense(c, rng));
  }
  return results;
}

std::vector<BenchCase> lorenz_preset() {
  std::vector<BenchCase> cases;
  for (SolverKind solver : {SolverKind::kBanded, SolverKind::kDense}) {
    for (std::size_t batch : {64, 512, 4096}) {
      for (std::size_t t : {5, 50, 500}) {
        BenchCase c;
        c.solver = solver;
        c.time_points = t;
        c.batch = batch;
        cases.push_back(c);
      }
    }
  }
  return cases;
}

std::vector<BenchCase> scaling_preset() {
  std::vector<BenchCase> cases;
  for (std::size_t t : {64, 128, 256, 512, 1024}) {
    BenchCase c;
    c.time_points = t;
    c.batch = 8;
    cases.push_back(c);
  }
  for (std::size_t t : {8, 16, 32, 64}) {
    BenchCase c;
    c.solver = SolverKind::kDense;
    c.time_points = t;
    c.batch = 8;
    cases.push_back(c);
  }
  return cases;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "slope needs positive values");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double time_slope(std::span<const BenchResult> results, SolverKind solver) {
  std::vector<double> t;
  std::vector<double> seconds;
  for (const BenchResult& r : results) {
    if (r.skipped || r.bench_case.solver != solver) continue;
    t.push_back(static_cast<double>(r.bench_case.time_points));
    seconds.push_back(r.median_seconds);
  }
  if (t.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return loglog_slope(t, seconds);
}

void write_bench_csv(std::ostream& out, std::span<const BenchResult> results) {
  const auto old_precision = out.precision(17);
  out << "solver,T,batch,V,R,Q,median_seconds,retained_bytes,residual\n";
  for (const BenchResult& r : results) {
    const BenchCase& c = r.bench_case;
    out << to_string(c.solver) << ',' << c.time_points << ',' << c.batch << ',' << c.variables
        << ',' << c.order << ',' << c.equations << ',';
    if (r.skipped) {
      out << "skipped," << r.retained_bytes << ",skipped\n";
    } else {
      out << r.median_seconds << ',' << r.retained_bytes << ',' << r.residual << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace mechband
