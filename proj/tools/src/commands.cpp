#include "mechband_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>

#include "mechband/banded_solver.hpp"
#include "mechband/bench.hpp"
#include "mechband/block_assembly.hpp"
#include "mechband/errors.hpp"
#include "mechband/experiments.hpp"
#include "mechband/gradient_chain.hpp"
#include "mechband/lorenz.hpp"
#include "mechband_cli/spec_io.hpp"

namespace mechband::cli {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  file.precision(17);
  return file;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kDiverged ? kExitDiverged : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

void write_coefficients(std::ostream& out, const char* label, const BasisCoefficients& a) {
  out << label;
  for (double x : a) out << ',' << x;
  out << '\n';
}

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const OdeSpec spec = read_spec_file(args.spec);
    const Solution y = solve_forward(assemble_blocks(spec)).solution;
    std::ofstream file = open_output(args.out);
    write_trajectory_csv(file, spec, y);
    out << "wrote " << spec.dims.unknowns() << " values to " << args.out.string() << '\n';

    if (!args.grad_check) return kExitOk;
    const GradientCheckReport report = check_gradients(spec, args.seed);
    out << std::setprecision(17);
    out << "grad-check rhs " << report.rhs << " diagonal " << report.diagonal
        << " subdiagonal " << report.subdiagonal << " c " << report.coefficients << " d "
        << report.constants << " u " << report.initial_values << '\n';
    out << "max relative error " << report.max() << '\n';
    if (report.max() > kGradCheckTolerance) {
      err << "gradient check above " << kGradCheckTolerance << '\n';
      return kExitThreshold;
    }
    return kExitOk;
  });
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<ValidationRow> rows = run_validation(args.steps, args.dt);
    std::ofstream file;
    if (args.out) {
      file = open_output(*args.out);
      file << "ode,mse_y,mse_dy,mse_d2y,passed\n";
    }
    bool all_passed = true;
    out << std::setprecision(17);
    for (const ValidationRow& row : rows) {
      all_passed = all_passed && row.passed;
      out << (row.passed ? "PASS " : "FAIL ") << row.name << " mse_y=" << row.mse[0]
          << " mse_dy=" << row.mse[1] << " mse_d2y=" << row.mse[2] << '\n';
      if (file.is_open()) {
        file << row.name << ',' << row.mse[0] << ',' << row.mse[1] << ',' << row.mse[2] << ','
             << (row.passed ? 1 : 0) << '\n';
      }
    }
    out << (all_passed ? "all below " : "some above ") << kValidationThreshold << '\n';
    return all_passed ? kExitOk : kExitThreshold;
  });
}

int cmd_discover_lorenz(const DiscoverArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    LorenzConfig cfg;
    cfg.seed = args.seed;
    if (args.steps) cfg.optimizer_steps = *args.steps;
    if (args.batch) cfg.batch = *args.batch;

    const std::size_t report_every = std::max<std::size_t>(1, cfg.optimizer_steps / 20);
    const DiscoveryResult result = discover_lorenz(cfg, [&](std::size_t step, double loss) {
      if (step % report_every == 0) out << "step " << step << " loss " << loss << '\n';
    });

    std::filesystem::create_directories(args.out);
    std::ofstream coefficients = open_output(args.out / "coefficients.csv");
    coefficients << "label,a1,a2,a3,a4,a5,a6,a7\n";
    write_coefficients(coefficients, "truth", kLorenzTruth);
    write_coefficients(coefficients, "initial", result.initial);
    write_coefficients(coefficients, "final", result.final_coefficients);
    write_coefficients(coefficients, "best", result.best);

    std::ofstream loss = open_output(args.out / "loss.csv");
    loss << "step,loss,loss_ema\n";
    for (std::size_t i = 0; i < result.loss.size(); ++i)
      loss << i << ',' << result.loss[i] << ',' << result.loss_ema[i] << '\n';

    out << std::setprecision(6) << std::fixed;
    out << "coef   truth        recovered\n";
    for (std::size_t i = 0; i < kLorenzTruth.size(); ++i) {
      out << 'a' << i + 1 << "  " << std::setw(11) << kLorenzTruth[i] << "  " << std::setw(11)
          << result.best[i] << '\n';
    }
    out << "best step " << result.best_step << '\n';
    out.unsetf(std::ios::fixed);
    return kExitOk;
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<BenchCase> cases;
    if (args.preset == "lorenz") {
      cases = lorenz_preset();
    } else if (args.preset == "scaling") {
      cases = scaling_preset();
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown preset " + args.preset);
    }

    BenchOptions options;
    options.seed = args.seed;
    options.parallel = args.parallel;
    options.memory_budget_bytes =
        static_cast<std::size_t>(args.memory_budget_gib * static_cast<double>(1ull << 30));
    const std::vector<BenchResult> results = run_bench(cases, options);

    if (args.out) {
      std::ofstream file = open_output(*args.out);
      write_bench_csv(file, results);
    } else {
      write_bench_csv(out, results);
    }

    out << std::setprecision(4);
    std::set<std::size_t> batches;
    for (const BenchResult& r : results) batches.insert(r.bench_case.batch);
    for (std::size_t batch : batches) {
      std::vector<BenchResult> group;
      for (const BenchResult& r : results)
        if (r.bench_case.batch == batch) group.push_back(r);
      for (SolverKind solver : {SolverKind::kBanded, SolverKind::kDense}) {
        const double slope = time_slope(group, solver);
        if (std::isnan(slope)) continue;
        out << to_string(solver) << " batch " << batch << " time slope vs T " << slope << '\n';
      }
    }
    for (const BenchResult& r : results) {
      if (!r.skipped && !(r.residual <= kBenchResidualLimit)) {
        err << to_string(r.bench_case.solver) << " T=" << r.bench_case.time_points
            << " residual " << r.residual << " above " << kBenchResidualLimit << '\n';
        return kExitError;
      }
    }
    return kExitOk;
  });
}

}  // namespace mechband::cli
