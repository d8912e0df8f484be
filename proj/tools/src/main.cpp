#include <iostream>

#include <CLI11.hpp>

#include "mechband_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace mechband::cli;

  CLI::App app{"Banded least-squares ODE solver and experiments"};
  app.require_subcommand(1);

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a spec file and write the trajectory");
  solve_cmd->add_option("--spec", solve.spec, "Spec JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", solve.out, "Trajectory CSV")->required();
  solve_cmd->add_flag("--grad-check", solve.grad_check,
                      "Compare analytic gradients with finite differences");
  solve_cmd->add_option("--seed", solve.seed, "Seed of the gradient-check target");

  ValidateArgs validate;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Compare against the closed-form ODE suite");
  validate_cmd->add_option("--steps", validate.steps, "Grid points")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--dt", validate.dt, "Step size")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--out", validate.out, "Per-ODE MSE CSV");

  DiscoverArgs discover;
  CLI::App* discover_cmd =
      app.add_subcommand("discover-lorenz", "Recover the Lorenz coefficients from data");
  discover_cmd->add_option("--seed", discover.seed, "Seed of all randomness");
  discover_cmd->add_option("--steps", discover.steps, "Optimizer steps");
  discover_cmd->add_option("--batch", discover.batch, "Windows per step")
      ->check(CLI::PositiveNumber);
  discover_cmd->add_option("--out", discover.out, "Output directory");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time banded and dense solvers");
  bench_cmd->add_option("--preset", bench.preset, "Case grid")
      ->check(CLI::IsMember({"lorenz", "scaling"}));
  bench_cmd->add_option("--out", bench.out, "Results CSV");
  bench_cmd->add_option("--seed", bench.seed, "Seed of the random specs");
  bench_cmd->add_flag("--parallel", bench.parallel, "Time batch-parallel solves");
  bench_cmd->add_option("--memory-budget-gib", bench.memory_budget_gib,
                        "Skip cases estimated above this working set")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  if (*solve_cmd) return cmd_solve(solve, std::cout, std::cerr);
  if (*validate_cmd) return cmd_validate(validate, std::cout, std::cerr);
  if (*discover_cmd) return cmd_discover_lorenz(discover, std::cout, std::cerr);
  return cmd_bench(bench, std::cout, std::cerr);
}
