#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace mechband::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitThreshold = 2;
inline constexpr int kExitDiverged = 3;

inline constexpr double kGradCheckTolerance = 1e-5;

struct SolveArgs {
  std::filesystem::path spec;
  std::filesystem::path out;
  bool grad_check = false;
  std::uint64_t seed = 0;
};

struct ValidateArgs {
  std::size_t steps = 1000;
  double dt = 0.01;
  std::optional<std::filesystem::path> out;
};

struct DiscoverArgs {
  std::uint64_t seed = 0;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> batch;
  std::filesystem::path out = "lorenz_out";
};

struct BenchArgs {
  std::string preset = "scaling";
  std::optional<std::filesystem::path> out;
  std::uint64_t seed = 0;
  bool parallel = false;
  double memory_budget_gib = 4.0;
};

// Each command reports to `out`, errors to `err`, and returns an exit code.
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);
int cmd_discover_lorenz(const DiscoverArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mechband::cli
