#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mechband/ode_spec.hpp"

namespace mechband {

/// Highest derivative order used when solving the closed-form suite. Every
/// ODE in the suite is at most third order; solving with R = 3 keeps the
/// Taylor smoothness rows accurate enough and makes y, y', y'' available.
inline constexpr std::size_t kValidationSolverOrder = 3;

/// A constant-coefficient linear ODE
///   sum_r lhs[r] * y^(r) = rhs
/// together with its closed-form solution.
struct ClosedFormOde {
  std::string name;
  std::vector<double> constants;       // c0, c1, c2 as applicable
  std::vector<double> initial_values;  // y(0), y'(0), ...
  std::vector<double> lhs;             // coefficient of y^(r), r = 0..order
  double rhs = 0.0;
  // Exact y, y', y'', y''' at time t.
  std::function<std::array<double, 4>(double)> exact;

  std::size_t ode_order() const noexcept { return lhs.size() - 1; }

  /// Uniform grid of `time_points` points spaced `step` apart, solved with
  /// derivative order max(solver_order, ode_order()).
  OdeSpec build_spec(std::size_t time_points, double step,
                     std::size_t solver_order = kValidationSolverOrder,
                     const Weights& weights = {}) const;
};

/// RC circuit, population growth, language death, harmonic oscillator,
/// damped harmonic oscillator and a third-order ODE, in that order.
std::vector<ClosedFormOde> closed_form_suite();

inline constexpr double kValidationThreshold = 1e-6;
inline constexpr double kValidationStrictThreshold = 1e-8;

struct ValidationRow {
  std::string name;
  // MSE of y, y' and y'' against the closed form.
  std::array<double, 3> mse{};
  bool passed = false;  // mse[0] < kValidationThreshold
};

std::vector<ValidationRow> run_validation(std::size_t steps = 1000, double dt = 0.01,
                                          std::size_t solver_order = kValidationSolverOrder);

}  // namespace mechband
