#include "mechband/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mechband/banded_solver.hpp"
#include "mechband/block_assembly.hpp"

namespace mechband {

namespace {

using Complex = std::complex<double>;

// y(t) = offset + sum_k Re(amplitude_k * exp(rate_k * t)); derivatives follow
// by multiplying each mode by its rate.
struct ModalSolution {
  double offset = 0.0;
  std::vector<std::pair<Complex, Complex>> modes;  // (amplitude, rate)

  std::array<double, 4> operator()(double t) const {
    std::array<double, 4> out{offset, 0.0, 0.0, 0.0};
    for (const auto& [amplitude, rate] : modes) {
      Complex term = amplitude * std::exp(rate * t);
      for (double& derivative : out) {
        derivative += term.real();
        term *= rate;
      }
    }
    return out;
  }
};

ClosedFormOde rc_circuit() {
  const double c0 = 0.7, c1 = 1.2, c2 = 2.31, u0 = 10.0;
  ModalSolution exact{c0 * c1, {{Complex(u0 - c0 * c1), Complex(-1.0 / (c1 * c2))}}};
  return {"rc_circuit", {c0, c1, c2}, {u0}, {1.0 / c1, c2}, c0, exact};
}

ClosedFormOde population_growth() {
  const double c0 = 0.23, u0 = 4.78;
  ModalSolution exact{0.0, {{Complex(u0), Complex(c0)}}};
  return {"population_growth", {c0}, {u0}, {c0, -1.0}, 0.0, exact};
}

ClosedFormOde language_death() {
  const double c0 = 0.32, c1 = 0.28, u0 = 0.14;
  const double steady = c0 / (c0 + c1);
  ModalSolution exact{steady, {{Complex(u0 - steady), Complex(-(c0 + c1))}}};
  return {"language_death", {c0, c1}, {u0}, {c0 + c1, 1.0}, c0, exact};
}

ClosedFormOde harmonic_oscillator() {
  const double c0 = 2.1, u0 = 0.4, u1 = -0.03;
  const double omega = std::sqrt(c0);
  ModalSolution exact{0.0, {{Complex(u0, -u1 / omega), Complex(0.0, omega)}}};
  return {"harmonic_oscillator", {c0}, {u0, u1}, {c0, 0.0, 1.0}, 0.0, exact};
}

ClosedFormOde damped_harmonic_oscillator() {
  const double c0 = 4.5, c1 = 0.43, u0 = 0.12, u1 = 0.043;
  const double w = std::sqrt(4.0 * c0 - c1 * c1);
  ModalSolution exact{
      0.0, {{Complex(u0, -(c1 * u0 + 2.0 * u1) / w), Complex(-c1 / 2.0, w / 2.0)}}};
  return {"damped_harmonic_oscillator", {c0, c1}, {u0, u1}, {c0, c1, 1.0}, 0.0, exact};
}

ClosedFormOde third_order() {
  const double u0 = 0.0, u1 = -1.0, u2 = 1.0;
  const double root3 = std::sqrt(3.0);
  ModalSolution exact{u0 + u1 + u2,
                      {{Complex(-(u1 + u2), -(root3 / 3.0) * (u1 - u2)),
                        Complex(-0.5, root3 / 2.0)}}};
  return {"third_order", {}, {u0, u1, u2}, {0.0, 1.0, 1.0, 1.0}, 0.0, exact};
}

}  // namespace

OdeSpec ClosedFormOde::build_spec(std::size_t time_points, double step,
                                  std::size_t solver_order, const Weights& weights) const {
  Dimensions d;
  d.time_points = time_points;
  d.variables = 1;
  d.equations = 1;
  d.order = std::max(solver_order, ode_order());
  d.init_time_points = 1;
  d.init_order = initial_values.size() - 1;

  OdeSpec spec = OdeSpec::zeros(d);
  for (std::size_t t = 0; t < time_points; ++t) {
    for (std::size_t r = 0; r < lhs.size(); ++r) spec.coefficient(t, 0, 0, r) = lhs[r];
    spec.constant(t, 0) = rhs;
  }
  for (std::size_t r = 0; r < initial_values.size(); ++r)
    spec.initial_value(0, 0, r) = initial_values[r];
  std::fill(spec.steps.begin(), spec.steps.end(), step);
  spec.weights = weights;
  return spec;
}

std::vector<ClosedFormOde> closed_form_suite() {
  return {rc_circuit(),          population_growth(),          language_death(),
          harmonic_oscillator(), damped_harmonic_oscillator(), third_order()};
}

std::vector<ValidationRow> run_validation(std::size_t steps, double dt,
                                          std::size_t solver_order) {
  std::vector<ValidationRow> rows;
  for (const ClosedFormOde& ode : closed_form_suite()) {
    const OdeSpec spec = ode.build_spec(steps, dt, solver_order);
    const Solution y = solve_forward(assemble_blocks(spec)).solution;
    const std::vector<double> times = time_grid(spec);

    ValidationRow row{ode.name, {}, false};
    const std::size_t available = std::min<std::size_t>(3, spec.dims.orders());
    for (std::size_t t = 0; t < times.size(); ++t) {
      const std::array<double, 4> truth = ode.exact(times[t]);
      for (std::size_t r = 0; r < available; ++r) {
        const double err = y(t, 0, r) - truth[r];
        row.mse[r] += err * err;
      }
    }
    for (std::size_t r = 0; r < 3; ++r) {
      row.mse[r] = r < available ? row.mse[r] / static_cast<double>(times.size())
                                 : std::nan("");
    }
    row.passed = row.mse[0] < kValidationThreshold;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mechband
