#include "mechband/gradient_chain.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mechband/errors.hpp"

namespace mechband {

std::vector<double> chain_to_constants(const OdeSpec& spec, std::span<const double> d_rhs) {
  const Dimensions& d = spec.dims;
  if (d_rhs.size() != d.unknowns()) {
    throw Error(ErrorCode::kShapeMismatch, "dl/dbeta does not match the spec");
  }
  const std::size_t B = d.block_size();
  const std::size_t K = d.orders();
  const double wg2 = spec.weights.governing * spec.weights.governing;
  std::vector<double> out(spec.constants.size(), 0.0);
  for (std::size_t t = 0; t < d.time_points; ++t) {
    for (std::size_t q = 0; q < d.equations; ++q) {
      double dd = 0.0;
      for (std::size_t i = 0; i < B; ++i)
        dd += spec.coefficient(t, q, i / K, i % K) * d_rhs[t * B + i];
      out[spec.constant_index(t, q)] = wg2 * dd;
    }
  }
  return out;
}

SpecGradients chain_to_spec(const OdeSpec& spec, const BlockSystem& system,
                            const GradientBundle& gradients) {
  const Dimensions& d = spec.dims;
  if (!(system.dims == d) || gradients.d_diagonal.size() != d.time_points ||
      gradients.d_rhs.size() != d.unknowns()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient bundle does not match the spec");
  }
  const std::size_t B = d.block_size();
  const std::size_t K = d.orders();
  const double wg2 = spec.weights.governing * spec.weights.governing;
  const double wi2 = spec.weights.initial * spec.weights.initial;

  SpecGradients out;
  out.dims = d;
  out.coefficients.assign(spec.coefficients.size(), 0.0);
  out.constants = chain_to_constants(spec, gradients.d_rhs);
  out.initial_values.assign(spec.initial_values.size(), 0.0);

  for (std::size_t t = 0; t < d.time_points; ++t) {
    const std::span<const double> dbeta =
        std::span<const double>(gradients.d_rhs).subspan(t * B, B);
    const Matrix& g = gradients.d_diagonal[t];

    for (std::size_t q = 0; q < d.equations; ++q) {
      const double dq = spec.constant(t, q);
      for (std::size_t j = 0; j < B; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < B; ++i) {
          acc += spec.coefficient(t, q, i / K, i % K) * (g(i, j) + g(j, i));
        }
        out.coefficients[spec.coefficient_index(t, q, j / K, j % K)] =
            wg2 * (acc + dq * dbeta[j]);
      }
    }

    if (t < d.init_time_points) {
      for (std::size_t v = 0; v < d.variables; ++v)
        for (std::size_t r = 0; r <= d.init_order; ++r)
          out.initial_values[spec.initial_index(t, v, r)] = wi2 * dbeta[v * K + r];
    }
  }
  return out;
}

std::vector<double> gradient_steps_fd(const OdeSpec& spec, const LossFunction& loss) {
  validate_spec(spec);
  auto evaluate = [&](const OdeSpec& s) {
    return loss(solve_forward(assemble_blocks(s)).solution);
  };

  std::vector<double> grad(spec.steps.size(), 0.0);
  OdeSpec probe = spec;
  for (std::size_t t = 0; t < spec.steps.size(); ++t) {
    const double s = spec.steps[t];
    double h = std::max(1e-4 * s, 1e-6);
    while (s - h <= 0.0) {
      h *= 0.5;
      if (h == 0.0) {
        throw Error(ErrorCode::kNonPositiveStep,
                    "no positive perturbation fits below s[" + std::to_string(t) + "]");
      }
    }
    probe.steps[t] = s + h;
    const double up = evaluate(probe);
    probe.steps[t] = s - h;
    const double down = evaluate(probe);
    probe.steps[t] = s;
    grad[t] = (up - down) / (2.0 * h);
  }
  return grad;
}

double GradientCheckReport::max() const {
  return std::max({rhs, diagonal, subdiagonal, coefficients, constants, initial_values});
}

namespace {

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return scale < 1e-12 ? diff : diff / scale;
}

// Central difference extrapolated from steps h and h/2, accurate to O(h^4).
// `at(x)` evaluates the loss with the probed entry set to x.
template <typename Eval>
double extrapolated_difference(const Eval& at, double base, double h) {
  const double wide = (at(base + h) - at(base - h)) / (2.0 * h);
  const double narrow = (at(base + h / 2.0) - at(base - h / 2.0)) / h;
  return (4.0 * narrow - wide) / 3.0;
}

double half_squared_distance(std::span<const double> y, std::span<const double> target) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += 0.5 * (y[i] - target[i]) * (y[i] - target[i]);
  return acc;
}

}  // namespace

GradientCheckReport check_gradients(const OdeSpec& spec, std::uint64_t seed) {
  const BlockSystem system = assemble_blocks(spec);
  const ForwardResult forward = solve_forward(system);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> target(system.dims.unknowns());
  for (double& x : target) x = normal(rng);

  std::vector<double> dl_dy(target.size());
  for (std::size_t i = 0; i < dl_dy.size(); ++i) dl_dy[i] = forward.solution.values[i] - target[i];
  const GradientBundle bundle = solve_backward(forward.factorization, dl_dy);
  const SpecGradients chained = chain_to_spec(spec, system, bundle);

  auto loss_of_system = [&](const BlockSystem& s) {
    return half_squared_distance(solve_forward(s).solution.values, target);
  };
  auto loss_of_spec = [&](const OdeSpec& s) { return loss_of_system(assemble_blocks(s)); };

  GradientCheckReport report;

  {
    std::vector<double> fd(system.rhs.size());
    std::vector<double> probe = system.rhs;
    for (std::size_t j = 0; j < fd.size(); ++j) {
      auto at = [&](double x) {
        probe[j] = x;
        return half_squared_distance(substitute(forward.factorization, probe), target);
      };
      fd[j] = extrapolated_difference(at, system.rhs[j], 1e-6);
      probe[j] = system.rhs[j];
    }
    report.rhs = relative_error(bundle.d_rhs, fd);
  }

  {
    // Diagonal blocks are symmetric, so off-diagonal entries are perturbed in
    // pairs and compared against G(i,j) + G(j,i).
    std::vector<double> analytic;
    std::vector<double> fd;
    BlockSystem probe = system;
    for (std::size_t t = 0; t < system.diagonal.size(); ++t) {
      const Matrix& g = bundle.d_diagonal[t];
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          const double base = system.diagonal[t](i, j);
          const double h = 1e-6 * (1.0 + std::abs(base));
          auto at = [&](double value) {
            probe.diagonal[t](i, j) = value;
            probe.diagonal[t](j, i) = value;
            return loss_of_system(probe);
          };
          fd.push_back(extrapolated_difference(at, base, h));
          probe.diagonal[t](i, j) = base;
          probe.diagonal[t](j, i) = base;
          analytic.push_back(i == j ? g(i, i) : g(i, j) + g(j, i));
        }
      }
    }
    report.diagonal = relative_error(analytic, fd);
  }

  if (!system.subdiagonal.empty()) {
    std::vector<double> analytic;
    std::vector<double> fd;
    BlockSystem probe = system;
    for (std::size_t t = 0; t < system.subdiagonal.size(); ++t) {
      const Matrix& g = bundle.d_subdiagonal[t];
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
          const double base = system.subdiagonal[t](i, j);
          const double h = 1e-6 * (1.0 + std::abs(base));
          auto at = [&](double value) {
            probe.subdiagonal[t](i, j) = value;
            return loss_of_system(probe);
          };
          fd.push_back(extrapolated_difference(at, base, h));
          probe.subdiagonal[t](i, j) = base;
          analytic.push_back(g(i, j));
        }
      }
    }
    report.subdiagonal = relative_error(analytic, fd);
  }

  auto spec_fd = [&](std::vector<double> OdeSpec::*field) {
    OdeSpec probe = spec;
    std::vector<double>& values = probe.*field;
    std::vector<double> fd(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double base = values[k];
      const double h = 1e-6 * (1.0 + std::abs(base));
      auto at = [&](double value) {
        values[k] = value;
        return loss_of_spec(probe);
      };
      fd[k] = extrapolated_difference(at, base, h);
      values[k] = base;
    }
    return fd;
  };
  report.coefficients = relative_error(chained.coefficients, spec_fd(&OdeSpec::coefficients));
  report.constants = relative_error(chained.constants, spec_fd(&OdeSpec::constants));
  report.initial_values =
      relative_error(chained.initial_values, spec_fd(&OdeSpec::initial_values));
  return report;
}

}  // namespace mechband
