#include "mechband/lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mechband/banded_solver.hpp"
#include "mechband/block_assembly.hpp"
#include "mechband/errors.hpp"
#include "mechband/gradient_chain.hpp"
#include "mechband/parallel.hpp"

namespace mechband {

void LorenzConfig::validate() const {
  if (window < 2) throw Error(ErrorCode::kInvalidArgument, "window must be >= 2");
  if (batch < 1) throw Error(ErrorCode::kInvalidArgument, "batch must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  if (n_steps + 1 < window) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory shorter than one window");
  }
}

LorenzState lorenz_derivative(const LorenzConfig& cfg, const LorenzState& s) {
  return {cfg.sigma * (s[1] - s[0]), s[0] * (cfg.rho - s[2]) - s[1],
          s[0] * s[1] - cfg.beta * s[2]};
}

std::vector<LorenzState> rk4_lorenz(const LorenzConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  std::vector<LorenzState> out;
  out.reserve(cfg.n_steps + 1);
  out.push_back(cfg.initial_state);

  const double h = cfg.dt;
  auto axpy = [](const LorenzState& x, double a, const LorenzState& k) {
    return LorenzState{x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2]};
  };
  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    const LorenzState& x = out.back();
    const LorenzState k1 = lorenz_derivative(cfg, x);
    const LorenzState k2 = lorenz_derivative(cfg, axpy(x, h / 2.0, k1));
    const LorenzState k3 = lorenz_derivative(cfg, axpy(x, h / 2.0, k2));
    const LorenzState k4 = lorenz_derivative(cfg, axpy(x, h, k3));
    LorenzState next;
    for (std::size_t i = 0; i < 3; ++i) {
      next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i])) {
        throw Error(ErrorCode::kNonFiniteState, "trajectory diverged at step " +
                                                    std::to_string(n + 1));
      }
    }
    out.push_back(next);
  }
  return out;
}

LorenzFeatures lorenz_basis(const LorenzState& s) {
  return {{s[0], s[1]}, {s[0], s[1], s[0] * s[2]}, {s[2], s[0] * s[1]}};
}

LorenzState lorenz_model(const BasisCoefficients& a, const LorenzState& state) {
  const LorenzFeatures f = lorenz_basis(state);
  return {a[0] * f.dx[0] + a[1] * f.dx[1],
          a[2] * f.dy[0] + a[3] * f.dy[1] + a[4] * f.dy[2],
          a[5] * f.dz[0] + a[6] * f.dz[1]};
}

OdeSpec lorenz_window_spec(const LorenzConfig& cfg, std::span<const LorenzState> window,
                           const BasisCoefficients& a) {
  Dimensions d;
  d.time_points = window.size();
  d.variables = 3;
  d.equations = 3;
  d.order = std::max<std::size_t>(cfg.order, 1);
  d.init_time_points = 1;
  d.init_order = 0;

  OdeSpec spec = OdeSpec::zeros(d);
  for (std::size_t t = 0; t < window.size(); ++t) {
    const LorenzState rhs = lorenz_model(a, window[t]);
    for (std::size_t q = 0; q < 3; ++q) {
      spec.coefficient(t, q, q, 1) = 1.0;
      spec.constant(t, q) = rhs[q];
    }
  }
  for (std::size_t v = 0; v < 3; ++v) spec.initial_value(0, v, 0) = window.front()[v];
  std::fill(spec.steps.begin(), spec.steps.end(), cfg.dt);
  spec.weights = cfg.weights;
  return spec;
}

StepLoss lorenz_batch_loss(const LorenzConfig& cfg, std::span<const LorenzState> trajectory,
                           std::span<const std::size_t> starts, const BasisCoefficients& a) {
  const std::size_t count = starts.size();
  std::vector<OdeSpec> specs(count);
  std::vector<BlockSystem> systems(count);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      specs[b] = lorenz_window_spec(cfg, trajectory.subspan(starts[b], cfg.window), a);
      systems[b] = assemble_blocks(specs[b]);
    }
  });

  std::vector<ForwardResult> forward = solve_forward(std::span<const BlockSystem>(systems));

  const double scale = 1.0 / static_cast<double>(count);
  std::vector<double> window_loss(count, 0.0);
  std::vector<std::vector<double>> dl_dy(count);
  const std::size_t spec_block = systems.front().dims.block_size();
  const std::size_t spec_orders = systems.front().dims.orders();
  std::vector<Factorization> factors;
  factors.reserve(count);
  for (std::size_t b = 0; b < count; ++b) {
    const Solution& y = forward[b].solution;
    dl_dy[b].assign(y.values.size(), 0.0);
    for (std::size_t t = 0; t < cfg.window; ++t) {
      const LorenzState& x = trajectory[starts[b] + t];
      for (std::size_t v = 0; v < 3; ++v) {
        const double residual = y(t, v, 0) - x[v];
        window_loss[b] += residual * residual;
        dl_dy[b][t * spec_block + v * spec_orders] = 2.0 * residual * scale;
      }
    }
    factors.push_back(std::move(forward[b].factorization));
  }

  // Only dd is needed, so the adjoint solve stops at dl/dbeta.
  const std::vector<std::vector<double>> d_rhs =
      substitute(std::span<const Factorization>(factors),
                 std::span<const std::vector<double>>(dl_dy));

  StepLoss out;
  for (std::size_t b = 0; b < count; ++b) {
    out.loss += window_loss[b] * scale;
    const std::vector<double> dd = chain_to_constants(specs[b], d_rhs[b]);
    for (std::size_t t = 0; t < cfg.window; ++t) {
      const LorenzFeatures f = lorenz_basis(trajectory[starts[b] + t]);
      const double ddx = dd[specs[b].constant_index(t, 0)];
      const double ddy = dd[specs[b].constant_index(t, 1)];
      const double ddz = dd[specs[b].constant_index(t, 2)];
      out.gradient[0] += ddx * f.dx[0];
      out.gradient[1] += ddx * f.dx[1];
      out.gradient[2] += ddy * f.dy[0];
      out.gradient[3] += ddy * f.dy[1];
      out.gradient[4] += ddy * f.dy[2];
      out.gradient[5] += ddz * f.dz[0];
      out.gradient[6] += ddz * f.dz[1];
    }
  }
  return out;
}

BasisCoefficients initial_coefficients(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  BasisCoefficients a{};
  for (double& x : a) x = normal(rng);
  return a;
}

DiscoveryResult discover_lorenz(const LorenzConfig& cfg, const DiscoveryProgress& progress) {
  cfg.validate();
  const std::vector<LorenzState> trajectory = rk4_lorenz(cfg);

  // One generator drives everything: initial coefficients first, then the
  // window starts of every step.
  std::mt19937_64 rng(cfg.seed);
  DiscoveryResult result;
  result.initial = initial_coefficients(rng());
  result.best = result.initial;
  result.final_coefficients = result.initial;

  std::uniform_int_distribution<std::size_t> start_dist(0, trajectory.size() - cfg.window);
  BasisCoefficients a = result.initial;
  BasisCoefficients first_moment{};
  BasisCoefficients second_moment{};
  double best_loss = std::numeric_limits<double>::infinity();
  double ema = 0.0;
  std::vector<std::size_t> starts(cfg.batch);

  for (std::size_t step = 0; step < cfg.optimizer_steps; ++step) {
    for (std::size_t& s : starts) s = start_dist(rng);
    const StepLoss eval = lorenz_batch_loss(cfg, trajectory, starts, a);
    if (!std::isfinite(eval.loss)) {
      throw Error(ErrorCode::kDiverged, "loss is not finite at step " + std::to_string(step));
    }

    ema = step == 0 ? eval.loss : 0.9 * ema + 0.1 * eval.loss;
    result.loss.push_back(eval.loss);
    result.loss_ema.push_back(ema);
    if (eval.loss < best_loss) {
      best_loss = eval.loss;
      result.best = a;
      result.best_step = step;
    }
    if (progress) progress(step, eval.loss);

    const double lr =
        step >= cfg.decay_step ? cfg.learning_rate * cfg.decay_factor : cfg.learning_rate;
    const double k = static_cast<double>(step + 1);
    const double bias1 = 1.0 - std::pow(cfg.adam_beta1, k);
    const double bias2 = 1.0 - std::pow(cfg.adam_beta2, k);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double g = eval.gradient[i];
      first_moment[i] = cfg.adam_beta1 * first_moment[i] + (1.0 - cfg.adam_beta1) * g;
      second_moment[i] = cfg.adam_beta2 * second_moment[i] + (1.0 - cfg.adam_beta2) * g * g;
      const double m_hat = first_moment[i] / bias1;
      const double v_hat = second_moment[i] / bias2;
      a[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
      if (!std::isfinite(a[i])) {
        throw Error(ErrorCode::kDiverged,
                    "coefficient a" + std::to_string(i + 1) + " is not finite at step " +
                        std::to_string(step));
      }
    }
  }
  result.final_coefficients = a;
  return result;
}

}  // namespace mechband
