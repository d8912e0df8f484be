#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mechband/ode_spec.hpp"

namespace mechband {

using LorenzState = std::array<double, 3>;

/// a1..a7 of
///   dx/dt = a1 x + a2 y
///   dy/dt = a3 x + a4 y + a5 xz
///   dz/dt = a6 z + a7 xy
using BasisCoefficients = std::array<double, 7>;

inline constexpr BasisCoefficients kLorenzTruth = {-10.0, 10.0, 28.0, -1.0,
                                                   -1.0,  -8.0 / 3.0, 1.0};

struct LorenzConfig {
  // Ground-truth dynamics used to generate data.
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  LorenzState initial_state{1.0, 1.0, 1.0};
  std::size_t n_steps = 10000;
  double dt = 0.01;

  // Discovery.
  std::size_t window = 50;
  // Highest derivative order of each window spec; orders above one carry
  // zero governing coefficients. With order 1 the loss minimizer itself sits
  // about 0.05 off in a3, so the default is 3.
  std::size_t order = 3;
  // 512 windows per step in the original setup; 128 keeps a CPU run short
  // and still recovers every coefficient to within a few thousandths.
  std::size_t batch = 128;
  std::size_t optimizer_steps = 5000;
  // Adam moves each coefficient by at most about lr per step, so 1e-2 cannot
  // travel from N(0, 1) draws to a3 = 28 within the step budget.
  double learning_rate = 1.0;
  std::size_t decay_step = 3000;
  double decay_factor = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  Weights weights{};
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless window >= 2, batch >= 1, dt > 0 and the
  /// trajectory is long enough for one window.
  void validate() const;
};

LorenzState lorenz_derivative(const LorenzConfig& cfg, const LorenzState& state);

/// Classical fixed-step RK4 from cfg.initial_state; returns n_steps + 1 states.
/// Throws NonFiniteState if the trajectory blows up.
std::vector<LorenzState> rk4_lorenz(const LorenzConfig& cfg);

/// Feature vectors per equation, ordered to match a1..a7:
/// ([x, y], [x, y, xz], [z, xy]).
struct LorenzFeatures {
  std::array<double, 2> dx;
  std::array<double, 3> dy;
  std::array<double, 2> dz;
};

LorenzFeatures lorenz_basis(const LorenzState& state);

/// Right-hand sides of the three equations for the given coefficients.
LorenzState lorenz_model(const BasisCoefficients& a, const LorenzState& state);

/// Spec for one observed window: V = Q = 3, R = cfg.order, unit coefficients on the
/// first derivatives, d_t = model(a, x_t), y(0) = x_0 and s = dt.
OdeSpec lorenz_window_spec(const LorenzConfig& cfg, std::span<const LorenzState> window,
                           const BasisCoefficients& a);

struct StepLoss {
  double loss = 0.0;  // mean over the batch of sum_t |y_t - x_t|^2
  BasisCoefficients gradient{};
};

/// Loss and coefficient gradient for a batch of windows (given by their start
/// offsets into the trajectory).
StepLoss lorenz_batch_loss(const LorenzConfig& cfg, std::span<const LorenzState> trajectory,
                           std::span<const std::size_t> starts, const BasisCoefficients& a);

/// Seeded starting coefficients (standard normal draws).
BasisCoefficients initial_coefficients(std::uint64_t seed);

struct DiscoveryResult {
  BasisCoefficients initial{};
  BasisCoefficients final_coefficients{};
  // Coefficients evaluated at the lowest-loss step; equals `initial` when no
  // optimizer step ran.
  BasisCoefficients best{};
  std::size_t best_step = 0;
  std::vector<double> loss;
  std::vector<double> loss_ema;  // EMA with factor 0.9
};

using DiscoveryProgress = std::function<void(std::size_t step, double loss)>;

/// Adam on the coefficients with a step decay of the learning rate. Throws
/// Diverged if the loss becomes non-finite.
DiscoveryResult discover_lorenz(const LorenzConfig& cfg,
                                const DiscoveryProgress& progress = {});

}  // namespace mechband
