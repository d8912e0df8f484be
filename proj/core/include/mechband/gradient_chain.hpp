#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mechband/banded_solver.hpp"
#include "mechband/block_assembly.hpp"
#include "mechband/ode_spec.hpp"

namespace mechband {

/// Loss gradients with respect to the raw spec tensors, laid out exactly like
/// the corresponding OdeSpec fields. `initial_values` covers only the
/// initialized entries since those are the only ones that exist.
struct SpecGradients {
  Dimensions dims;
  std::vector<double> coefficients;
  std::vector<double> constants;
  std::vector<double> initial_values;
};

/// Pulls dl/dM, dl/dN and dl/dbeta back through the block assembly:
///   dd_t = w_gov^2 C_t dbeta_t
///   du_t = w_init^2 dbeta_t        (initialized entries)
///   dC_t = w_gov^2 (C_t (G_t + G_t^T) + d_t dbeta_t^T),  G_t = dl/dM_t
/// The subdiagonal gradients depend only on s and the weights, so they do
/// not contribute here; see gradient_steps_fd for s.
SpecGradients chain_to_spec(const OdeSpec& spec, const BlockSystem& system,
                            const GradientBundle& gradients);

/// Only dd_t = w_gov^2 C_t dbeta_t, for callers that never need dC or du.
std::vector<double> chain_to_constants(const OdeSpec& spec, std::span<const double> d_rhs);

using LossFunction = std::function<double(const Solution&)>;

/// Central finite differences of `loss` with respect to every step s_t, with
/// h = max(1e-4 s_t, 1e-6) halved until s_t - h > 0. Costs two full solves
/// per interval.
std::vector<double> gradient_steps_fd(const OdeSpec& spec, const LossFunction& loss);

/// Largest normwise relative error (|analytic - fd|_inf / |fd|_inf) per
/// gradient family, comparing the analytic chain against extrapolated central
/// finite differences of l = 1/2 |y - y*|^2 for a seeded random target y*.
struct GradientCheckReport {
  double rhs = 0.0;
  double diagonal = 0.0;
  double subdiagonal = 0.0;
  double coefficients = 0.0;
  double constants = 0.0;
  double initial_values = 0.0;

  double max() const;
};

GradientCheckReport check_gradients(const OdeSpec& spec, std::uint64_t seed);

}  // namespace mechband
