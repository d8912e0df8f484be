#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mechband/ode_spec.hpp"
#include "mechband/random_spec.hpp"

namespace fixtures {

// T = 2, V = Q = 1, R = 0: y0 + ... = 1 at both points, y0(0) = 1, s = 0.01.
// The exact solution is y = (1, 1).
inline mechband::OdeSpec toy_spec() {
  mechband::Dimensions d;
  d.time_points = 2;
  mechband::OdeSpec spec = mechband::OdeSpec::zeros(d);
  spec.coefficients = {1.0, 1.0};
  spec.constants = {1.0, 1.0};
  spec.initial_values = {1.0};
  spec.steps = {0.01};
  return spec;
}

// Seeded random specs drawn within the oracle-suite limits.
inline std::vector<mechband::OdeSpec> random_specs(std::size_t count, std::uint64_t seed,
                                                   const mechband::RandomSpecLimits& limits = {}) {
  std::mt19937_64 rng(seed);
  std::vector<mechband::OdeSpec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(mechband::random_spec(mechband::random_dimensions(rng, limits), rng, limits));
  return out;
}

inline std::vector<double> random_target(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = normal(rng);
  return out;
}

}  // namespace fixtures
