#pragma once

// Reference computations written independently of the library paths they
// check. They favour obviousness over speed.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mechband/block_assembly.hpp"
#include "mechband/ode_spec.hpp"

namespace oracle {

/// Rows of the weighted least-squares problem, already multiplied by the
/// square root of their weight, so that the solution minimizes |A y - b|^2.
struct ScaledRows {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

/// Builds every constraint row straight from its definition: governing rows,
/// initial-value rows, then one forward and one backward Taylor row per
/// (interval, variable, order).
ScaledRows scaled_rows(const mechband::OdeSpec& spec);

/// Least-squares solution through a column-pivoted QR of the scaled rows,
/// i.e. without ever forming the normal equations.
std::vector<double> qr_solution(const mechband::OdeSpec& spec);

/// A^T W A from the scaled rows.
Eigen::MatrixXd normal_matrix(const mechband::OdeSpec& spec);

/// Dense copy of the banded matrix described by the block system.
Eigen::MatrixXd dense_blocks(const mechband::BlockSystem& system);

/// Central difference of f along one coordinate of x, Richardson
/// extrapolated from steps h and h/2.
double central_difference(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> x, std::size_t i, double h);

/// max |a - b| / max(|a|, |b|), absolute when both are below 1e-12.
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

/// 1/2 |y - target|^2 for the banded solution of `spec`.
double half_squared_loss(const mechband::OdeSpec& spec, std::span<const double> target);

/// Finite-difference gradients of half_squared_loss with respect to the
/// spec tensors, h = 1e-6 (1 + |x|), extrapolated as above.
struct SpecGradientsFd {
  std::vector<double> coefficients;
  std::vector<double> constants;
  std::vector<double> initial_values;
};
SpecGradientsFd spec_gradients_fd(const mechband::OdeSpec& spec, std::span<const double> target);

/// Finite-difference gradients of the same loss with respect to the block
/// system itself. Diagonal blocks are perturbed in symmetric pairs, so the
/// entry (i, j) holds d/dM_ij + d/dM_ji for i != j.
struct BlockGradientsFd {
  std::vector<double> rhs;
  std::vector<Eigen::MatrixXd> diagonal_pairs;
  std::vector<Eigen::MatrixXd> subdiagonal;
};
BlockGradientsFd block_gradients_fd(const mechband::BlockSystem& system,
                                    std::span<const double> target);

}  // namespace oracle
