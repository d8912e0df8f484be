#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mechband/ode_spec.hpp"

namespace mechband {

/// Largest system the dense reference path accepts.
inline constexpr std::size_t kDenseOracleMaxUnknowns = 5000;

enum class RowKind { kGoverning, kInitial, kSmoothForward, kSmoothBackward };

/// Provenance of one constraint row: time point (interval for smoothness
/// rows), equation or variable index, and derivative order.
struct RowTag {
  RowKind kind;
  std::size_t t;
  std::size_t index;
  std::size_t order;
};

/// The weighted least-squares problem min (Ay - b)^T W (Ay - b) written out
/// row by row. `weights` holds the squared row weights (diagonal of W).
struct DenseSystem {
  Dimensions dims;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd weights;
  Eigen::VectorXd rhs;
  std::vector<RowTag> rows;

  Eigen::MatrixXd normal_matrix() const;
  Eigen::VectorXd normal_rhs() const;
};

/// Transcribes the governing, initial and forward/backward smoothness
/// constraints into A, W and b. Throws OracleTooLarge when n exceeds
/// kDenseOracleMaxUnknowns.
DenseSystem assemble_dense(const OdeSpec& spec);

/// y = (A^T W A)^{-1} A^T W b through a dense Cholesky of the normal matrix.
Solution solve_dense(const DenseSystem& system);

struct DenseGradientResult {
  Solution solution;
  Eigen::VectorXd d_rhs;     // (A^T W A)^{-1} dl/dy
  Eigen::MatrixXd d_matrix;  // -d_rhs y^T
};

/// Solve plus the adjoint gradients, all dense. Used as the cubic baseline.
DenseGradientResult solve_dense_with_gradient(const DenseSystem& system,
                                              std::span<const double> dl_dy);

/// Bytes held by solve_dense_with_gradient: A, W, b, the normal matrix, its
/// factor, the gradient matrix and four n-vectors.
std::size_t dense_retained_bytes(const Dimensions& dims);

}  // namespace mechband
