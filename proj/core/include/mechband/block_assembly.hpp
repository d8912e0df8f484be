#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mechband/matrix.hpp"
#include "mechband/ode_spec.hpp"

namespace mechband {

/// (R+1) x (R+1) Taylor weights: F[i][j] = 1/(j-i)! for j >= i, else 0.
Matrix build_expansion_table(std::size_t order);

/// Diagonals of the per-interval scaling matrices:
/// plus = (s^0..s^R), minus = ((-s)^0..(-s)^R), squared = (s^0, s^2, .., s^2R).
struct StepScalings {
  std::vector<double> plus;
  std::vector<double> minus;
  std::vector<double> squared;
};

StepScalings step_scalings(double step, std::size_t order);

/// Nonzero blocks of the symmetric block-tridiagonal normal matrix
///
///   [ M_0  N_0^T              ]
///   [ N_0  M_1   N_1^T        ]
///   [      N_1   ...          ]
///
/// and the right-hand side beta, stored flat (T segments of length B).
struct BlockSystem {
  Dimensions dims;
  std::vector<Matrix> diagonal;     // M_t, T blocks
  std::vector<Matrix> subdiagonal;  // N_t = M_{t+1,t}, T-1 blocks
  std::vector<double> rhs;          // beta

  std::span<const double> rhs_segment(std::size_t t) const {
    return std::span<const double>(rhs).subspan(t * dims.block_size(), dims.block_size());
  }
};

/// Builds M and beta block by block without materializing the constraint
/// matrix. Validates the spec first.
BlockSystem assemble_blocks(const OdeSpec& spec);

/// Q x B matrix of governing coefficients at time point t.
Matrix governing_matrix(const OdeSpec& spec, std::size_t t);

/// Full n x n matrix of the system; for tests and small problems only.
Matrix expand_to_full(const BlockSystem& system);

/// y <- M x using only the stored blocks.
std::vector<double> multiply(const BlockSystem& system, std::span<const double> x);

}  // namespace mechband
