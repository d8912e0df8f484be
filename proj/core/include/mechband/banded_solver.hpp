#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mechband/block_assembly.hpp"
#include "mechband/matrix.hpp"
#include "mechband/ode_spec.hpp"

namespace mechband {

struct SolverOptions {
  // Opt-in ridge added to every diagonal block before factorization. The
  // default of zero keeps the least-squares optimum untouched.
  double ridge = 0.0;
  // Worker cap for batched calls; 0 means thread_count().
  std::size_t workers = 0;
};

/// Blocked factorization M = P L L^T P^T with P unit block lower bidiagonal
/// (subdiagonal blocks `coupling`) and L block diagonal lower triangular
/// (blocks `lower`). Retains exactly 2T-1 matrix blocks, plus T vector
/// segments once the solution is cached.
struct Factorization {
  Dimensions dims;
  std::vector<Matrix> lower;     // L_t, T blocks
  std::vector<Matrix> coupling;  // P_t, T-1 blocks
  std::optional<std::vector<double>> solution;

  std::size_t matrix_blocks() const noexcept { return lower.size() + coupling.size(); }
  std::size_t vector_segments() const noexcept {
    return solution ? solution->size() / dims.block_size() : 0;
  }
  std::size_t retained_bytes() const noexcept;
};

/// Closed-form retained bytes of one factorization with cached solution:
/// ((2T-1) B^2 + T B) * sizeof(double).
std::size_t banded_retained_bytes(const Dimensions& dims);

/// dl/dM_t, dl/dN_t and dl/dbeta, mirroring BlockSystem.
struct GradientBundle {
  std::vector<Matrix> d_diagonal;
  std::vector<Matrix> d_subdiagonal;
  std::vector<double> d_rhs;
};

struct ForwardResult {
  Factorization factorization;
  Solution solution;
};

/// Sequential blockwise Cholesky sweep followed by the conversion of the
/// coupling blocks to LDL form. Throws NotPositiveDefinite naming the block.
Factorization decompose(const BlockSystem& system, const SolverOptions& options = {});

/// Returns M^{-1} alpha via forward substitution with P, per-block
/// L^{-T} L^{-1}, and backward substitution with P^T.
std::vector<double> substitute(const Factorization& factorization,
                               std::span<const double> alpha);

/// Factorizes and solves M y = beta; y is cached in the factorization.
ForwardResult solve_forward(const BlockSystem& system, const SolverOptions& options = {});

/// Gradients of a loss with respect to M and beta given dl/dy. Requires the
/// cached solution (MissingCache otherwise).
GradientBundle solve_backward(const Factorization& factorization,
                              std::span<const double> dl_dy);

// Batched variants: every system must share the same dimensions. The
// sequential sweeps over t run once per chunk of the batch with the block
// arithmetic of the chunk inside; chunks run on separate workers.
std::vector<Factorization> decompose(std::span<const BlockSystem> systems,
                                     const SolverOptions& options = {});
std::vector<std::vector<double>> substitute(std::span<const Factorization> factorizations,
                                            std::span<const std::vector<double>> alphas,
                                            const SolverOptions& options = {});
std::vector<ForwardResult> solve_forward(std::span<const BlockSystem> systems,
                                         const SolverOptions& options = {});
std::vector<GradientBundle> solve_backward(std::span<const Factorization> factorizations,
                                           std::span<const std::vector<double>> dl_dys,
                                           const SolverOptions& options = {});

/// Rebuilds P L L^T P^T as a full n x n matrix (tests only).
Matrix reconstruct(const Factorization& factorization);

}  // namespace mechband
