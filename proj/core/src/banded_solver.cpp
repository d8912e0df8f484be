#include "mechband/banded_solver.hpp"

#include <string>

#include "block_kernels.hpp"
#include "mechband/errors.hpp"
#include "mechband/parallel.hpp"

namespace mechband {

namespace {

void check_system(const BlockSystem& system) {
  const Dimensions& d = system.dims;
  const std::size_t B = d.block_size();
  if (system.diagonal.size() != d.time_points || system.subdiagonal.size() != d.intervals() ||
      system.rhs.size() != d.unknowns()) {
    throw Error(ErrorCode::kShapeMismatch, "block system does not match its dimensions");
  }
  for (const Matrix& m : system.diagonal)
    if (m.rows() != B || m.cols() != B)
      throw Error(ErrorCode::kShapeMismatch, "diagonal block is not B x B");
  for (const Matrix& m : system.subdiagonal)
    if (m.rows() != B || m.cols() != B)
      throw Error(ErrorCode::kShapeMismatch, "subdiagonal block is not B x B");
}

void check_vector(const Factorization& f, std::span<const double> v, const char* what) {
  if (v.size() != f.dims.unknowns()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + " has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(f.dims.unknowns()));
  }
}

Factorization start_decomposition(const BlockSystem& system, const SolverOptions& options) {
  check_system(system);
  Factorization f;
  f.dims = system.dims;
  f.lower = system.diagonal;
  f.coupling = system.subdiagonal;
  if (options.ridge != 0.0) {
    for (Matrix& l : f.lower)
      for (std::size_t i = 0; i < l.rows(); ++i) l(i, i) += options.ridge;
  }
  return f;
}

// One step of the blockwise Cholesky sweep.
void cholesky_step(Factorization& f, std::size_t i) {
  if (i > 0) {
    kernels::right_solve_lower_transposed(f.coupling[i - 1], f.lower[i - 1]);
    kernels::subtract_gram_lower(f.lower[i], f.coupling[i - 1]);
  }
  if (!kernels::cholesky_lower(f.lower[i])) throw NotPositiveDefinite(i);
}

// P_i <- P_i L_i^{-1}; independent across i.
void finish_ldl(Factorization& f) {
  for (std::size_t i = 0; i < f.coupling.size(); ++i)
    kernels::right_solve_lower(f.coupling[i], f.lower[i]);
}

std::span<double> segment(std::vector<double>& v, std::size_t t, std::size_t b) {
  return std::span<double>(v).subspan(t * b, b);
}

std::span<const double> segment(const std::vector<double>& v, std::size_t t, std::size_t b) {
  return std::span<const double>(v).subspan(t * b, b);
}

void forward_sweep_step(const Factorization& f, std::vector<double>& a, std::size_t i) {
  const std::size_t B = f.dims.block_size();
  kernels::subtract_product(f.coupling[i - 1], segment(a, i - 1, B), segment(a, i, B));
}

void block_solve_step(const Factorization& f, std::vector<double>& a, std::size_t i) {
  const std::size_t B = f.dims.block_size();
  kernels::solve_lower(f.lower[i], segment(a, i, B));
  kernels::solve_lower_transposed(f.lower[i], segment(a, i, B));
}

void backward_sweep_step(const Factorization& f, std::vector<double>& a, std::size_t i) {
  const std::size_t B = f.dims.block_size();
  kernels::subtract_transposed_product(f.coupling[i], segment(a, i + 1, B), segment(a, i, B));
}

GradientBundle gradients_from(const Factorization& f, std::vector<double> d_rhs) {
  const std::size_t T = f.dims.time_points;
  const std::size_t B = f.dims.block_size();
  const std::vector<double>& y = *f.solution;
  GradientBundle g;
  g.d_diagonal.assign(T, Matrix(B, B));
  g.d_subdiagonal.assign(f.dims.intervals(), Matrix(B, B));
  for (std::size_t i = 0; i < T; ++i)
    kernels::subtract_outer(segment(d_rhs, i, B), segment(y, i, B), g.d_diagonal[i]);
  for (std::size_t i = 0; i + 1 < T; ++i) {
    kernels::subtract_outer(segment(d_rhs, i + 1, B), segment(y, i, B), g.d_subdiagonal[i]);
    kernels::subtract_outer(segment(y, i + 1, B), segment(d_rhs, i, B), g.d_subdiagonal[i]);
  }
  g.d_rhs = std::move(d_rhs);
  return g;
}

void require_cache(const Factorization& f) {
  if (!f.solution) {
    throw Error(ErrorCode::kMissingCache, "factorization holds no cached solution");
  }
}

template <typename T>
void require_same_dims(std::span<const T> items) {
  for (const T& item : items) {
    if (!(item.dims == items.front().dims)) {
      throw Error(ErrorCode::kShapeMismatch, "batched systems must share dimensions");
    }
  }
}

}  // namespace

std::size_t banded_retained_bytes(const Dimensions& dims) {
  const std::size_t B = dims.block_size();
  const std::size_t T = dims.time_points;
  return ((2 * T - 1) * B * B + T * B) * sizeof(double);
}

std::size_t Factorization::retained_bytes() const noexcept {
  std::size_t doubles = 0;
  for (const Matrix& m : lower) doubles += m.size();
  for (const Matrix& m : coupling) doubles += m.size();
  if (solution) doubles += solution->size();
  return doubles * sizeof(double);
}

Factorization decompose(const BlockSystem& system, const SolverOptions& options) {
  Factorization f = start_decomposition(system, options);
  for (std::size_t i = 0; i < f.dims.time_points; ++i) cholesky_step(f, i);
  finish_ldl(f);
  return f;
}

std::vector<double> substitute(const Factorization& f, std::span<const double> alpha) {
  check_vector(f, alpha, "alpha");
  const std::size_t T = f.dims.time_points;
  std::vector<double> a(alpha.begin(), alpha.end());
  for (std::size_t i = 1; i < T; ++i) forward_sweep_step(f, a, i);
  for (std::size_t i = 0; i < T; ++i) block_solve_step(f, a, i);
  for (std::size_t i = T - 1; i-- > 0;) backward_sweep_step(f, a, i);
  return a;
}

ForwardResult solve_forward(const BlockSystem& system, const SolverOptions& options) {
  ForwardResult out{decompose(system, options), Solution{system.dims, {}}};
  out.solution.values = substitute(out.factorization, system.rhs);
  out.factorization.solution = out.solution.values;
  return out;
}

GradientBundle solve_backward(const Factorization& f, std::span<const double> dl_dy) {
  require_cache(f);
  check_vector(f, dl_dy, "dl_dy");
  return gradients_from(f, substitute(f, dl_dy));
}

std::vector<Factorization> decompose(std::span<const BlockSystem> systems,
                                     const SolverOptions& options) {
  if (systems.empty()) return {};
  require_same_dims(systems);
  std::vector<Factorization> out(systems.size());
  const std::size_t T = systems.front().dims.time_points;
  parallel_for(systems.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) out[b] = start_decomposition(systems[b], options);
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t b = begin; b < end; ++b) cholesky_step(out[b], i);
    for (std::size_t b = begin; b < end; ++b) finish_ldl(out[b]);
  }, options.workers);
  return out;
}

std::vector<std::vector<double>> substitute(std::span<const Factorization> factorizations,
                                            std::span<const std::vector<double>> alphas,
                                            const SolverOptions& options) {
  if (factorizations.size() != alphas.size()) {
    throw Error(ErrorCode::kShapeMismatch, "batch sizes differ");
  }
  if (factorizations.empty()) return {};
  require_same_dims(factorizations);
  for (std::size_t b = 0; b < alphas.size(); ++b) check_vector(factorizations[b], alphas[b], "alpha");

  std::vector<std::vector<double>> out(alphas.begin(), alphas.end());
  const std::size_t T = factorizations.front().dims.time_points;
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = 1; i < T; ++i)
      for (std::size_t b = begin; b < end; ++b) forward_sweep_step(factorizations[b], out[b], i);
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t b = begin; b < end; ++b) block_solve_step(factorizations[b], out[b], i);
    for (std::size_t i = T - 1; i-- > 0;)
      for (std::size_t b = begin; b < end; ++b) backward_sweep_step(factorizations[b], out[b], i);
  }, options.workers);
  return out;
}

std::vector<ForwardResult> solve_forward(std::span<const BlockSystem> systems,
                                         const SolverOptions& options) {
  std::vector<Factorization> factors = decompose(systems, options);
  std::vector<std::vector<double>> rhs;
  rhs.reserve(systems.size());
  for (const BlockSystem& s : systems) rhs.push_back(s.rhs);
  std::vector<std::vector<double>> ys = substitute(factors, rhs, options);

  std::vector<ForwardResult> out;
  out.reserve(systems.size());
  for (std::size_t b = 0; b < systems.size(); ++b) {
    factors[b].solution = ys[b];
    out.push_back(ForwardResult{std::move(factors[b]), Solution{systems[b].dims, std::move(ys[b])}});
  }
  return out;
}

std::vector<GradientBundle> solve_backward(std::span<const Factorization> factorizations,
                                           std::span<const std::vector<double>> dl_dys,
                                           const SolverOptions& options) {
  for (const Factorization& f : factorizations) require_cache(f);
  std::vector<std::vector<double>> d_rhs = substitute(factorizations, dl_dys, options);
  std::vector<GradientBundle> out(factorizations.size());
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b)
      out[b] = gradients_from(factorizations[b], std::move(d_rhs[b]));
  }, options.workers);
  return out;
}

Matrix reconstruct(const Factorization& f) {
  const std::size_t B = f.dims.block_size();
  const std::size_t n = f.dims.unknowns();
  const std::size_t T = f.dims.time_points;
  // Form G = P L, then G G^T.
  Matrix g(n, n);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < B; ++i)
      for (std::size_t j = 0; j < B; ++j) g(t * B + i, t * B + j) = f.lower[t](i, j);
  }
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const Matrix pl = f.coupling[t] * f.lower[t];
    for (std::size_t i = 0; i < B; ++i)
      for (std::size_t j = 0; j < B; ++j) g((t + 1) * B + i, t * B + j) = pl(i, j);
  }
  return g * transpose(g);
}

}  // namespace mechband
