#include "mechband/block_assembly.hpp"

#include <cmath>

#include "mechband/errors.hpp"

namespace mechband {

namespace {

// Diag(block, ..., block) with `copies` repetitions.
Matrix repeat_diagonal(const Matrix& block, std::size_t copies) {
  const std::size_t k = block.rows();
  Matrix out(k * copies, k * copies);
  for (std::size_t c = 0; c < copies; ++c)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) out(c * k + i, c * k + j) = block(i, j);
  return out;
}

// D^T G D for diagonal D given by its entries.
Matrix congruence(std::span<const double> diag, const Matrix& g) {
  Matrix out(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out(i, j) = diag[i] * g(i, j) * diag[j];
  return out;
}

}  // namespace

Matrix build_expansion_table(std::size_t order) {
  const std::size_t k = order + 1;
  Matrix f(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    double inv_factorial = 1.0;
    for (std::size_t j = i; j < k; ++j) {
      if (j > i) inv_factorial /= static_cast<double>(j - i);
      f(i, j) = inv_factorial;
    }
  }
  return f;
}

StepScalings step_scalings(double step, std::size_t order) {
  StepScalings out;
  out.plus.resize(order + 1);
  out.minus.resize(order + 1);
  out.squared.resize(order + 1);
  double pos = 1.0;
  double neg = 1.0;
  for (std::size_t r = 0; r <= order; ++r) {
    out.plus[r] = pos;
    out.minus[r] = neg;
    out.squared[r] = pos * pos;
    pos *= step;
    neg *= -step;
  }
  return out;
}

Matrix governing_matrix(const OdeSpec& spec, std::size_t t) {
  const Dimensions& d = spec.dims;
  Matrix c(d.equations, d.block_size());
  for (std::size_t q = 0; q < d.equations; ++q)
    for (std::size_t v = 0; v < d.variables; ++v)
      for (std::size_t r = 0; r < d.orders(); ++r)
        c(q, v * d.orders() + r) = spec.coefficient(t, q, v, r);
  return c;
}

BlockSystem assemble_blocks(const OdeSpec& spec) {
  const Dimensions d = validate_spec(spec);
  const std::size_t T = d.time_points;
  const std::size_t B = d.block_size();
  const std::size_t K = d.orders();
  const double wg2 = spec.weights.governing * spec.weights.governing;
  const double wi2 = spec.weights.initial * spec.weights.initial;
  const double ws2 = spec.weights.smoothness * spec.weights.smoothness;

  const Matrix f = build_expansion_table(d.order);
  const Matrix ftf = transpose_times(f, f);
  const Matrix ft = transpose(f);

  // Per-interval pieces: (S+)^T F^T F S+, (S-)^T F^T F S-, S^2 and S**.
  std::vector<Matrix> forward_gram(d.intervals());
  std::vector<Matrix> backward_gram(d.intervals());
  std::vector<Matrix> squared(d.intervals());
  std::vector<Matrix> coupling(d.intervals());
  for (std::size_t t = 0; t < d.intervals(); ++t) {
    const StepScalings sc = step_scalings(spec.steps[t], d.order);
    forward_gram[t] = congruence(sc.plus, ftf);
    backward_gram[t] = congruence(sc.minus, ftf);
    squared[t] = diagonal_matrix(sc.squared);
    coupling[t] = congruence(sc.plus, f);
    coupling[t] += congruence(sc.minus, ft);
    coupling[t] *= -1.0;
  }

  BlockSystem sys;
  sys.dims = d;
  sys.diagonal.reserve(T);
  sys.subdiagonal.reserve(d.intervals());
  sys.rhs.assign(d.unknowns(), 0.0);

  for (std::size_t t = 0; t < T; ++t) {
    // S*_t: the smoothness contribution of the intervals adjacent to t.
    Matrix smooth(K, K);
    if (T > 1) {
      if (t == 0) {
        smooth = forward_gram[0] + squared[0];
      } else if (t == T - 1) {
        smooth = backward_gram[T - 2] + squared[T - 2];
      } else {
        smooth = forward_gram[t] + backward_gram[t - 1] + squared[t] + squared[t - 1];
      }
    }

    const Matrix c = governing_matrix(spec, t);
    Matrix m = wg2 * transpose_times(c, c);
    m += ws2 * repeat_diagonal(smooth, d.variables);

    std::span<double> beta = std::span<double>(sys.rhs).subspan(t * B, B);
    for (std::size_t q = 0; q < d.equations; ++q) {
      const double dq = spec.constant(t, q);
      for (std::size_t i = 0; i < B; ++i) beta[i] += wg2 * c(q, i) * dq;
    }

    if (t < d.init_time_points) {
      for (std::size_t v = 0; v < d.variables; ++v) {
        for (std::size_t r = 0; r <= d.init_order; ++r) {
          const std::size_t i = v * K + r;
          m(i, i) += wi2;
          beta[i] += wi2 * spec.initial_value(t, v, r);
        }
      }
    }

    // Remove roundoff asymmetry before factorization.
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = i + 1; j < B; ++j) {
        const double avg = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = avg;
        m(j, i) = avg;
      }
    }
    sys.diagonal.push_back(std::move(m));
  }

  for (std::size_t t = 0; t < d.intervals(); ++t) {
    sys.subdiagonal.push_back(ws2 * repeat_diagonal(coupling[t], d.variables));
  }
  return sys;
}

Matrix expand_to_full(const BlockSystem& system) {
  const std::size_t B = system.dims.block_size();
  const std::size_t n = system.dims.unknowns();
  Matrix full(n, n);
  for (std::size_t t = 0; t < system.diagonal.size(); ++t)
    for (std::size_t i = 0; i < B; ++i)
      for (std::size_t j = 0; j < B; ++j) full(t * B + i, t * B + j) = system.diagonal[t](i, j);
  for (std::size_t t = 0; t < system.subdiagonal.size(); ++t) {
    const Matrix& nb = system.subdiagonal[t];
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = 0; j < B; ++j) {
        full((t + 1) * B + i, t * B + j) = nb(i, j);
        full(t * B + j, (t + 1) * B + i) = nb(i, j);
      }
    }
  }
  return full;
}

std::vector<double> multiply(const BlockSystem& system, std::span<const double> x) {
  const std::size_t B = system.dims.block_size();
  const std::size_t T = system.dims.time_points;
  if (x.size() != system.dims.unknowns()) {
    throw Error(ErrorCode::kShapeMismatch, "vector length does not match the system");
  }
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const Matrix& m = system.diagonal[t];
    for (std::size_t i = 0; i < B; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < B; ++j) acc += m(i, j) * x[t * B + j];
      y[t * B + i] += acc;
    }
  }
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const Matrix& nb = system.subdiagonal[t];
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = 0; j < B; ++j) {
        y[(t + 1) * B + i] += nb(i, j) * x[t * B + j];
        y[t * B + j] += nb(i, j) * x[(t + 1) * B + i];
      }
    }
  }
  return y;
}

}  // namespace mechband
