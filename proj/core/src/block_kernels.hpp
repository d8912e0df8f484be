#pragma once

// Dense kernels on single B x B blocks. Loops run in a fixed row-major
// order so results are reproducible bit for bit.

#include <cmath>
#include <cstddef>
#include <span>

#include "mechband/matrix.hpp"

namespace mechband::kernels {

// In-place Cholesky of the lower triangle; the strict upper triangle is
// zeroed. Returns false if a pivot is not strictly positive.
inline bool cholesky_lower(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double ljj = std::sqrt(diag);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= a(i, k) * a(j, k);
      a(i, j) = acc / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
  }
  return true;
}

// x <- L^{-1} x
inline void solve_lower(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * x[k];
    x[i] = acc / l(i, i);
  }
}

// x <- L^{-T} x
inline void solve_lower_transposed(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * x[k];
    x[ii] = acc / l(ii, ii);
  }
}

// P <- P L^{-T}; row p of the result solves L x = p.
inline void right_solve_lower_transposed(Matrix& p, const Matrix& l) {
  for (std::size_t i = 0; i < p.rows(); ++i) solve_lower(l, p.row(i));
}

// P <- P L^{-1}; row p of the result solves L^T x = p.
inline void right_solve_lower(Matrix& p, const Matrix& l) {
  for (std::size_t i = 0; i < p.rows(); ++i) solve_lower_transposed(l, p.row(i));
}

// A <- A - P P^T (lower triangle only; Cholesky reads nothing else).
inline void subtract_gram_lower(Matrix& a, const Matrix& p) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto pi = p.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const auto pj = p.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < p.cols(); ++k) acc += pi[k] * pj[k];
      a(i, j) -= acc;
    }
  }
}

// y <- y - P x
inline void subtract_product(const Matrix& p, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const auto pi = p.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < p.cols(); ++k) acc += pi[k] * x[k];
    y[i] -= acc;
  }
}

// y <- y - P^T x
inline void subtract_transposed_product(const Matrix& p, std::span<const double> x,
                                        std::span<double> y) {
  for (std::size_t k = 0; k < p.rows(); ++k) {
    const auto pk = p.row(k);
    const double xk = x[k];
    for (std::size_t j = 0; j < p.cols(); ++j) y[j] -= pk[j] * xk;
  }
}

// out <- out - a b^T
inline void subtract_outer(std::span<const double> a, std::span<const double> b, Matrix& out) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) -= a[i] * b[j];
}

}  // namespace mechband::kernels
