#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mechband {

// Small dense row-major matrix used for the B x B blocks of the banded
// system. Block sizes are V*(R+1), i.e. a handful to a few dozen rows.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double scale, Matrix a);

// a^T * b without forming the transpose.
Matrix transpose_times(const Matrix& a, const Matrix& b);

Matrix diagonal_matrix(std::span<const double> diag);

// Largest absolute row sum.
double norm_inf(const Matrix& a);
double norm_frobenius(const Matrix& a);
double max_abs(const Matrix& a);

double norm_inf(std::span<const double> v);

}  // namespace mechband
