#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "permqubo/error.hpp"

namespace permqubo {

/// Row-major dense matrix of doubles. Used for distance matrices, processing
/// times and assignment costs; none of these exceed a few thousand rows.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  static Matrix square(std::size_t n, double fill = 0.0) { return Matrix(n, n, fill); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  double max_abs() const noexcept;
  double max_value() const noexcept;
  /// Mean over entries with row != col.
  double off_diagonal_mean() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sub-matrix on the given index set (rows and columns both).
Matrix principal_submatrix(const Matrix& m, std::span<const int> index);

}  // namespace permqubo
