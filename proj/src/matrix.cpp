#include "permqubo/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace permqubo {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
  rows_ = init.size();
  cols_ = rows_ == 0 ? 0 : init.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    require(r.size() == cols_, ErrorKind::Dimension, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::max_value() const noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : data_) m = std::max(m, v);
  return m;
}

double Matrix::off_diagonal_mean() const noexcept {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (r != c) {
        sum += (*this)(r, c);
        ++count;
      }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

Matrix principal_submatrix(const Matrix& m, std::span<const int> index) {
  Matrix sub = Matrix::square(index.size());
  for (std::size_t a = 0; a < index.size(); ++a)
    for (std::size_t b = 0; b < index.size(); ++b) sub(a, b) = m(index[a], index[b]);
  return sub;
}

}  // namespace permqubo
