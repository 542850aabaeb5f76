#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "permqubo/matrix.hpp"
#include "permqubo/qubo.hpp"

namespace permqubo {

/// Dense coefficient tensor Q[u,i,v,j] over an |I| x |J| binary matrix x:
/// objective(x) = sum x_{u,i} Q[u,i,v,j] x_{v,j}. Only meant for small
/// instances (|I||J| <= ~36), where it is the ground truth for rank
/// preservation checks.
class PermutationTensor {
 public:
  PermutationTensor(std::size_t rows, std::size_t cols);

  /// Coefficients of a permutation QUBO (offset dropped).
  static PermutationTensor from_qubo(const QuboModel& model);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& at(std::size_t u, std::size_t i, std::size_t v, std::size_t j) noexcept {
    return data_[index(u, i, v, j)];
  }
  double at(std::size_t u, std::size_t i, std::size_t v, std::size_t j) const noexcept {
    return data_[index(u, i, v, j)];
  }

  /// x is row-major rows x cols, x[u * cols + i].
  double objective(std::span<const std::uint8_t> x) const;

 private:
  std::size_t index(std::size_t u, std::size_t i, std::size_t v, std::size_t j) const noexcept {
    return ((u * cols_ + i) * rows_ + v) * cols_ + j;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Adds delta to every entry whose last slot index equals j_hat. Feasible
/// solutions (constant row and column sums) all move by the same amount.
PermutationTensor column_shift(const PermutationTensor& q, std::size_t j_hat, double delta);

struct ScalingDeltas {
  std::vector<double> delta;
  bool anchored = false;  // sum of delta is zero
};

/// d'(i,j) = d(i,j) + delta_i + delta_j off the diagonal; cycle lengths all
/// move by 2 * sum(delta).
Matrix city_shift(const Matrix& dist, const ScalingDeltas& deltas);

struct DistanceMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double variance = 0.0;
};

/// First two moments over the off-diagonal entries.
DistanceMoments distance_variance(const Matrix& dist);

/// Per-city shifts minimizing the off-diagonal variance of city_shift(dist, .),
/// anchored to sum zero.
ScalingDeltas variance_min_deltas(const Matrix& dist);

/// Max-norm residual of the stationarity system
///   (1 - 1/n) D_k - (1/n) sum_{j != k} D_j
///     = (1/(n-2)) * ((1/n) sum_{i != j} d_ij - (1/2) sum_{j != k} (d_kj + d_jk)).
double variance_system_residual(const Matrix& dist, std::span<const double> delta);

}  // namespace permqubo
