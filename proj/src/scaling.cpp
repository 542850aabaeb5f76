#include "permqubo/scaling.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "permqubo/error.hpp"

namespace permqubo {

PermutationTensor::PermutationTensor(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols * rows * cols, 0.0) {}

PermutationTensor PermutationTensor::from_qubo(const QuboModel& model) {
  require(model.is_permutation_model(), ErrorKind::Domain, "tensor view needs a permutation model");
  const std::size_t n = model.n_objects();
  PermutationTensor t(n, n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = flat_index(u, i, n);
      t.at(u, i, u, i) = model.diagonal(a);
      for (const auto& e : model.neighbors(a)) t.at(u, i, e.col / n, e.col % n) = e.value;
    }
  return t;
}

double PermutationTensor::objective(std::span<const std::uint8_t> x) const {
  require(x.size() == rows_ * cols_, ErrorKind::Dimension, "solution shape does not match tensor");
  std::vector<std::size_t> on;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k]) on.push_back(k);
  double total = 0.0;
  const std::size_t flat = rows_ * cols_;
  for (std::size_t a : on)
    for (std::size_t b : on) total += data_[a * flat + b];
  return total;
}

PermutationTensor column_shift(const PermutationTensor& q, std::size_t j_hat, double delta) {
  require(j_hat < q.cols(), ErrorKind::Domain, "slot index out of range");
  PermutationTensor out = q;
  for (std::size_t u = 0; u < q.rows(); ++u)
    for (std::size_t i = 0; i < q.cols(); ++i)
      for (std::size_t v = 0; v < q.rows(); ++v) out.at(u, i, v, j_hat) += delta;
  return out;
}

Matrix city_shift(const Matrix& dist, const ScalingDeltas& deltas) {
  require(dist.is_square(), ErrorKind::Dimension, "distance matrix must be square");
  require(deltas.delta.size() == dist.rows(), ErrorKind::Dimension, "one delta per city required");
  Matrix out = dist;
  for (std::size_t i = 0; i < dist.rows(); ++i)
    for (std::size_t j = 0; j < dist.cols(); ++j)
      out(i, j) = i == j ? 0.0 : dist(i, j) + deltas.delta[i] + deltas.delta[j];
  return out;
}

DistanceMoments distance_variance(const Matrix& dist) {
  require(dist.is_square() && dist.rows() >= 2, ErrorKind::Domain, "need a square matrix with n >= 2");
  const std::size_t n = dist.rows();
  const double count = static_cast<double>(n * n - n);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        s1 += dist(i, j);
        s2 += dist(i, j) * dist(i, j);
      }
  DistanceMoments m;
  m.m1 = s1 / count;
  m.m2 = s2 / count;
  m.variance = m.m2 - m.m1 * m.m1;
  return m;
}

namespace {

// Right-hand side of the stationarity system, one entry per city.
Eigen::VectorXd variance_rhs(const Matrix& dist) {
  const std::size_t n = dist.rows();
  double total = 0.0;
  Eigen::VectorXd through = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        total += dist(i, j);
        through[static_cast<Eigen::Index>(i)] += dist(i, j) + dist(j, i);
      }
  const double nn = static_cast<double>(n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k)
    rhs[static_cast<Eigen::Index>(k)] = (total / nn - 0.5 * through[static_cast<Eigen::Index>(k)]) / (nn - 2.0);
  return rhs;
}

Eigen::MatrixXd variance_system(std::size_t n) {
  const double nn = static_cast<double>(n);
  const auto sz = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(sz, sz, -1.0 / nn);
  m.diagonal().setConstant(1.0 - 1.0 / nn);
  return m;
}

}  // namespace

ScalingDeltas variance_min_deltas(const Matrix& dist) {
  require(dist.is_square(), ErrorKind::Dimension, "distance matrix must be square");
  const std::size_t n = dist.rows();
  require(n >= 3, ErrorKind::Domain, "variance-minimizing shifts need n >= 3");
  const auto sz = static_cast<Eigen::Index>(n);

  // The system matrix has the all-ones nullspace; an appended sum-zero row
  // pins the solution down and the least-squares solve stays exact.
  Eigen::MatrixXd aug(sz + 1, sz);
  aug.topRows(sz) = variance_system(n);
  aug.row(sz).setOnes();
  Eigen::VectorXd rhs(sz + 1);
  rhs.head(sz) = variance_rhs(dist);
  rhs[sz] = 0.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aug);
  require(qr.rank() == sz, ErrorKind::Numerical, "variance system is singular beyond the constant shift");
  Eigen::VectorXd x = qr.solve(rhs);
  require(x.allFinite(), ErrorKind::Numerical, "non-finite shift");

  ScalingDeltas out;
  out.delta.assign(x.data(), x.data() + x.size());
  out.anchored = true;
  const double scale = 1.0 + dist.max_abs();
  require(variance_system_residual(dist, out.delta) <= 1e-8 * scale, ErrorKind::Numerical,
          "variance system residual too large");
  return out;
}

double variance_system_residual(const Matrix& dist, std::span<const double> delta) {
  require(delta.size() == dist.rows(), ErrorKind::Dimension, "one delta per city required");
  const auto sz = static_cast<Eigen::Index>(delta.size());
  Eigen::Map<const Eigen::VectorXd> d(delta.data(), sz);
  return (variance_system(delta.size()) * d - variance_rhs(dist)).cwiseAbs().maxCoeff();
}

}  // namespace permqubo
