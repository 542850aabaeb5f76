#include "permqubo/qubo.hpp"

#include <algorithm>
#include <ostream>

#include "permqubo/error.hpp"

namespace permqubo {

double QuboModel::coefficient(std::size_t i, std::size_t j) const {
  require(i < size() && j < size(), ErrorKind::Dimension, "coefficient index out of range");
  if (i == j) return diag_[i];
  auto row = neighbors(i);
  auto it = std::lower_bound(row.begin(), row.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
  return (it != row.end() && it->col == j) ? it->value : 0.0;
}

Matrix QuboModel::to_dense() const {
  Matrix q = Matrix::square(size());
  for (std::size_t i = 0; i < size(); ++i) {
    q(i, i) = diag_[i];
    for (const auto& e : neighbors(i)) q(i, e.col) = e.value;
  }
  return q;
}

double QuboModel::energy(std::span<const std::uint8_t> bits) const {
  require(bits.size() == size(), ErrorKind::Dimension, "bitstring length does not match model size");
  double e = offset_;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!bits[i]) continue;
    e += diag_[i];
    for (const auto& nb : neighbors(i))
      if (bits[nb.col]) e += nb.value;
  }
  return e;
}

double QuboModel::energy(const BinarySolution& x) const { return energy(x.flat()); }

QuboModel QuboModel::from_dense(const Matrix& q, double offset) {
  require(q.is_square(), ErrorKind::Dimension, "QUBO matrix must be square");
  QuboBuilder b(q.rows());
  b.add_offset(offset);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    b.add_linear(i, q(i, i));
    for (std::size_t j = i + 1; j < q.cols(); ++j) b.add_quadratic(i, j, q(i, j) + q(j, i));
  }
  return std::move(b).build();
}

QuboBuilder::QuboBuilder(std::size_t size) : diag_(size, 0.0) {}

void QuboBuilder::add_quadratic(std::size_t i, std::size_t j, double c) {
  require(i < diag_.size() && j < diag_.size(), ErrorKind::Dimension, "variable index out of range");
  if (i == j) {
    diag_[i] += c;
    return;
  }
  triplets_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0.5 * c});
  triplets_.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i), 0.5 * c});
}

void QuboBuilder::set_permutation_metadata(std::size_t n_objects, Topology topo, double penalty,
                                           double objective_weight) {
  n_objects_ = n_objects;
  topology_ = topo;
  penalty_ = penalty;
  objective_weight_ = objective_weight;
}

QuboModel QuboBuilder::build() && {
  std::sort(triplets_.begin(), triplets_.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  QuboModel m;
  m.diag_ = std::move(diag_);
  m.offset_ = offset_;
  m.n_objects_ = n_objects_;
  m.topology_ = topology_;
  m.penalty_ = penalty_;
  m.objective_weight_ = objective_weight_;
  const std::size_t n = m.diag_.size();
  m.row_start_.assign(n + 1, 0);
  m.entries_.reserve(triplets_.size());
  std::size_t k = 0;
  for (std::size_t r = 0; r < n; ++r) {
    while (k < triplets_.size() && triplets_[k].row == r) {
      const auto col = triplets_[k].col;
      double v = 0.0;
      while (k < triplets_.size() && triplets_[k].row == r && triplets_[k].col == col) v += triplets_[k++].value;
      if (v != 0.0) m.entries_.push_back({col, v});
    }
    m.row_start_[r + 1] = m.entries_.size();
  }
  triplets_.clear();
  return m;
}

QuboModel build_permutation_qubo(const Matrix& dist, double penalty, Topology topology, double objective_weight) {
  require(dist.is_square(), ErrorKind::Dimension, "distance matrix must be square");
  const std::size_t n = dist.rows();
  require(n >= 2, ErrorKind::Domain, "permutation QUBO needs at least 2 objects");
  require(penalty > 0.0, ErrorKind::Domain, "penalty A must be positive");

  QuboBuilder b(n * n);
  b.set_permutation_metadata(n, topology, penalty, objective_weight);

  // Objective: consecutive slots j -> j+1.
  const std::size_t last = topology == Topology::Cycle ? n : n - 1;
  for (std::size_t j = 0; j < last; ++j) {
    const std::size_t next = (j + 1) % n;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        if (u == v) continue;
        const double d = objective_weight * dist(u, v);
        if (d != 0.0) b.add_quadratic(flat_index(u, j, n), flat_index(v, next, n), d);
      }
  }

  // (1 - sum x)^2 = 1 - sum x + 2 sum_{a<b} x_a x_b, once per row and once per column.
  b.add_offset(2.0 * static_cast<double>(n) * penalty);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t j = 0; j < n; ++j) {
      b.add_linear(flat_index(v, j, n), -2.0 * penalty);
      for (std::size_t l = j + 1; l < n; ++l) b.add_quadratic(flat_index(v, j, n), flat_index(v, l, n), 2.0 * penalty);
      for (std::size_t u = v + 1; u < n; ++u) b.add_quadratic(flat_index(v, j, n), flat_index(u, j, n), 2.0 * penalty);
    }
  return std::move(b).build();
}

double constraint_violation(const BinarySolution& x) {
  const std::size_t n = x.n();
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += x(v, j);
      col += x(j, v);
    }
    total += (1.0 - row) * (1.0 - row) + (1.0 - col) * (1.0 - col);
  }
  return total;
}

bool is_feasible(const BinarySolution& x) {
  const std::size_t n = x.n();
  for (std::size_t v = 0; v < n; ++v) {
    int row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row += x(v, j);
      col += x(j, v);
    }
    if (row != 1 || col != 1) return false;
  }
  return true;
}

Permutation decode(const BinarySolution& x) {
  require(is_feasible(x), ErrorKind::InfeasibleSolution, "bit matrix is not a permutation matrix; repair it first");
  const std::size_t n = x.n();
  Permutation order(n, -1);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t j = 0; j < n; ++j)
      if (x(v, j)) order[j] = static_cast<int>(v);
  return order;
}

void export_coordinate_text(const QuboModel& model, std::ostream& out) {
  out.precision(17);
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.diagonal(i) != 0.0) out << i << ' ' << i << ' ' << model.diagonal(i) << '\n';
    for (const auto& e : model.neighbors(i))
      if (e.col > i) out << i << ' ' << e.col << ' ' << 2.0 * e.value << '\n';
  }
  out << "offset " << model.offset() << '\n';
}

}  // namespace permqubo
