#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permqubo/matrix.hpp"
#include "permqubo/types.hpp"

namespace permqubo {

enum class Topology { Cycle, Path };

/// Quadratic form E(x) = sum_i q_ii x_i + sum_{i != j} q_ij x_i x_j + offset.
///
/// The coefficient matrix is symmetric (q_ij == q_ji); a coupling c between
/// two distinct variables is stored as c/2 on both sides, so the dense view is
/// exactly the Q of x^T Q x. Off-diagonal entries live in a compressed sparse
/// row layout because permutation models only couple a variable to ~4n others.
class QuboModel {
 public:
  struct Entry {
    std::uint32_t col;
    double value;
  };

  QuboModel() = default;

  std::size_t size() const noexcept { return diag_.size(); }
  double offset() const noexcept { return offset_; }
  double diagonal(std::size_t i) const noexcept { return diag_[i]; }
  std::span<const double> diagonal() const noexcept { return diag_; }
  std::span<const Entry> neighbors(std::size_t i) const noexcept {
    return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
  }
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  /// Symmetric coefficient q_ij (diagonal when i == j).
  double coefficient(std::size_t i, std::size_t j) const;
  Matrix to_dense() const;

  double energy(std::span<const std::uint8_t> bits) const;
  double energy(const BinarySolution& x) const;

  // Permutation metadata; zero objects for generic models.
  std::size_t n_objects() const noexcept { return n_objects_; }
  bool is_permutation_model() const noexcept { return n_objects_ > 0; }
  std::optional<Topology> topology() const noexcept { return topology_; }
  double penalty() const noexcept { return penalty_; }
  double objective_weight() const noexcept { return objective_weight_; }

  static QuboModel from_dense(const Matrix& q, double offset = 0.0);

 private:
  friend class QuboBuilder;

  std::vector<double> diag_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Entry> entries_;
  double offset_ = 0.0;
  std::size_t n_objects_ = 0;
  std::optional<Topology> topology_;
  double penalty_ = 0.0;
  double objective_weight_ = 1.0;
};

/// Accumulates linear and pairwise terms, then freezes them into a QuboModel.
class QuboBuilder {
 public:
  explicit QuboBuilder(std::size_t size);

  void add_offset(double c) { offset_ += c; }
  void add_linear(std::size_t i, double c) { diag_[i] += c; }
  /// Adds c * x_i * x_j. With i == j this is a linear term (x^2 = x).
  void add_quadratic(std::size_t i, std::size_t j, double c);

  void set_permutation_metadata(std::size_t n_objects, Topology topo, double penalty, double objective_weight);

  QuboModel build() &&;

 private:
  struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };
  std::vector<double> diag_;
  std::vector<Triplet> triplets_;
  double offset_ = 0.0;
  std::size_t n_objects_ = 0;
  std::optional<Topology> topology_;
  double penalty_ = 0.0;
  double objective_weight_ = 1.0;
};

/// Permutation QUBO: B * sum_{u != v} d_uv sum_j x_{u,j} x_{v,j+1}
///   + A * [sum_v (1 - sum_j x_{v,j})^2 + sum_j (1 - sum_v x_{v,j})^2].
/// Cycle wraps slot n-1 to slot 0; Path drops that closing term.
QuboModel build_permutation_qubo(const Matrix& dist, double penalty, Topology topology,
                                 double objective_weight = 1.0);

/// Sum of squared row and column violations (H_A without the penalty factor).
double constraint_violation(const BinarySolution& x);
bool is_feasible(const BinarySolution& x);
Permutation decode(const BinarySolution& x);

/// Upper-triangular coordinate text, E(x) = sum_{i <= j} U_ij x_i x_j + offset:
/// one "i j U_ij" line per nonzero, then "offset value".
void export_coordinate_text(const QuboModel& model, std::ostream& out);

}  // namespace permqubo
