#pragma once

#include <span>
#include <vector>

#include "permqubo/anneal.hpp"
#include "permqubo/instances.hpp"
#include "permqubo/matrix.hpp"
#include "permqubo/types.hpp"

namespace permqubo {

/// Reconnection of two cycles: the edge at position edge_i of tour i
/// (tour_i[edge_i] -> tour_i[edge_i + 1]) and the edge at position edge_j of
/// tour j are removed. With reversed == false tour j is entered at the head of
/// its removed edge and walked forward; otherwise it is entered at the tail
/// and walked backward.
struct Splice {
  int edge_i = 0;
  int edge_j = 0;
  bool reversed = false;
  double cost = 0.0;
};

/// Least-cost splice of two disjoint cycles (each at least 2 cities).
Splice merge_cost(std::span<const int> tour_i, std::span<const int> tour_j, const Matrix& dist);

/// Cycle produced by applying a splice; starts with tour_i[edge_i].
std::vector<int> apply_splice(std::span<const int> tour_i, std::span<const int> tour_j, const Splice& s);

enum class OrderMode { Enumerate, QuboPath };

struct MergePlan {
  Matrix delta;  // delta(i, j) = merge_cost(tour_i, tour_j).cost, zero diagonal
  std::vector<std::vector<Splice>> best;  // best[i][j]
  std::vector<int> order;
  std::vector<Splice> splices;  // splices[t] joins order[t] (as i) and order[t + 1]
};

MergePlan merge_matrix(const std::vector<std::vector<int>>& cluster_tours, const Matrix& dist,
                       Execution execution = Execution::Parallel);

namespace reference {
/// Serial loop over the same pairwise merges; kept for benchmarks and tests.
MergePlan merge_matrix_serial(const std::vector<std::vector<int>>& cluster_tours, const Matrix& dist);
}  // namespace reference

inline constexpr int kEnumerateClusterCap = 8;

double path_cost(const Matrix& delta, std::span<const int> order);

/// Minimum-cost Hamiltonian path over delta. Enumerate is exact (k <= 8,
/// lexicographically smallest optimum); QuboPath solves the path QUBO with
/// A = 2 max|delta| + 1 and repairs the result.
std::vector<int> cluster_order(const Matrix& delta, OrderMode mode, const AnnealConfig* anneal = nullptr);

struct AssembledTour {
  Permutation tour;
  double parts_length = 0.0;   // sum of input cluster tour lengths
  double splice_total = 0.0;   // sum of applied splice costs
  std::vector<Splice> applied;
};

/// Splices clusters along `order`. Each new cluster is joined through an
/// intra-cluster edge of the previous cluster that is still present. The
/// planned splice is used when that edge survived, otherwise the best
/// surviving edge is chosen. Throws Assembly on inconsistent input or when
/// the length bookkeeping fails.
AssembledTour assemble_tour(const std::vector<std::vector<int>>& cluster_tours, std::span<const int> order,
                            std::span<const Splice> planned, const Matrix& dist);

/// Concatenates cluster job sequences in the cluster order that minimizes
/// makespan; lexicographically smallest order on ties; k <= 8.
Permutation fsp_cluster_permute(const std::vector<std::vector<int>>& cluster_orders, const FspInstance& inst);

/// Full-tour 2-opt descent (optional post-processing, off by default).
double two_opt(Permutation& tour, const Matrix& dist, int max_passes = 1000);

}  // namespace permqubo
