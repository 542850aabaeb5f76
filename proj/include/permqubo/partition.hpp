#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "permqubo/matrix.hpp"

namespace permqubo {

struct Clustering {
  std::vector<int> labels;
  int k = 0;
  std::vector<int> sizes;
  // Within-cluster squared distance after each Lloyd iteration (k-means paths).
  std::vector<double> objective_trace;

  /// Members of cluster c in increasing index order.
  std::vector<int> members(int c) const;
};

/// Relabels clusters by first appearance so label 0 holds item 0, and fills sizes.
Clustering canonical_clustering(const std::vector<int>& labels, int k);

/// ceil(n / mu), at least 1.
int default_cluster_count(std::size_t n, int mu = 30);

struct KMeansOptions {
  int max_iterations = 100;
};

/// Lloyd iteration whose assignment step is an exact capacitated assignment
/// (squared Euclidean costs, sizes in [tau, mu]). Points are the rows of an
/// n x d matrix. Seeded k-means++ start.
Clustering constrained_kmeans(const Matrix& points, int k, int tau, int mu, std::uint64_t seed,
                              const KMeansOptions& options = {});

/// exp(-d^2 / (2 delta^2)); delta defaults to the off-diagonal mean.
Matrix distance_to_similarity(const Matrix& dist, std::optional<double> delta_scale = std::nullopt);

/// (S + S^T) / 2.
Matrix symmetrize(const Matrix& m);

/// Rows of the k leading eigenvectors of D^-1/2 S D^-1/2, each scaled to unit length.
Matrix spectral_embedding(const Matrix& similarity, int k);

/// Normalized-Laplacian spectral clustering followed by k-means on the embedding.
Clustering spectral_cluster(const Matrix& similarity, int k, std::uint64_t seed);

}  // namespace permqubo
