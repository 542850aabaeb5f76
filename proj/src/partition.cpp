#include "permqubo/partition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "permqubo/error.hpp"
#include "permqubo/repair.hpp"
#include "permqubo/rng.hpp"

namespace permqubo {

std::vector<int> Clustering::members(int c) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == c) out.push_back(static_cast<int>(i));
  return out;
}

Clustering canonical_clustering(const std::vector<int>& labels, int k) {
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  Clustering out;
  out.k = k;
  out.labels.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    require(l >= 0 && l < k, ErrorKind::Domain, "cluster label out of range");
    if (remap[l] < 0) remap[l] = next++;
    out.labels[i] = remap[l];
  }
  out.sizes.assign(static_cast<std::size_t>(k), 0);
  for (int l : out.labels) ++out.sizes[l];
  return out;
}

int default_cluster_count(std::size_t n, int mu) {
  require(mu >= 1, ErrorKind::Config, "maximum cluster size must be positive");
  return std::max(1, static_cast<int>((n + static_cast<std::size_t>(mu) - 1) / static_cast<std::size_t>(mu)));
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

Matrix kmeanspp_centers(const Matrix& points, int k, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centers(static_cast<std::size_t>(k), points.cols());
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::size_t pick = static_cast<std::size_t>(uniform_below(rng, n));
  for (int c = 0; c < k; ++c) {
    std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], squared_distance(points.row(i), centers.row(c)));
      total += best[i];
    }
    if (c + 1 == k) break;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(uniform_below(rng, n));
      continue;
    }
    double target = uniform01(rng) * total;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= best[i];
      if (target < 0.0 && best[i] > 0.0) {
        pick = i;
        break;
      }
    }
  }
  return centers;
}

Matrix cost_to_centers(const Matrix& points, const Matrix& centers) {
  Matrix cost(points.rows(), centers.rows());
  for (std::size_t i = 0; i < points.rows(); ++i)
    for (std::size_t c = 0; c < centers.rows(); ++c) cost(i, c) = squared_distance(points.row(i), centers.row(c));
  return cost;
}

// Empty clusters keep their previous center.
void update_centers(const Matrix& points, const std::vector<int>& labels, Matrix& centers) {
  Matrix sums(centers.rows(), centers.cols());
  std::vector<int> count(centers.rows(), 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    ++count[labels[i]];
    for (std::size_t d = 0; d < points.cols(); ++d) sums(labels[i], d) += points(i, d);
  }
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    if (count[c] == 0) continue;
    for (std::size_t d = 0; d < points.cols(); ++d) centers(c, d) = sums(c, d) / count[c];
  }
}

double within_cluster(const Matrix& points, const std::vector<int>& labels, const Matrix& centers) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) s += squared_distance(points.row(i), centers.row(labels[i]));
  return s;
}

// Plain Lloyd k-means (no size bounds), best of several k-means++ restarts.
std::vector<int> lloyd(const Matrix& points, int k, std::uint64_t seed, int restarts) {
  const std::size_t n = points.rows();
  std::vector<int> best_labels;
  double best_score = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(r));
    Matrix centers = kmeanspp_centers(points, k, rng);
    std::vector<int> labels(n, -1);
    for (int it = 0; it < 300; ++it) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = squared_distance(points.row(i), centers.row(c));
          if (d < dmin) {
            dmin = d;
            arg = c;
          }
        }
        if (labels[i] != arg) {
          labels[i] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      update_centers(points, labels, centers);
    }
    const double score = within_cluster(points, labels, centers);
    if (score < best_score) {
      best_score = score;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace

Clustering constrained_kmeans(const Matrix& points, int k, int tau, int mu, std::uint64_t seed,
                              const KMeansOptions& options) {
  const auto n = static_cast<long>(points.rows());
  require(k >= 1 && tau >= 0 && mu >= 1 && tau <= mu, ErrorKind::Capacity, "bad cluster size bounds");
  require(static_cast<long>(k) * tau <= n && n <= static_cast<long>(k) * mu, ErrorKind::Capacity,
          "cannot split " + std::to_string(n) + " points into " + std::to_string(k) + " clusters of size [" +
              std::to_string(tau) + ", " + std::to_string(mu) + "]");
  require(points.cols() >= 1, ErrorKind::Dimension, "points need at least one coordinate");

  Rng rng = make_stream(seed, 0);
  Matrix centers = kmeanspp_centers(points, k, rng);
  std::vector<int> labels;
  std::vector<double> trace;
  for (int it = 0; it < options.max_iterations; ++it) {
    auto next = capacitated_assignment(cost_to_centers(points, centers), tau, mu);
    const bool stable = next == labels;
    labels = std::move(next);
    update_centers(points, labels, centers);
    trace.push_back(within_cluster(points, labels, centers));
    if (stable) break;
  }
  Clustering out = canonical_clustering(labels, k);
  out.objective_trace = std::move(trace);
  return out;
}

Matrix distance_to_similarity(const Matrix& dist, std::optional<double> delta_scale) {
  require(dist.is_square(), ErrorKind::Dimension, "distance matrix must be square");
  for (double d : dist.data()) require(d >= 0.0, ErrorKind::Domain, "distances must be nonnegative");
  const double delta = delta_scale ? *delta_scale : (dist.rows() >= 2 ? dist.off_diagonal_mean() : 0.0);
  require(delta != 0.0 && std::isfinite(delta), ErrorKind::Domain, "similarity scale must be nonzero");
  Matrix s(dist.rows(), dist.cols());
  const double denom = 2.0 * delta * delta;
  for (std::size_t i = 0; i < dist.rows(); ++i)
    for (std::size_t j = 0; j < dist.cols(); ++j) s(i, j) = std::exp(-dist(i, j) * dist(i, j) / denom);
  return s;
}

Matrix symmetrize(const Matrix& m) {
  require(m.is_square(), ErrorKind::Dimension, "matrix must be square");
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

Matrix spectral_embedding(const Matrix& similarity, int k) {
  require(similarity.is_square(), ErrorKind::Dimension, "similarity must be square");
  const auto n = static_cast<Eigen::Index>(similarity.rows());
  require(k >= 1 && k <= n, ErrorKind::Domain, "cluster count must be in [1, n]");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = similarity(i, j);
      require(s >= 0.0 && s <= 1.0, ErrorKind::Domain, "similarity entries must lie in [0, 1]");
      require(std::abs(s - similarity(j, i)) <= 1e-12, ErrorKind::Domain, "similarity must be symmetric");
    }

  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = similarity(i, j);
  Eigen::VectorXd inv_sqrt_deg = w.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    require(inv_sqrt_deg[i] > 0.0, ErrorKind::Domain, "isolated item in similarity graph");
    inv_sqrt_deg[i] = 1.0 / std::sqrt(inv_sqrt_deg[i]);
  }
  // Smallest eigenvalues of I - N are the largest of N = D^-1/2 W D^-1/2.
  const Eigen::MatrixXd normalized = inv_sqrt_deg.asDiagonal() * w * inv_sqrt_deg.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
  require(eig.info() == Eigen::Success, ErrorKind::Numerical, "eigendecomposition failed");
  const Eigen::MatrixXd u = eig.eigenvectors().rightCols(k);

  Matrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = u.row(i).norm();
    for (Eigen::Index c = 0; c < k; ++c) out(i, c) = norm > 0.0 ? u(i, c) / norm : 0.0;
  }
  return out;
}

Clustering spectral_cluster(const Matrix& similarity, int k, std::uint64_t seed) {
  const std::size_t n = similarity.rows();
  require(k >= 1 && static_cast<std::size_t>(k) <= n, ErrorKind::Domain, "cluster count must be in [1, n]");
  const Matrix embedding = spectral_embedding(similarity, k);
  if (static_cast<std::size_t>(k) == n) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i);
    return canonical_clustering(labels, k);
  }
  if (k == 1) return canonical_clustering(std::vector<int>(n, 0), 1);
  return canonical_clustering(lloyd(embedding, k, seed, 10), k);
}

}  // namespace permqubo
