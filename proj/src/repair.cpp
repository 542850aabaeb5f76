#include "permqubo/repair.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "permqubo/error.hpp"
#include "permqubo/qubo.hpp"

namespace permqubo {

namespace {

struct DualSolution {
  std::vector<int> row_to_col;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path Hungarian method, rows <= cols, O(rows^2 cols).
DualSolution solve_duals(const Matrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  DualSolution out;
  out.row_to_col.assign(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) out.row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  return out;
}

void check_finite(const Matrix& cost) {
  for (double c : cost.data()) require(std::isfinite(c), ErrorKind::Domain, "assignment costs must be finite");
}

double assignment_total(const Matrix& cost, const std::vector<int>& row_to_col) {
  double t = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) t += cost(i, row_to_col[i]);
  return t;
}

}  // namespace

Assignment rectangular_assignment(const Matrix& cost) {
  require(cost.rows() <= cost.cols(), ErrorKind::Dimension, "need rows <= cols");
  check_finite(cost);
  Assignment a;
  if (cost.rows() == 0) return a;
  a.row_to_col = solve_duals(cost).row_to_col;
  a.total = assignment_total(cost, a.row_to_col);
  return a;
}

Assignment hungarian(const Matrix& cost) {
  require(cost.is_square(), ErrorKind::Dimension, "assignment cost matrix must be square");
  check_finite(cost);
  const std::size_t n = cost.rows();
  Assignment result;
  if (n == 0) return result;
  DualSolution duals = solve_duals(cost);

  // An assignment is optimal iff it only uses edges with zero reduced cost
  // under optimal duals. Walk rows in order and keep the smallest tight column
  // that still admits a perfect tight matching of the remaining rows.
  const double tol = 1e-9 * (1.0 + cost.max_abs());
  auto tight = [&](std::size_t i, std::size_t j) { return cost(i, j) - duals.u[i] - duals.v[j] <= tol; };

  std::vector<int> row_to_col = duals.row_to_col;
  std::vector<int> col_to_row(n, -1);
  for (std::size_t i = 0; i < n; ++i) col_to_row[row_to_col[i]] = static_cast<int>(i);
  std::vector<char> fixed_col(n, 0);
  std::vector<char> visited(n);

  // Kuhn augmenting search from `row` to `target` over tight edges among
  // unfixed columns, skipping `banned`.
  std::function<bool(int, int, int)> augment = [&](int row, int target, int banned) -> bool {
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed_col[j] || visited[j] || static_cast<int>(j) == banned || !tight(row, j)) continue;
      visited[j] = 1;
      if (static_cast<int>(j) == target || augment(col_to_row[j], target, banned)) {
        row_to_col[row] = static_cast<int>(j);
        col_to_row[j] = row;
        return true;
      }
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed_col[j] || !tight(i, j)) continue;
      if (row_to_col[i] == static_cast<int>(j)) break;
      // Give column j to row i; its owner must reach i's old column.
      const int owner = col_to_row[j];
      const int freed = row_to_col[i];
      auto saved_r2c = row_to_col;
      auto saved_c2r = col_to_row;
      std::fill(visited.begin(), visited.end(), 0);
      visited[j] = 1;
      col_to_row[freed] = -1;
      if (augment(owner, freed, static_cast<int>(j))) {
        row_to_col[i] = static_cast<int>(j);
        col_to_row[j] = static_cast<int>(i);
        break;
      }
      row_to_col = std::move(saved_r2c);
      col_to_row = std::move(saved_c2r);
    }
    fixed_col[row_to_col[i]] = 1;
  }

  result.row_to_col = std::move(row_to_col);
  result.total = assignment_total(cost, result.row_to_col);
  return result;
}

std::vector<int> capacitated_assignment(const Matrix& cost, int lower, int upper) {
  const auto n = static_cast<long>(cost.rows());
  const auto k = static_cast<long>(cost.cols());
  require(k >= 1 && lower >= 0 && upper >= lower && upper >= 1, ErrorKind::Capacity, "bad capacity bounds");
  require(k * lower <= n && n <= k * upper, ErrorKind::Capacity,
          "cannot place " + std::to_string(n) + " items into " + std::to_string(k) + " groups of size [" +
              std::to_string(lower) + ", " + std::to_string(upper) + "]");
  check_finite(cost);

  // Mandatory slots carry a bonus larger than any achievable cost spread, so
  // every optimum fills them first.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double c : cost.data()) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double bonus = (hi - lo) * static_cast<double>(n) + 1.0;
  Matrix slots(static_cast<std::size_t>(n), static_cast<std::size_t>(k * upper));
  for (long i = 0; i < n; ++i)
    for (long g = 0; g < k; ++g)
      for (long s = 0; s < upper; ++s) slots(i, g * upper + s) = cost(i, g) - (s < lower ? bonus : 0.0);

  const auto a = rectangular_assignment(slots);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) labels[i] = a.row_to_col[i] / upper;
  return labels;
}

Projection project(const BinarySolution& z) {
  const std::size_t n = z.n();
  Matrix cost = Matrix::square(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t j = 0; j < n; ++j) cost(v, j) = 1.0 - 2.0 * z(v, j);
  const auto a = hungarian(cost);
  Projection p;
  p.bits = BinarySolution(n);
  p.order.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    p.bits.set(v, a.row_to_col[v], true);
    p.order[a.row_to_col[v]] = static_cast<int>(v);
  }
  p.distance = static_cast<int>(std::lround(a.total)) + static_cast<int>(z.ones());
  return p;
}

}  // namespace permqubo
