#include "permqubo/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "permqubo/error.hpp"
#include "permqubo/fsp.hpp"
#include "permqubo/qubo.hpp"
#include "permqubo/repair.hpp"

namespace permqubo {

namespace {

std::size_t next_pos(std::size_t p, std::size_t size) { return p + 1 == size ? 0 : p + 1; }

// Closed walk over a subset of the cities.
double cycle_length(const Matrix& dist, std::span<const int> cycle) {
  double s = 0.0;
  for (std::size_t t = 0; t < cycle.size(); ++t) s += dist(cycle[t], cycle[next_pos(t, cycle.size())]);
  return s;
}

// Extra length from walking the whole cycle backwards (zero when symmetric).
double reversal_gain(std::span<const int> tour, const Matrix& dist) {
  double r = 0.0;
  for (std::size_t t = 0; t < tour.size(); ++t) {
    const int x = tour[t], y = tour[next_pos(t, tour.size())];
    r += dist(y, x) - dist(x, y);
  }
  return r;
}

double splice_cost(std::span<const int> ti, std::size_t e, std::span<const int> tj, std::size_t f, bool reversed,
                   double tj_reversal, const Matrix& dist) {
  const int a = ti[e], b = ti[next_pos(e, ti.size())];
  const int c = tj[f], h = tj[next_pos(f, tj.size())];
  const double removed = dist(a, b) + dist(c, h);
  if (!reversed) return dist(a, h) + dist(c, b) - removed;
  // Every kept edge of tour j is walked against its direction.
  const double kept_reversal = tj_reversal - (dist(h, c) - dist(c, h));
  return dist(a, c) + dist(h, b) - removed + kept_reversal;
}

void require_cycle(std::span<const int> tour, const Matrix& dist, const char* what) {
  require(tour.size() >= 2, ErrorKind::Domain, std::string(what) + " needs at least 2 cities");
  for (int c : tour)
    require(c >= 0 && static_cast<std::size_t>(c) < dist.rows(), ErrorKind::Domain,
            std::string(what) + " has a city outside the distance matrix");
}

// Best splice of tj into ti through the edges of ti at the given positions.
Splice best_splice(std::span<const int> ti, std::span<const std::size_t> positions, std::span<const int> tj,
                   const Matrix& dist) {
  const double rev = reversal_gain(tj, dist);
  Splice best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::size_t e : positions)
    for (std::size_t f = 0; f < tj.size(); ++f)
      for (bool reversed : {false, true}) {
        const double c = splice_cost(ti, e, tj, f, reversed, rev, dist);
        if (c < best.cost) best = {static_cast<int>(e), static_cast<int>(f), reversed, c};
      }
  return best;
}

MergePlan empty_plan(std::size_t k) {
  MergePlan plan;
  plan.delta = Matrix::square(k);
  plan.best.assign(k, std::vector<Splice>(k));
  return plan;
}

void check_disjoint(const std::vector<std::vector<int>>& tours, const Matrix& dist) {
  std::vector<char> seen(dist.rows(), 0);
  for (const auto& t : tours) {
    require_cycle(t, dist, "cluster tour");
    for (int c : t) {
      require(!seen[c], ErrorKind::Domain, "cluster tours overlap at city " + std::to_string(c));
      seen[c] = 1;
    }
  }
}

}  // namespace

Splice merge_cost(std::span<const int> tour_i, std::span<const int> tour_j, const Matrix& dist) {
  require(dist.is_square(), ErrorKind::Dimension, "distance matrix must be square");
  require_cycle(tour_i, dist, "first tour");
  require_cycle(tour_j, dist, "second tour");
  std::vector<char> in_i(dist.rows(), 0);
  for (int c : tour_i) in_i[c] = 1;
  for (int c : tour_j) require(!in_i[c], ErrorKind::Domain, "tours share city " + std::to_string(c));
  std::vector<std::size_t> all(tour_i.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return best_splice(tour_i, all, tour_j, dist);
}

std::vector<int> apply_splice(std::span<const int> tour_i, std::span<const int> tour_j, const Splice& s) {
  const std::size_t p = tour_i.size(), q = tour_j.size();
  require(s.edge_i >= 0 && static_cast<std::size_t>(s.edge_i) < p && s.edge_j >= 0 &&
              static_cast<std::size_t>(s.edge_j) < q,
          ErrorKind::Assembly, "splice edge out of range");
  std::vector<int> out;
  out.reserve(p + q);
  const auto e = static_cast<std::size_t>(s.edge_i);
  const auto f = static_cast<std::size_t>(s.edge_j);
  out.push_back(tour_i[e]);
  for (std::size_t t = 0; t < q; ++t) {
    // forward: j[f+1], j[f+2], ..., j[f]; backward: j[f], j[f-1], ..., j[f+1]
    const std::size_t idx = s.reversed ? (f + q - t) % q : (f + 1 + t) % q;
    out.push_back(tour_j[idx]);
  }
  for (std::size_t t = 1; t < p; ++t) out.push_back(tour_i[(e + t) % p]);
  return out;
}

MergePlan merge_matrix(const std::vector<std::vector<int>>& cluster_tours, const Matrix& dist, Execution execution) {
  check_disjoint(cluster_tours, dist);
  const auto k = static_cast<long>(cluster_tours.size());
  MergePlan plan = empty_plan(static_cast<std::size_t>(k));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (execution == Execution::Parallel)
  for (long cell = 0; cell < k * k; ++cell) {
    const long i = cell / k, j = cell % k;
    if (i == j) continue;
    try {
      const Splice s = merge_cost(cluster_tours[i], cluster_tours[j], dist);
      plan.best[i][j] = s;
      plan.delta(i, j) = s.cost;
    } catch (...) {
#pragma omp critical(permqubo_merge_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return plan;
}

namespace reference {
MergePlan merge_matrix_serial(const std::vector<std::vector<int>>& cluster_tours, const Matrix& dist) {
  check_disjoint(cluster_tours, dist);
  const std::size_t k = cluster_tours.size();
  MergePlan plan = empty_plan(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      plan.best[i][j] = merge_cost(cluster_tours[i], cluster_tours[j], dist);
      plan.delta(i, j) = plan.best[i][j].cost;
    }
  return plan;
}
}  // namespace reference

double path_cost(const Matrix& delta, std::span<const int> order) {
  double c = 0.0;
  for (std::size_t t = 0; t + 1 < order.size(); ++t) c += delta(order[t], order[t + 1]);
  return c;
}

std::vector<int> cluster_order(const Matrix& delta, OrderMode mode, const AnnealConfig* anneal) {
  require(delta.is_square(), ErrorKind::Dimension, "merge-cost matrix must be square");
  const std::size_t k = delta.rows();
  require(k >= 1, ErrorKind::Domain, "no clusters to order");
  if (k == 1) return {0};

  if (mode == OrderMode::Enumerate) {
    require(k <= static_cast<std::size_t>(kEnumerateClusterCap), ErrorKind::Size,
            "path enumeration is capped at " + std::to_string(kEnumerateClusterCap) + " clusters");
    std::vector<int> perm = identity_permutation(k);
    std::vector<int> best = perm;
    double best_cost = path_cost(delta, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double c = path_cost(delta, perm);
      if (c < best_cost - 1e-12 * (1.0 + std::abs(best_cost))) {
        best_cost = c;
        best = perm;
      }
    }
    return best;
  }

  const double a = 2.0 * delta.max_abs() + 1.0;
  const QuboModel model = build_permutation_qubo(delta, a, Topology::Path);
  const AnnealConfig cfg = anneal ? *anneal : default_anneal_config(model, 0);
  const SolveResult r = solve(model, cfg);
  std::vector<std::vector<int>> candidates;
  if (r.best_feasible_bits) candidates.push_back(decode(BinarySolution(k, *r.best_feasible_bits)));
  candidates.push_back(project(BinarySolution(k, r.best_bits)).order);
  return *std::min_element(candidates.begin(), candidates.end(), [&](const auto& x, const auto& y) {
    return path_cost(delta, x) < path_cost(delta, y);
  });
}

AssembledTour assemble_tour(const std::vector<std::vector<int>>& cluster_tours, std::span<const int> order,
                            std::span<const Splice> planned, const Matrix& dist) {
  const std::size_t k = cluster_tours.size();
  require(k >= 1, ErrorKind::Assembly, "no cluster tours");
  require(is_permutation(order, k), ErrorKind::Assembly, "cluster order is not a permutation");
  require(planned.empty() || planned.size() + 1 == k, ErrorKind::Assembly, "need one planned splice per join");

  std::vector<int> owner(dist.rows(), -1);
  std::size_t total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (int city : cluster_tours[c]) {
      require(city >= 0 && static_cast<std::size_t>(city) < dist.rows() && owner[city] < 0, ErrorKind::Assembly,
              "cluster tours do not partition the cities");
      owner[city] = static_cast<int>(c);
    }
    total += cluster_tours[c].size();
  }
  require(total == dist.rows(), ErrorKind::Assembly, "cluster tours do not cover every city");

  AssembledTour out;
  for (const auto& t : cluster_tours) out.parts_length += cycle_length(dist, t);
  out.tour = cluster_tours[order[0]];
  if (k > 1) require(out.tour.size() >= 2, ErrorKind::Assembly, "cannot splice through a single-city cluster");

  for (std::size_t t = 0; t + 1 < k; ++t) {
    const int prev = order[t], next = order[t + 1];
    const auto& tj = cluster_tours[next];
    require(tj.size() >= 2, ErrorKind::Assembly, "cannot splice a single-city cluster");
    const std::size_t size = out.tour.size();
    std::vector<std::size_t> positions;
    for (std::size_t s = 0; s < size; ++s)
      if (owner[out.tour[s]] == prev && owner[out.tour[next_pos(s, size)]] == prev) positions.push_back(s);
    require(!positions.empty(), ErrorKind::Assembly, "previous cluster has no surviving edge");

    Splice chosen;
    bool have = false;
    if (!planned.empty()) {
      const Splice& p = planned[t];
      const auto& ti = cluster_tours[prev];
      require(p.edge_i >= 0 && static_cast<std::size_t>(p.edge_i) < ti.size() && p.edge_j >= 0 &&
                  static_cast<std::size_t>(p.edge_j) < tj.size(),
              ErrorKind::Assembly, "planned splice references a missing edge");
      const int a = ti[p.edge_i], b = ti[next_pos(p.edge_i, ti.size())];
      for (std::size_t s : positions)
        if (out.tour[s] == a && out.tour[next_pos(s, size)] == b) {
          chosen = {static_cast<int>(s), p.edge_j, p.reversed,
                    splice_cost(out.tour, s, tj, p.edge_j, p.reversed, reversal_gain(tj, dist), dist)};
          have = true;
          break;
        }
    }
    if (!have) chosen = best_splice(out.tour, positions, tj, dist);
    out.tour = apply_splice(out.tour, tj, chosen);
    out.splice_total += chosen.cost;
    out.applied.push_back(chosen);
  }

  require(is_permutation(out.tour, dist.rows()), ErrorKind::Assembly, "assembled tour is not a permutation");
  const double length = tour_length(dist, out.tour);
  const double expected = out.parts_length + out.splice_total;
  require(std::abs(length - expected) <= 1e-9 * (1.0 + std::abs(length)), ErrorKind::Assembly,
          "assembled length does not match parts plus splices");
  return out;
}

Permutation fsp_cluster_permute(const std::vector<std::vector<int>>& cluster_orders, const FspInstance& inst) {
  const std::size_t k = cluster_orders.size();
  require(k >= 1, ErrorKind::Domain, "no clusters to permute");
  require(k <= static_cast<std::size_t>(kEnumerateClusterCap), ErrorKind::Size,
          "cluster permutation search is capped at " + std::to_string(kEnumerateClusterCap) + " clusters");
  auto concat = [&](std::span<const int> perm) {
    Permutation seq;
    for (int c : perm) seq.insert(seq.end(), cluster_orders[c].begin(), cluster_orders[c].end());
    return seq;
  };
  std::vector<int> perm = identity_permutation(k);
  Permutation best = concat(perm);
  double best_c = makespan(inst, best);
  while (std::next_permutation(perm.begin(), perm.end())) {
    Permutation seq = concat(perm);
    const double c = makespan(inst, seq);
    if (c < best_c) {
      best_c = c;
      best = std::move(seq);
    }
  }
  return best;
}

double two_opt(Permutation& tour, const Matrix& dist, int max_passes) {
  const std::size_t n = tour.size();
  if (n < 4) return tour_length(dist, tour);
  // forward[t] / backward[t]: cost of the first t edges walked one way or the other
  std::vector<double> forward(n), backward(n);
  auto rebuild = [&] {
    forward[0] = backward[0] = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      forward[t] = forward[t - 1] + dist(tour[t - 1], tour[t]);
      backward[t] = backward[t - 1] + dist(tour[t], tour[t - 1]);
    }
  };
  rebuild();
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i + 2 < n && !improved; ++i)
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        // reverse tour[i+1 .. j]
        const int a = tour[i], b = tour[i + 1], c = tour[j], e = tour[(j + 1) % n];
        const double inner = (backward[j] - backward[i + 1]) - (forward[j] - forward[i + 1]);
        const double gain = dist(a, c) + dist(b, e) - dist(a, b) - dist(c, e) + inner;
        if (gain < -1e-9) {
          std::reverse(tour.begin() + static_cast<long>(i + 1), tour.begin() + static_cast<long>(j + 1));
          rebuild();
          improved = true;
          break;
        }
      }
    if (!improved) break;
  }
  return tour_length(dist, tour);
}

}  // namespace permqubo
