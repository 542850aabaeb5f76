#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "check_error.hpp"
#include "oracles.hpp"
#include "permqubo/fsp.hpp"
#include "permqubo/stitch.hpp"

using namespace permqubo;

namespace {

// Random disjoint cycles covering 0..n-1.
std::vector<std::vector<int>> random_clusters(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<int> all = oracle::random_permutation(n, rng);
  std::vector<std::vector<int>> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = {all[2 * c], all[2 * c + 1]};
  for (std::size_t i = 2 * k; i < n; ++i) out[uniform_below(rng, k)].push_back(all[i]);
  return out;
}

Matrix test_matrix(std::size_t n, Rng& rng, bool symmetric) {
  if (symmetric) return euc2d_matrix(oracle::random_points(n, rng));
  return oracle::random_matrix(n, rng, 1.0, 100.0);
}

MergePlan planned(const std::vector<std::vector<int>>& tours, const Matrix& d) {
  MergePlan plan = merge_matrix(tours, d, Execution::Serial);
  plan.order = cluster_order(plan.delta, OrderMode::Enumerate);
  for (std::size_t t = 0; t + 1 < plan.order.size(); ++t)
    plan.splices.push_back(plan.best[plan.order[t]][plan.order[t + 1]]);
  return plan;
}

}  // namespace

TEST_CASE("merge cost of two unit triangles") {
  // Triangle A at x in {0,1}, triangle B shifted by 10 along x.
  const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {10, 0}, {11, 0}, {10, 1}};
  const Matrix d = TspInstance::from_points("tri", pts).dist;
  const std::vector<int> a{0, 1, 2}, b{3, 4, 5};
  const Splice s = merge_cost(a, b, d);
  CHECK(s.cost == doctest::Approx(oracle::splice_oracle(a, b, d)).epsilon(1e-12));
  const std::vector<int> merged = apply_splice(a, b, s);
  CHECK(is_permutation(merged, 6));
  CHECK(oracle::cycle_len(d, merged) == doctest::Approx(oracle::cycle_len(d, a) + oracle::cycle_len(d, b) + s.cost));
}

TEST_CASE("merge cost of two 2-city clusters") {
  const Matrix d = TspInstance::from_points("p", {{0, 0}, {0, 1}, {5, 0}, {5, 1}}).dist;
  const Splice s = merge_cost(std::vector<int>{0, 1}, std::vector<int>{2, 3}, d);
  // Cycles 0-1-0 and 2-3-2 have length 2 each; the best merge 0-1-3-2-0 has length 12.
  CHECK(s.cost == doctest::Approx(8.0));
}

TEST_CASE("merge cost matches the exhaustive splice oracle and is symmetric") {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t p = 2 + uniform_below(rng, 5), q = 2 + uniform_below(rng, 5);
    const bool symmetric = trial % 2 == 0;
    const Matrix d = test_matrix(p + q, rng, symmetric);
    const std::vector<int> all = oracle::random_permutation(p + q, rng);
    const std::vector<int> ti(all.begin(), all.begin() + static_cast<long>(p));
    const std::vector<int> tj(all.begin() + static_cast<long>(p), all.end());
    const Splice s = merge_cost(ti, tj, d);
    CHECK(s.cost == doctest::Approx(oracle::splice_oracle(ti, tj, d)).epsilon(1e-12));
    const std::vector<int> merged = apply_splice(ti, tj, s);
    REQUIRE(is_permutation(merged, p + q));
    CHECK(merged.front() == ti[s.edge_i]);
    CHECK(oracle::cycle_len(d, merged) ==
          doctest::Approx(oracle::cycle_len(d, ti) + oracle::cycle_len(d, tj) + s.cost).epsilon(1e-12));
    if (symmetric) CHECK(merge_cost(tj, ti, d).cost == doctest::Approx(s.cost).epsilon(1e-12));
  }
}

TEST_CASE("merge cost errors") {
  const Matrix d(4, 4, 1.0);
  CHECK_ERROR_KIND(merge_cost(std::vector<int>{0}, std::vector<int>{1, 2}, d), ErrorKind::Domain);
  CHECK_ERROR_KIND(merge_cost(std::vector<int>{0, 1}, std::vector<int>{1, 2}, d), ErrorKind::Domain);
  CHECK_ERROR_KIND(merge_cost(std::vector<int>{0, 1}, std::vector<int>{2, 4}, d), ErrorKind::Domain);
}

TEST_CASE("merge matrix: serial reference and parallel agree") {
  Rng rng(2);
  const Matrix d = oracle::random_matrix(40, rng, 1.0, 100.0);
  const auto tours = random_clusters(40, 6, rng);
  const MergePlan p = merge_matrix(tours, d, Execution::Parallel);
  const MergePlan s = reference::merge_matrix_serial(tours, d);
  CHECK(p.delta == s.delta);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(p.delta(i, i) == 0.0);
    for (std::size_t j = 0; j < 6; ++j)
      if (i != j) {
        CHECK(p.delta(i, j) == merge_cost(tours[i], tours[j], d).cost);
        CHECK(p.best[i][j].edge_i == s.best[i][j].edge_i);
        CHECK(p.best[i][j].edge_j == s.best[i][j].edge_j);
      }
  }
}

TEST_CASE("cluster order on a chain and on ties") {
  const Matrix chain{{0, 1, 100}, {1, 0, 1}, {100, 1, 0}};
  const std::vector<int> o = cluster_order(chain, OrderMode::Enumerate);
  CHECK((o == std::vector<int>{0, 1, 2} || o == std::vector<int>{2, 1, 0}));
  CHECK(path_cost(chain, o) == 2.0);
  Matrix flat(4, 4, 3.0);
  for (std::size_t i = 0; i < 4; ++i) flat(i, i) = 0.0;
  CHECK(cluster_order(flat, OrderMode::Enumerate) == std::vector<int>{0, 1, 2, 3});
  CHECK(cluster_order(Matrix(1, 1), OrderMode::Enumerate) == std::vector<int>{0});
  CHECK_ERROR_KIND(cluster_order(Matrix(9, 9), OrderMode::Enumerate), ErrorKind::Size);
}

TEST_CASE("enumerated order is the exact optimum path") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + uniform_below(rng, 5);
    const Matrix delta = oracle::random_matrix(k, rng, -10.0, 50.0);
    CHECK(path_cost(delta, cluster_order(delta, OrderMode::Enumerate)) ==
          doctest::Approx(oracle::best_path(delta)).epsilon(1e-12));
  }
}

TEST_CASE("QUBO path order is never better than enumeration and usually equal") {
  Rng rng(4);
  int equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix delta = oracle::random_matrix(5, rng, 0.0, 50.0);
    const std::vector<int> q = cluster_order(delta, OrderMode::QuboPath);
    REQUIRE(is_permutation(q, 5));
    const double e = path_cost(delta, cluster_order(delta, OrderMode::Enumerate));
    const double c = path_cost(delta, q);
    CHECK(c >= e - 1e-9);
    equal += std::abs(c - e) <= 1e-9;
  }
  CHECK(equal >= 90);
}

TEST_CASE("assemble: one cluster returns its own tour") {
  Rng rng(5);
  const Matrix d = oracle::random_matrix(5, rng);
  const AssembledTour a = assemble_tour({{3, 1, 4, 0, 2}}, std::vector<int>{0}, {}, d);
  CHECK(a.tour == Permutation{3, 1, 4, 0, 2});
  CHECK(a.splice_total == 0.0);
  CHECK(a.parts_length == doctest::Approx(tour_length(d, a.tour)));
}

TEST_CASE("assemble: every city once, length equals parts plus splices") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + uniform_below(rng, 5);
    const std::size_t n = 2 * k + uniform_below(rng, 20);
    const Matrix d = test_matrix(n, rng, trial % 2 == 0);
    const auto tours = random_clusters(n, k, rng);
    const MergePlan plan = planned(tours, d);
    const AssembledTour a = assemble_tour(tours, plan.order, plan.splices, d);
    REQUIRE(is_permutation(a.tour, n));
    double parts = 0.0;
    for (const auto& t : tours) parts += oracle::cycle_len(d, t);
    CHECK(a.parts_length == doctest::Approx(parts).epsilon(1e-12));
    CHECK(std::abs(tour_length(d, a.tour) - (a.parts_length + a.splice_total)) <=
          1e-9 * (1.0 + tour_length(d, a.tour)));
    CHECK(a.applied.size() == k - 1);
    // Without a plan the assembler picks its own surviving edges.
    const AssembledTour free = assemble_tour(tours, plan.order, {}, d);
    CHECK(is_permutation(free.tour, n));
  }
}

TEST_CASE("assemble errors") {
  const Matrix d(4, 4, 1.0);
  CHECK_ERROR_KIND(assemble_tour({{0, 1}, {1, 2}}, std::vector<int>{0, 1}, {}, d), ErrorKind::Assembly);
  CHECK_ERROR_KIND(assemble_tour({{0, 1}, {2, 3}}, std::vector<int>{0, 0}, {}, d), ErrorKind::Assembly);
  CHECK_ERROR_KIND(assemble_tour({{0, 1}, {2}}, std::vector<int>{0, 1}, {}, d), ErrorKind::Assembly);
  CHECK_ERROR_KIND(assemble_tour({{0, 1}}, std::vector<int>{0}, {}, d), ErrorKind::Assembly);
}

TEST_CASE("FSP cluster permutation") {
  FspInstance inst;
  inst.times = Matrix{{1, 2}, {2, 1}};
  CHECK(fsp_cluster_permute({{0}, {1}}, inst) == Permutation{0, 1});
  CHECK(fsp_cluster_permute({{1}, {0}}, inst) == Permutation{0, 1});
  FspInstance same;
  same.times = Matrix(3, 2, 1.0);
  CHECK(fsp_cluster_permute({{2}, {0}, {1}}, same) == Permutation{2, 0, 1});

  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    FspInstance r;
    r.times = Matrix(6, 3);
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t i = 0; i < 3; ++i) r.times(j, i) = 1.0 + static_cast<double>(uniform_below(rng, 9));
    const std::vector<std::vector<int>> clusters{{0, 1}, {2}, {3, 4, 5}};
    const Permutation got = fsp_cluster_permute(clusters, r);
    double best = INFINITY;
    std::vector<int> order{0, 1, 2};
    do {
      Permutation p;
      for (int c : order) p.insert(p.end(), clusters[c].begin(), clusters[c].end());
      best = std::min(best, makespan(r, p));
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(makespan(r, got) == best);
  }
  FspInstance nine;
  nine.times = Matrix(9, 1, 1.0);
  CHECK_ERROR_KIND(fsp_cluster_permute({{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}}, nine), ErrorKind::Size);
}

TEST_CASE("2-opt never lengthens a tour and leaves a 2-opt local optimum") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + uniform_below(rng, 30);
    const Matrix d = test_matrix(n, rng, true);
    Permutation t = oracle::random_permutation(n, rng);
    const double before = tour_length(d, t);
    const double after = two_opt(t, d);
    REQUIRE(is_permutation(t, n));
    CHECK(after <= before + 1e-9);
    CHECK(after == doctest::Approx(tour_length(d, t)));
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const double a = d(t[i], t[i + 1]) + d(t[j], t[(j + 1) % n]);
        const double b = d(t[i], t[j]) + d(t[i + 1], t[(j + 1) % n]);
        CHECK(b >= a - 1e-9);
      }
  }
}
