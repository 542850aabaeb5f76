#include <doctest.h>

#include <cmath>

#include "check_error.hpp"
#include "oracles.hpp"
#include "permqubo/repair.hpp"

using namespace permqubo;

TEST_CASE("hungarian examples") {
  const Assignment one = hungarian(Matrix{{5}});
  CHECK(one.row_to_col == std::vector<int>{0});
  CHECK(one.total == 5.0);

  const Assignment two = hungarian(Matrix{{1, 2}, {2, 1}});
  CHECK(two.row_to_col == std::vector<int>{0, 1});
  CHECK(two.total == 2.0);

  const Assignment three = hungarian(Matrix{{1, 2, 3}, {2, 4, 6}, {3, 6, 9}});
  CHECK(three.row_to_col == std::vector<int>{2, 1, 0});
  CHECK(three.total == 10.0);
}

TEST_CASE("hungarian errors") {
  CHECK_ERROR_KIND(hungarian(Matrix(2, 3)), ErrorKind::Dimension);
  CHECK_ERROR_KIND(hungarian(Matrix{{1, NAN}, {0, 1}}), ErrorKind::Domain);
  CHECK_ERROR_KIND(hungarian(Matrix{{1, INFINITY}, {0, 1}}), ErrorKind::Domain);
}

TEST_CASE("hungarian matches brute force on random real costs, n <= 8") {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 8);
    const Matrix c = oracle::random_matrix(n, rng, -50.0, 50.0, false);
    const Assignment a = hungarian(c);
    const oracle::AssignmentOracle o = oracle::brute_assignment(c);
    REQUIRE(is_permutation(a.row_to_col, n));
    double recomputed = 0.0;
    for (std::size_t i = 0; i < n; ++i) recomputed += c(i, a.row_to_col[i]);
    CHECK(recomputed == doctest::Approx(a.total).epsilon(1e-12));
    CHECK(a.total == doctest::Approx(o.total).epsilon(1e-12));
  }
}

TEST_CASE("hungarian breaks ties toward the lexicographically smallest assignment") {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 7);
    // Small integer costs produce many ties.
    const Matrix c = oracle::random_int_matrix(n, rng, 0, 2, false);
    CHECK(hungarian(c).row_to_col == oracle::brute_assignment(c).first_argmin);
  }
  CHECK(hungarian(Matrix(4, 4, 1.0)).row_to_col == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("rectangular assignment") {
  const Assignment a = rectangular_assignment(Matrix{{5, 1, 9}, {1, 7, 9}});
  CHECK(a.row_to_col == std::vector<int>{1, 0});
  CHECK(a.total == 2.0);
  CHECK_ERROR_KIND(rectangular_assignment(Matrix(3, 2)), ErrorKind::Dimension);
}

TEST_CASE("capacitated assignment respects bounds and is optimal") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 6);
    const int k = 2;
    const int lower = static_cast<int>(uniform_below(rng, n / 2 + 1));
    const int upper = std::max<int>(static_cast<int>(n) - lower, lower);
    Matrix c(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (int g = 0; g < k; ++g) c(i, g) = 10.0 * uniform01(rng);
    const std::vector<int> labels = capacitated_assignment(c, lower, upper);
    std::vector<int> sizes(k, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[labels[i]];
      total += c(i, labels[i]);
    }
    for (int s : sizes) {
      CHECK(s >= lower);
      CHECK(s <= upper);
    }
    double best = 1e300;
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
      double t = 0.0;
      int ones = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const int g = (code >> i) & 1;
        ones += g;
        t += c(i, g);
      }
      const int zeros = static_cast<int>(n) - ones;
      if (ones >= lower && ones <= upper && zeros >= lower && zeros <= upper) best = std::min(best, t);
    }
    CHECK(total == doctest::Approx(best));
  }
  CHECK_ERROR_KIND(capacitated_assignment(Matrix(5, 2), 3, 4), ErrorKind::Capacity);
  CHECK_ERROR_KIND(capacitated_assignment(Matrix(5, 2), 0, 2), ErrorKind::Capacity);
}

TEST_CASE("projection examples") {
  SUBCASE("a permutation matrix projects to itself") {
    const BinarySolution z = BinarySolution::from_permutation(Permutation{2, 0, 1});
    const Projection p = project(z);
    CHECK(p.bits == z);
    CHECK(p.order == Permutation{2, 0, 1});
    CHECK(p.distance == 0);
  }
  SUBCASE("all ones 2x2") {
    BinarySolution z(2);
    for (std::size_t v = 0; v < 2; ++v)
      for (std::size_t j = 0; j < 2; ++j) z.set(v, j, true);
    const Projection p = project(z);
    CHECK(p.distance == 2);
    CHECK(p.order == Permutation{0, 1});
  }
  SUBCASE("one full row") {
    BinarySolution z(2);
    z.set(0, 0, true);
    z.set(0, 1, true);
    const Projection p = project(z);
    CHECK(p.distance == 2);
    CHECK(p.order == Permutation{0, 1});
  }
}

TEST_CASE("projection attains the exhaustive nearest permutation, n <= 6") {
  Rng rng(4);
  for (std::size_t n = 1; n <= 6; ++n)
    for (int trial = 0; trial < 60; ++trial) {
      const BinarySolution z = oracle::random_binary(n, rng, uniform01(rng));
      const Projection p = project(z);
      REQUIRE(is_feasible(p.bits));
      int hamming = 0;
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t j = 0; j < n; ++j) hamming += p.bits(v, j) != z(v, j);
      CHECK(hamming == p.distance);
      CHECK(p.distance == oracle::nearest_permutation_distance(z));
      CHECK(decode(p.bits) == p.order);
    }
}

TEST_CASE("projection is idempotent") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const BinarySolution z = oracle::random_binary(2 + uniform_below(rng, 8), rng);
    const Projection once = project(z);
    const Projection twice = project(once.bits);
    CHECK(twice.bits == once.bits);
    CHECK(twice.distance == 0);
  }
}
