#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "check_error.hpp"
#include "oracles.hpp"
#include "permqubo/fsp.hpp"

using namespace permqubo;

namespace {

FspInstance make(Matrix t) {
  FspInstance f;
  f.name = "t";
  f.times = std::move(t);
  return f;
}

FspInstance random_fsp(std::size_t n, std::size_t m, Rng& rng) {
  Matrix t(n, m);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) t(j, i) = static_cast<double>(1 + uniform_below(rng, 99));
  return make(std::move(t));
}

}  // namespace

TEST_CASE("makespan examples") {
  CHECK(makespan(make(Matrix{{2, 3}}), Permutation{0}) == 5.0);
  const FspInstance two = make(Matrix{{1, 2}, {2, 1}});
  CHECK(makespan(two, Permutation{0, 1}) == 4.0);
  CHECK(makespan(two, Permutation{1, 0}) == 5.0);
  CHECK_ERROR_KIND(makespan(two, Permutation{0, 0}), ErrorKind::InvalidSolution);
  CHECK_ERROR_KIND(makespan(two, Permutation{0}), ErrorKind::InvalidSolution);
}

TEST_CASE("makespan agrees with the longest-path oracle and its lower bounds") {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 8), m = 1 + uniform_below(rng, 5);
    const FspInstance f = random_fsp(n, m, rng);
    const Permutation p = oracle::random_permutation(n, rng);
    const double c = makespan(f, p);
    CHECK(c == oracle::makespan_longest_path(f.times, p));
    double max_machine = 0.0, max_job = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += f.times(j, i);
      max_machine = std::max(max_machine, s);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += f.times(j, i);
      max_job = std::max(max_job, s);
    }
    CHECK(c >= max_machine);
    CHECK(c >= max_job);
    if (n == 1) CHECK(c == max_job);
  }
}

TEST_CASE("distance formulations on the two-job example") {
  const FspInstance f = make(Matrix{{1, 2}, {3, 1}});
  CHECK(job_distance_matrix(f, DistanceFormulation::ResidualNoCarry)(0, 1) == 2.0);
  CHECK(job_distance_matrix(f, DistanceFormulation::Spirit)(0, 1) == 2.0);
  CHECK(job_distance_matrix(f, DistanceFormulation::ResidualSquare)(0, 1) == 1.0);
  // Following job 0 by job 1: the second machine idles for max(0, 3 - 2) = 1.
  CHECK(job_distance_matrix(f, DistanceFormulation::Fshoph)(0, 1) == 1.0);
}

TEST_CASE("distance matrices are nonnegative with a zero diagonal") {
  Rng rng(2);
  for (auto kind : {DistanceFormulation::ResidualSquare, DistanceFormulation::ResidualNoCarry,
                    DistanceFormulation::Spirit, DistanceFormulation::Fshoph}) {
    CHECK(parse_distance_formulation(to_string(kind)) == kind);
    for (int trial = 0; trial < 20; ++trial) {
      const FspInstance f = random_fsp(2 + uniform_below(rng, 10), 2 + uniform_below(rng, 5), rng);
      const Matrix d = job_distance_matrix(f, kind);
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
          CHECK(d(i, j) >= 0.0);
          if (i == j) CHECK(d(i, j) == 0.0);
        }
    }
  }
  CHECK(parse_distance_formulation("residual_no_carry") == DistanceFormulation::ResidualNoCarry);
  CHECK_FALSE(parse_distance_formulation("manhattan"));
}

TEST_CASE("residual distances need two machines") {
  const FspInstance f = make(Matrix{{1}, {2}});
  CHECK_ERROR_KIND(job_distance_matrix(f, DistanceFormulation::ResidualSquare), ErrorKind::Domain);
  CHECK_ERROR_KIND(job_distance_matrix(f, DistanceFormulation::ResidualNoCarry), ErrorKind::Domain);
  CHECK(job_distance_matrix(f, DistanceFormulation::Spirit).rows() == 2);
}

TEST_CASE("NEH examples") {
  const ScheduleResult one = neh(make(Matrix{{4, 5, 6}}));
  CHECK(one.order == Permutation{0});
  CHECK(one.makespan == 15.0);
  const ScheduleResult two = neh(make(Matrix{{1, 2}, {2, 1}}));
  CHECK(two.order == Permutation{0, 1});
  CHECK(two.makespan == 4.0);
}

TEST_CASE("NEH lies between the optimum and the worst order") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const FspInstance f = random_fsp(7, 3, rng);
    const ScheduleResult r = neh(f);
    REQUIRE(is_permutation(r.order, 7));
    CHECK(r.makespan == makespan(f, r.order));
    double worst = 0.0;
    oracle::for_each_permutation(7, [&](const std::vector<int>& p) { worst = std::max(worst, makespan(f, p)); });
    CHECK(r.makespan >= oracle::best_makespan(f.times));
    CHECK(r.makespan <= worst);
  }
}

TEST_CASE("the TSP-optimal job order is no better than the true optimum") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const FspInstance f = random_fsp(6, 3, rng);
    const Matrix d = job_distance_matrix(f, DistanceFormulation::ResidualNoCarry);
    const std::vector<int> cycle = oracle::best_cycle_tour(d);
    const ScheduleResult rot = best_rotation(f, cycle);
    CHECK(rot.makespan >= oracle::best_makespan(f.times));
  }
}

TEST_CASE("best rotation") {
  const FspInstance two = make(Matrix{{1, 2}, {2, 1}});
  const ScheduleResult r = best_rotation(two, Permutation{1, 0});
  CHECK(r.order == Permutation{0, 1});
  CHECK(r.makespan == 4.0);
  Rng rng(5);
  const FspInstance f = random_fsp(6, 4, rng);
  const Permutation cyc = oracle::random_permutation(6, rng);
  const ScheduleResult b = best_rotation(f, cyc);
  for (std::size_t s = 0; s < 6; ++s) {
    Permutation rot(6);
    for (std::size_t j = 0; j < 6; ++j) rot[j] = cyc[(s + j) % 6];
    CHECK(b.makespan <= makespan(f, rot));
  }
  CHECK_ERROR_KIND(best_rotation(two, Permutation{0}), ErrorKind::InvalidSolution);
}
