#include <doctest.h>

#include <cmath>

#include "check_error.hpp"
#include "oracles.hpp"
#include "permqubo/anneal.hpp"
#include "permqubo/qubo.hpp"

using namespace permqubo;

namespace {

QuboModel random_model(std::size_t n, Rng& rng) {
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = 2.0 * uniform01(rng) - 1.0;
      q(i, j) = v;
      q(j, i) = v;
    }
  return QuboModel::from_dense(q, 0.0);
}

AnnealConfig quick_config(const QuboModel& m, std::uint64_t seed, int sweeps = 0) {
  AnnealConfig cfg = default_anneal_config(m, seed, sweeps);
  cfg.execution = Execution::Serial;
  return cfg;
}

}  // namespace

TEST_CASE("separable model Q = diag(-1, 2)") {
  const QuboModel m = QuboModel::from_dense(Matrix{{-1, 0}, {0, 2}});
  const SolveResult r = solve(m, quick_config(m, 1, 50));
  CHECK(r.best_bits == std::vector<std::uint8_t>{1, 0});
  CHECK(r.best_energy == -1.0);
  const SolveResult b = brute_force(m);
  CHECK(b.best_energy == -1.0);
  CHECK(b.best_bits == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("zero model has zero energy everywhere") {
  const QuboModel m = QuboModel::from_dense(Matrix(5, 5));
  AnnealConfig cfg;
  cfg.sweeps = 20;
  const SolveResult r = solve(m, cfg);
  CHECK(r.best_energy == 0.0);
  CHECK(m.energy(r.best_bits) == 0.0);
}

TEST_CASE("brute force on a nonnegative coupling picks the smallest minimizer") {
  const QuboModel m = QuboModel::from_dense(Matrix{{0, 1}, {1, 0}});
  const SolveResult r = brute_force(m);
  CHECK(r.best_energy == 0.0);
  CHECK(r.best_bits == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("brute force refuses models above the cap") {
  const QuboModel m = QuboModel::from_dense(Matrix(kBruteForceCap + 1, kBruteForceCap + 1));
  CHECK_ERROR_KIND(brute_force(m), ErrorKind::Size);
}

TEST_CASE("brute force agrees with naive enumeration, serial and parallel") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 12);
    const QuboModel m = random_model(n, rng);
    const double expected = oracle::brute_qubo_min(m.to_dense(), m.offset());
    const SolveResult s = brute_force(m, Execution::Serial);
    const SolveResult p = brute_force(m, Execution::Parallel);
    CHECK(s.best_energy == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.best_bits == p.best_bits);
    CHECK(m.energy(s.best_bits) == s.best_energy);
  }
}

TEST_CASE("unit square TSP model at A = 10 reaches energy 4") {
  const Matrix d = TspInstance::from_points("sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}).dist;
  const QuboModel m = build_permutation_qubo(d, 10.0, Topology::Cycle);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SolveResult r = solve(m, quick_config(m, seed, 2000));
    CHECK(r.best_energy == doctest::Approx(4.0));
    CHECK(r.feasible);
    REQUIRE(r.best_feasible_bits);
    CHECK(r.best_feasible_energy == doctest::Approx(4.0));
  }
}

TEST_CASE("incremental deltas track the recomputed energy over 10^4 random flips") {
  Rng rng(5);
  const Matrix d = oracle::random_matrix(6, rng);
  const QuboModel m = build_permutation_qubo(d, 60.0, Topology::Cycle);
  ReplicaState st(m, std::vector<std::uint8_t>(m.size(), 0));
  for (int step = 0; step < 10000; ++step) {
    const auto i = static_cast<std::size_t>(uniform_below(rng, m.size()));
    const double before = st.energy();
    const double predicted = st.delta(i);
    st.flip(i);
    const double exact = m.energy(st.bits());
    REQUIRE(std::abs(st.energy() - exact) <= 1e-9 * (1.0 + std::abs(exact)));
    REQUIRE(std::abs(before + predicted - exact) <= 1e-9 * (1.0 + std::abs(exact)));
    const int expected_violations = [&] {
      int v = 0;
      for (std::size_t r = 0; r < 6; ++r) {
        int row = 0, col = 0;
        for (std::size_t c = 0; c < 6; ++c) {
          row += st.bits()[r * 6 + c];
          col += st.bits()[c * 6 + r];
        }
        v += (row != 1) + (col != 1);
      }
      return v;
    }();
    REQUIRE(st.violations() == expected_violations);
  }
}

TEST_CASE("best-so-far trace is non-increasing and ends at best_energy") {
  Rng rng(6);
  const QuboModel m = random_model(14, rng);
  AnnealConfig cfg = quick_config(m, 3, 300);
  cfg.record_trace = true;
  const SolveResult r = solve(m, cfg);
  REQUIRE(r.energy_trace.size() == 300);
  for (std::size_t s = 1; s < r.energy_trace.size(); ++s) CHECK(r.energy_trace[s] <= r.energy_trace[s - 1]);
  CHECK(r.energy_trace.back() == doctest::Approx(r.best_energy));
  CHECK(r.best_energy == m.energy(r.best_bits));
}

TEST_CASE("deterministic per seed; serial, parallel and dense reference all agree") {
  Rng rng(7);
  const Matrix d = oracle::random_matrix(5, rng);
  const QuboModel m = build_permutation_qubo(d, d.max_abs(), Topology::Cycle);
  AnnealConfig cfg = default_anneal_config(m, 42, 150);
  cfg.execution = Execution::Serial;
  const SolveResult a = solve(m, cfg);
  const SolveResult b = solve(m, cfg);
  cfg.execution = Execution::Parallel;
  const SolveResult c = solve(m, cfg);
  const SolveResult dense = reference::solve_dense(m, cfg);
  CHECK(a.best_bits == b.best_bits);
  CHECK(a.best_bits == c.best_bits);
  CHECK(a.best_bits == dense.best_bits);
  CHECK(a.accepted == c.accepted);
  CHECK(a.accepted == dense.accepted);
  CHECK(a.proposals == static_cast<std::uint64_t>(cfg.replicas) * cfg.sweeps * m.size());
  CHECK(a.replica_best_bits.size() == static_cast<std::size_t>(cfg.replicas));

  cfg.seed = 43;
  const SolveResult other = solve(m, cfg);
  CHECK(other.accepted != a.accepted);
}

TEST_CASE("dynamic offset lets a frozen replica leave a local minimum") {
  // E(00) = 0, E(10) = E(01) = 5, E(11) = -10; 00 is a local minimum.
  const QuboModel m = QuboModel::from_dense(Matrix{{5, -10}, {-10, 5}});
  int escaped_with = 0, escaped_without = 0, trials = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    AnnealConfig cfg;
    cfg.replicas = 1;
    cfg.t_hot = 2e-3;
    cfg.t_cold = 1e-3;  // far too cold to climb a barrier of 5
    cfg.sweeps = 40;
    cfg.seed = seed;
    cfg.execution = Execution::Serial;
    cfg.offset_increment = 0.0;
    const SolveResult frozen = solve(m, cfg);
    cfg.offset_increment = 0.5;
    const SolveResult offset = solve(m, cfg);
    ++trials;
    escaped_without += frozen.best_energy == -10.0;
    escaped_with += offset.best_energy == -10.0;
  }
  CHECK(escaped_with == trials);
  CHECK(escaped_without < trials);  // random starts at 00 stay there
}

TEST_CASE("config validation") {
  const QuboModel m = QuboModel::from_dense(Matrix(2, 2));
  AnnealConfig cfg;
  cfg.replicas = 0;
  CHECK_ERROR_KIND(solve(m, cfg), ErrorKind::Config);
  cfg = AnnealConfig{};
  cfg.t_cold = cfg.t_hot;
  CHECK_ERROR_KIND(solve(m, cfg), ErrorKind::Config);
  cfg = AnnealConfig{};
  cfg.t_cold = 0.0;
  CHECK_ERROR_KIND(solve(m, cfg), ErrorKind::Config);
  cfg = AnnealConfig{};
  cfg.offset_increment = -1.0;
  CHECK_ERROR_KIND(solve(m, cfg), ErrorKind::Config);
}

TEST_CASE("adaptive ladder keeps endpoints and stays deterministic") {
  Rng rng(8);
  const QuboModel m = random_model(16, rng);
  AnnealConfig cfg = quick_config(m, 9, 400);
  cfg.adapt_temperatures = true;
  const SolveResult a = solve(m, cfg);
  const SolveResult b = solve(m, cfg);
  CHECK(a.best_bits == b.best_bits);
  CHECK(a.best_energy >= brute_force(m).best_energy - 1e-9);
}
