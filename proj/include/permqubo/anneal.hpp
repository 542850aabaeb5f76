#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "permqubo/qubo.hpp"

namespace permqubo {

enum class Execution { Serial, Parallel };

/// Parallel-tempering bit-flip annealer settings. Temperatures are in energy
/// units; replica r starts at the r-th rung of a geometric ladder from t_hot
/// down to t_cold.
struct AnnealConfig {
  int replicas = 8;
  double t_hot = 1.0;
  double t_cold = 0.01;
  int sweeps = 1000;       // per replica
  int swap_interval = 10;  // sweeps between replica-exchange rounds
  double offset_increment = 0.001;
  std::uint64_t seed = 0;
  bool adapt_temperatures = false;
  bool record_trace = false;
  // States of this many coldest rungs are copied into SolveResult::snapshots
  // at every exchange barrier and at the end of the run.
  int snapshot_rungs = 0;
  Execution execution = Execution::Parallel;

  void validate() const;
};

/// Ladder, offset and sweep defaults scaled to the model's energy deltas.
/// `sweeps` of 0 picks a size-based budget.
AnnealConfig default_anneal_config(const QuboModel& model, std::uint64_t seed, int sweeps = 0);

struct SolveResult {
  std::vector<std::uint8_t> best_bits;
  double best_energy = 0.0;
  // Global best-so-far after each sweep, only when AnnealConfig::record_trace.
  std::vector<double> energy_trace;
  bool feasible = false;  // permutation models: best_bits is a permutation matrix
  // Lowest-energy permutation matrix visited (permutation models only).
  std::optional<std::vector<std::uint8_t>> best_feasible_bits;
  double best_feasible_energy = 0.0;
  // Lowest-energy state of each replica, in replica order.
  std::vector<std::vector<std::uint8_t>> replica_best_bits;
  // Barrier snapshots (see AnnealConfig::snapshot_rungs); a state equal to the
  // previous snapshot of the same rung is not stored again.
  std::vector<std::vector<std::uint8_t>> snapshots;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;

  BinarySolution best_solution(std::size_t n) const { return BinarySolution(n, best_bits); }
};

SolveResult solve(const QuboModel& model, const AnnealConfig& cfg);

/// Exhaustive minimum over all 2^N bitstrings; N <= kBruteForceCap.
/// Ties resolve to the smallest bitstring read as an integer with bit i = x_i.
inline constexpr std::size_t kBruteForceCap = 24;
SolveResult brute_force(const QuboModel& model, Execution execution = Execution::Parallel);

/// Step-by-step replica used by solve(); exposed so tests can audit the
/// incremental bookkeeping flip by flip.
class ReplicaState {
 public:
  ReplicaState(const QuboModel& model, std::vector<std::uint8_t> bits);

  double energy() const noexcept { return energy_; }
  double delta(std::size_t i) const noexcept { return bits_[i] ? -field_[i] : field_[i]; }
  void flip(std::size_t i) noexcept;
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  /// Number of rows plus columns whose sum differs from one (permutation models).
  int violations() const noexcept { return violations_; }

 private:
  void adjust_line(int& sum, int change) noexcept;

  const QuboModel* model_;
  std::vector<std::uint8_t> bits_;
  std::vector<double> field_;
  double energy_ = 0.0;
  std::size_t n_objects_ = 0;
  std::vector<int> row_sum_;
  std::vector<int> col_sum_;
  int violations_ = 0;
};

namespace reference {
/// Straight-line serial annealer: same schedule and random streams as solve(),
/// but every delta is recomputed from the dense matrix. Test-only oracle.
SolveResult solve_dense(const QuboModel& model, const AnnealConfig& cfg);
}  // namespace reference

}  // namespace permqubo
