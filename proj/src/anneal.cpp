#include "permqubo/anneal.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>

#include "permqubo/error.hpp"
#include "permqubo/rng.hpp"

namespace permqubo {

void AnnealConfig::validate() const {
  require(replicas >= 1, ErrorKind::Config, "replicas must be >= 1");
  require(t_cold > 0.0 && t_hot > t_cold, ErrorKind::Config, "need t_hot > t_cold > 0");
  require(sweeps >= 1, ErrorKind::Config, "sweeps must be >= 1");
  require(swap_interval >= 1, ErrorKind::Config, "swap_interval must be >= 1");
  require(offset_increment >= 0.0, ErrorKind::Config, "offset_increment must be >= 0");
  require(snapshot_rungs >= 0, ErrorKind::Config, "snapshot_rungs must be >= 0");
}

ReplicaState::ReplicaState(const QuboModel& model, std::vector<std::uint8_t> bits)
    : model_(&model), bits_(std::move(bits)), field_(model.size()), n_objects_(model.n_objects()) {
  require(bits_.size() == model.size(), ErrorKind::Dimension, "initial state length mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    double h = model.diagonal(i);
    for (const auto& e : model.neighbors(i))
      if (bits_[e.col]) h += 2.0 * e.value;
    field_[i] = h;
  }
  energy_ = model.energy(bits_);
  if (n_objects_ > 0) {
    row_sum_.assign(n_objects_, 0);
    col_sum_.assign(n_objects_, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) {
        ++row_sum_[i / n_objects_];
        ++col_sum_[i % n_objects_];
      }
    violations_ = 0;
    for (std::size_t v = 0; v < n_objects_; ++v) violations_ += (row_sum_[v] != 1) + (col_sum_[v] != 1);
  }
}

void ReplicaState::adjust_line(int& sum, int change) noexcept {
  violations_ -= (sum != 1);
  sum += change;
  violations_ += (sum != 1);
}

void ReplicaState::flip(std::size_t i) noexcept {
  energy_ += delta(i);
  const double s = bits_[i] ? -2.0 : 2.0;
  bits_[i] ^= 1;
  for (const auto& e : model_->neighbors(i)) field_[e.col] += s * e.value;
  if (n_objects_ > 0) {
    const int change = bits_[i] ? 1 : -1;
    adjust_line(row_sum_[i / n_objects_], change);
    adjust_line(col_sum_[i % n_objects_], change);
  }
}

namespace {

std::vector<std::uint8_t> random_start(const QuboModel& model, Rng& rng) {
  std::vector<std::uint8_t> bits(model.size(), 0);
  if (model.is_permutation_model()) {
    const std::size_t n = model.n_objects();
    Permutation order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle_in_place(order, rng);
    for (std::size_t j = 0; j < n; ++j) bits[flat_index(order[j], j, n)] = 1;
  } else {
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  }
  return bits;
}

std::vector<double> geometric_ladder(const AnnealConfig& cfg) {
  std::vector<double> t(cfg.replicas);
  if (cfg.replicas == 1) {
    t[0] = cfg.t_cold;
    return t;
  }
  const double ratio = std::log(cfg.t_cold / cfg.t_hot) / (cfg.replicas - 1);
  for (int r = 0; r < cfg.replicas; ++r) t[r] = cfg.t_hot * std::exp(ratio * r);
  t.back() = cfg.t_cold;
  return t;
}

// Moves more than kRejectCutoff temperatures uphill (acceptance < 1e-13) are
// rejected without drawing a random number.
constexpr double kRejectCutoff = 30.0;

// Deltas within `tol` of zero count as downhill so that kernels whose
// floating-point rounding differs still consume the same random numbers.
inline bool metropolis(double effective_delta, double inv_temperature, Rng& rng, double tol) {
  if (effective_delta <= tol) return true;
  const double x = effective_delta * inv_temperature;
  return x < kRejectCutoff && uniform01(rng) < std::exp(-x);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Replica bookkeeping shared by the sparse kernel and the dense reference.
struct ReplicaRecord {
  Rng rng;
  double offset = 0.0;
  std::vector<std::uint8_t> best_bits;
  double best_energy = kInf;
  std::vector<std::uint8_t> best_feasible_bits;
  double best_feasible_energy = kInf;
  std::vector<double> sweep_best;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

// Exchange rounds and temperature adaptation; identical for every kernel.
class TemperatureLadder {
 public:
  TemperatureLadder(const AnnealConfig& cfg, std::size_t size_hint)
      : cfg_(cfg), temps_(geometric_ladder(cfg)), replica_at_(cfg.replicas), rung_of_(cfg.replicas),
        attempts_(std::max(cfg.replicas - 1, 0), 0), accepts_(std::max(cfg.replicas - 1, 0), 0),
        rng_(make_stream(cfg.seed, static_cast<std::uint64_t>(cfg.replicas) + (size_hint << 20))) {
    std::iota(replica_at_.begin(), replica_at_.end(), 0);
    std::iota(rung_of_.begin(), rung_of_.end(), 0);
  }

  double temperature_of(int replica) const { return temps_[rung_of_[replica]]; }
  int replica_at(int rung) const { return replica_at_[rung]; }

  template <typename EnergyOf>
  void exchange(EnergyOf energy_of, double tol) {
    for (int t = round_ % 2; t + 1 < cfg_.replicas; t += 2) {
      const int a = replica_at_[t];
      const int b = replica_at_[t + 1];
      double gap = energy_of(a) - energy_of(b);
      if (std::abs(gap) <= tol) gap = 0.0;
      const double arg = (1.0 / temps_[t] - 1.0 / temps_[t + 1]) * gap;
      ++attempts_[t];
      if (arg >= 0.0 || uniform01(rng_) < std::exp(arg)) {
        ++accepts_[t];
        std::swap(replica_at_[t], replica_at_[t + 1]);
        rung_of_[replica_at_[t]] = t;
        rung_of_[replica_at_[t + 1]] = t + 1;
      }
    }
    ++round_;
    if (cfg_.adapt_temperatures && cfg_.replicas > 2 && round_ % 20 == 0) adapt();
  }

 private:
  // Widen log-spacing where neighbours swap often, shrink it where they rarely do;
  // the endpoints stay fixed.
  void adapt() {
    const int gaps = cfg_.replicas - 1;
    std::vector<double> spacing(gaps);
    double total = 0.0;
    for (int g = 0; g < gaps; ++g) {
      const double rate = attempts_[g] ? static_cast<double>(accepts_[g]) / attempts_[g] : 0.0;
      spacing[g] = std::log(temps_[g] / temps_[g + 1]) * (0.5 + rate);
      total += spacing[g];
    }
    const double span = std::log(cfg_.t_hot / cfg_.t_cold);
    double log_t = std::log(cfg_.t_hot);
    for (int g = 0; g < gaps; ++g) {
      log_t -= spacing[g] / total * span;
      temps_[g + 1] = std::exp(log_t);
    }
    temps_.front() = cfg_.t_hot;
    temps_.back() = cfg_.t_cold;
    std::fill(attempts_.begin(), attempts_.end(), 0);
    std::fill(accepts_.begin(), accepts_.end(), 0);
  }

  const AnnealConfig& cfg_;
  std::vector<double> temps_;
  std::vector<int> replica_at_;
  std::vector<int> rung_of_;
  std::vector<std::uint64_t> attempts_;
  std::vector<std::uint64_t> accepts_;
  Rng rng_;
  int round_ = 0;
};

// Drives `Kernel` (one state per replica) through the schedule. Kernel needs
// energy(), violations(), bits(), delta(i) and flip(i).
template <typename State, typename MakeState>
SolveResult run_schedule(const QuboModel& model, const AnnealConfig& cfg, MakeState make_state, bool parallel) {
  cfg.validate();
  const std::size_t size = model.size();
  const int replicas = cfg.replicas;
  const bool perm = model.is_permutation_model();
  double coefficient_scale = std::abs(model.offset());
  for (std::size_t i = 0; i < size; ++i) {
    coefficient_scale = std::max(coefficient_scale, std::abs(model.diagonal(i)));
    for (const auto& e : model.neighbors(i)) coefficient_scale = std::max(coefficient_scale, std::abs(e.value));
  }
  const double tol = 1e-9 * (1.0 + coefficient_scale);

  std::vector<ReplicaRecord> records(replicas);
  std::vector<State> states;
  states.reserve(replicas);
  for (int r = 0; r < replicas; ++r) {
    records[r].rng = make_stream(cfg.seed, static_cast<std::uint64_t>(r));
    states.push_back(make_state(random_start(model, records[r].rng)));
    auto& rec = records[r];
    rec.best_bits = states[r].bits();
    rec.best_energy = states[r].energy();
    if (perm && states[r].violations() == 0) {
      rec.best_feasible_bits = states[r].bits();
      rec.best_feasible_energy = states[r].energy();
    }
  }

  TemperatureLadder ladder(cfg, size);
  SolveResult result;
  if (cfg.record_trace) result.energy_trace.reserve(cfg.sweeps);

  auto run_block = [&](int r, int block) {
    auto& st = states[r];
    auto& rec = records[r];
    const double inv_temperature = 1.0 / ladder.temperature_of(r);
    if (cfg.record_trace) rec.sweep_best.assign(block, kInf);
    for (int s = 0; s < block; ++s) {
      bool any = false;
      for (std::size_t i = 0; i < size; ++i) {
        const double d = st.delta(i);
        if (!metropolis(d - rec.offset, inv_temperature, rec.rng, tol)) continue;
        st.flip(i);
        any = true;
        rec.offset = 0.0;
        ++rec.accepted;
        const double e = st.energy();
        if (e < rec.best_energy - tol) {
          rec.best_energy = e;
          rec.best_bits = st.bits();
        }
        if (perm && st.violations() == 0 && e < rec.best_feasible_energy - tol) {
          rec.best_feasible_energy = e;
          rec.best_feasible_bits = st.bits();
        }
      }
      rec.proposals += size;
      if (!any) rec.offset += cfg.offset_increment;
      if (cfg.record_trace) rec.sweep_best[s] = rec.best_energy;
    }
  };

  const int snapshot_rungs = std::min(cfg.snapshot_rungs, replicas);
  std::vector<std::size_t> last_snapshot(snapshot_rungs, SIZE_MAX);
  auto take_snapshots = [&] {
    for (int k = 0; k < snapshot_rungs; ++k) {
      const auto& bits = states[ladder.replica_at(replicas - 1 - k)].bits();
      if (last_snapshot[k] != SIZE_MAX && result.snapshots[last_snapshot[k]] == bits) continue;
      last_snapshot[k] = result.snapshots.size();
      result.snapshots.push_back(bits);
    }
  };

  for (int done = 0; done < cfg.sweeps;) {
    const int block = std::min(cfg.swap_interval, cfg.sweeps - done);
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int r = 0; r < replicas; ++r) run_block(r, block);
    } else {
      for (int r = 0; r < replicas; ++r) run_block(r, block);
    }
    if (cfg.record_trace) {
      double running = result.energy_trace.empty() ? kInf : result.energy_trace.back();
      for (int s = 0; s < block; ++s) {
        for (const auto& rec : records) running = std::min(running, rec.sweep_best[s]);
        result.energy_trace.push_back(running);
      }
    }
    done += block;
    take_snapshots();
    if (done < cfg.sweeps) ladder.exchange([&](int r) { return states[r].energy(); }, tol);
  }

  // Merge in replica order; strict comparison keeps the lowest replica index on ties.
  int best = 0;
  for (int r = 1; r < replicas; ++r)
    if (records[r].best_energy < records[best].best_energy - tol) best = r;
  result.best_bits = records[best].best_bits;
  result.best_energy = model.energy(result.best_bits);

  if (perm) {
    int bf = -1;
    for (int r = 0; r < replicas; ++r)
      if (!records[r].best_feasible_bits.empty() &&
          (bf < 0 || records[r].best_feasible_energy < records[bf].best_feasible_energy - tol))
        bf = r;
    if (bf >= 0) {
      result.best_feasible_bits = records[bf].best_feasible_bits;
      result.best_feasible_energy = model.energy(*result.best_feasible_bits);
    }
    BinarySolution x(model.n_objects(), result.best_bits);
    result.feasible = is_feasible(x);
  }
  result.replica_best_bits.reserve(records.size());
  for (auto& rec : records) {
    result.replica_best_bits.push_back(std::move(rec.best_bits));
    result.proposals += rec.proposals;
    result.accepted += rec.accepted;
  }
  return result;
}

// Reference state: deltas from the dense matrix, energy re-summed after each flip.
class DenseState {
 public:
  DenseState(const QuboModel& model, const Matrix& dense, std::vector<std::uint8_t> bits)
      : model_(&model), dense_(&dense), bits_(std::move(bits)) {
    energy_ = model.energy(bits_);
  }
  double energy() const { return energy_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  double delta(std::size_t i) const {
    const auto& q = *dense_;
    double h = q(i, i);
    for (std::size_t j = 0; j < bits_.size(); ++j)
      if (j != i && bits_[j]) h += q(i, j) + q(j, i);
    return bits_[i] ? -h : h;
  }
  void flip(std::size_t i) {
    energy_ += delta(i);
    bits_[i] ^= 1;
  }
  int violations() const {
    const std::size_t n = model_->n_objects();
    if (n == 0) return 0;
    BinarySolution x(n, bits_);
    return is_feasible(x) ? 0 : 1;
  }

 private:
  const QuboModel* model_;
  const Matrix* dense_;
  std::vector<std::uint8_t> bits_;
  double energy_ = 0.0;
};

}  // namespace

AnnealConfig default_anneal_config(const QuboModel& model, std::uint64_t seed, int sweeps) {
  AnnealConfig cfg;
  cfg.seed = seed;
  // Sample single-flip deltas from a few random starts to set the energy scale.
  Rng rng = make_stream(seed, 0xD1A6ULL);
  std::vector<double> uphill;
  for (int k = 0; k < 4; ++k) {
    ReplicaState st(model, random_start(model, rng));
    for (std::size_t i = 0; i < model.size(); ++i) {
      const double d = st.delta(i);
      if (d > 0.0) uphill.push_back(d);
    }
  }
  double scale = 1.0;
  if (!uphill.empty()) {
    std::sort(uphill.begin(), uphill.end());
    scale = uphill[uphill.size() / 2];
  }
  cfg.replicas = 16;
  cfg.t_hot = 0.175 * scale;
  cfg.t_cold = 0.0185 * scale;
  cfg.offset_increment = 0.1 * cfg.t_cold;
  // About 2.7e6 proposals per replica: 3000 sweeps at 900 variables.
  cfg.sweeps = sweeps > 0 ? sweeps
                          : static_cast<int>(std::clamp<std::size_t>(2700000 / std::max<std::size_t>(model.size(), 1), 500, 5000));
  return cfg;
}

SolveResult solve(const QuboModel& model, const AnnealConfig& cfg) {
  auto make = [&](std::vector<std::uint8_t> bits) { return ReplicaState(model, std::move(bits)); };
  return run_schedule<ReplicaState>(model, cfg, make, cfg.execution == Execution::Parallel);
}

namespace reference {
SolveResult solve_dense(const QuboModel& model, const AnnealConfig& cfg) {
  const Matrix dense = model.to_dense();
  auto make = [&](std::vector<std::uint8_t> bits) { return DenseState(model, dense, std::move(bits)); };
  return run_schedule<DenseState>(model, cfg, make, false);
}
}  // namespace reference

SolveResult brute_force(const QuboModel& model, Execution execution) {
  const std::size_t n = model.size();
  require(n <= kBruteForceCap, ErrorKind::Size,
          "brute force is capped at " + std::to_string(kBruteForceCap) + " variables, got " + std::to_string(n));
  const Matrix q = model.to_dense();
  if (n == 0) {
    SolveResult r;
    r.best_energy = model.offset();
    return r;
  }

  // 2^hi chunks, each enumerated by Gray code over the low bits with an O(n)
  // local-field update per step.
  const std::size_t hi = std::min<std::size_t>(n, 6);
  const std::size_t lo = n - hi;
  const std::uint64_t chunks = 1ULL << hi;
  std::vector<double> chunk_best(chunks, kInf);
  std::vector<std::uint64_t> chunk_code(chunks, 0);

  auto scan = [&](std::uint64_t c) {
    std::vector<std::uint8_t> x(n, 0);
    for (std::size_t b = 0; b < hi; ++b) x[lo + b] = (c >> b) & 1;
    std::vector<double> field(n);
    for (std::size_t i = 0; i < n; ++i) {
      double h = q(i, i);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && x[j]) h += 2.0 * q(i, j);
      field[i] = h;
    }
    double e = model.energy(x);
    std::uint64_t code = c << lo;
    double best = e;
    std::uint64_t best_code = code;
    const double tol = 1e-9 * (1.0 + std::abs(e));
    const std::uint64_t steps = 1ULL << lo;
    for (std::uint64_t g = 1; g < steps; ++g) {
      const auto bit = static_cast<std::size_t>(__builtin_ctzll(g));
      const double s = x[bit] ? -1.0 : 1.0;
      e += s * field[bit];
      x[bit] ^= 1;
      code ^= 1ULL << bit;
      for (std::size_t j = 0; j < n; ++j)
        if (j != bit) field[j] += 2.0 * s * q(j, bit);
      if (e < best - tol || (e <= best + tol && code < best_code)) {
        best = e;
        best_code = code;
      }
    }
    chunk_best[c] = best;
    chunk_code[c] = best_code;
  };

  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) scan(static_cast<std::uint64_t>(c));
  } else {
    for (std::uint64_t c = 0; c < chunks; ++c) scan(c);
  }

  // Incremental energies drift slightly; re-evaluate near-ties exactly before choosing.
  double best = kInf;
  for (double v : chunk_best) best = std::min(best, v);
  const double tol = 1e-9 * (1.0 + std::abs(best));
  SolveResult result;
  result.best_energy = kInf;
  std::uint64_t best_code = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    if (chunk_best[c] > best + tol) continue;
    std::vector<std::uint8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (chunk_code[c] >> i) & 1;
    const double e = model.energy(x);
    if (e < result.best_energy - tol || (std::abs(e - result.best_energy) <= tol && chunk_code[c] < best_code)) {
      result.best_energy = e;
      result.best_bits = std::move(x);
      best_code = chunk_code[c];
    }
  }
  result.proposals = 1ULL << n;
  if (model.is_permutation_model()) {
    result.feasible = is_feasible(BinarySolution(model.n_objects(), result.best_bits));
    if (result.feasible) {
      result.best_feasible_bits = result.best_bits;
      result.best_feasible_energy = result.best_energy;
    }
  }
  return result;
}

}  // namespace permqubo
