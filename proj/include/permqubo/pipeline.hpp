#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permqubo/anneal.hpp"
#include "permqubo/fsp.hpp"
#include "permqubo/instances.hpp"
#include "permqubo/stitch.hpp"
#include "permqubo/tune.hpp"

namespace permqubo {

enum class ProblemKind { Tsp, Fsp };

/// Which matrix the tuner's D_max is read from.
enum class PenaltyScale { Original, Scaled };

/// Paper FSP penalty sweeps (level-one zoom over a fixed grid).
enum class FspGrid { None, Small, Large };

struct AnnealSettings {
  int replicas = 0;  // 0 keeps the default_anneal_config value
  int sweeps = 0;    // 0 keeps the default_anneal_config value
  // When set, sweeps are chosen so replicas * sweeps * size reaches this many proposals.
  std::optional<std::uint64_t> proposal_budget;
};

struct PipelineConfig {
  int tau = 7;
  int mu = 30;
  std::optional<int> k;
  bool scaling = true;
  PenaltyScale penalty_scale = PenaltyScale::Scaled;
  TunerConfig tuner;  // d_max is filled in per sub-problem
  // Skip tuning and use A = fixed_penalty_ratio * D_max.
  std::optional<double> fixed_penalty_ratio;
  bool tune_per_cluster = false;
  AnnealSettings anneal;
  DistanceFormulation distance = DistanceFormulation::ResidualNoCarry;
  FspGrid fsp_grid = FspGrid::None;
  bool final_two_opt = false;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;

  void validate() const;
};

struct StageTimes {
  double partition = 0.0;
  double scaling = 0.0;
  double tuning = 0.0;
  double solve = 0.0;
  double stitch = 0.0;
  double total = 0.0;
};

struct PipelineReport {
  std::string instance;
  ProblemKind problem = ProblemKind::Tsp;
  std::size_t size = 0;
  Permutation solution;
  double objective = 0.0;
  std::optional<double> reference;
  std::optional<double> gap;  // (objective - reference) / reference
  std::optional<double> neh_makespan;
  std::optional<double> gap_vs_neh;
  StageTimes times;
  std::string tuner;
  std::vector<Trial> trials;
  double penalty = 0.0;  // A used for the representative cluster
  double d_max = 0.0;
  std::vector<int> cluster_sizes;
  bool scaling = false;
  std::uint64_t seed = 0;
  std::uint64_t proposals = 0;  // annealer bit-flip proposals over the whole run
  int raw_infeasible = 0;       // annealer outputs that needed projection
};

PipelineReport solve_tsp(const TspInstance& inst, const PipelineConfig& cfg);
PipelineReport solve_fsp(const FspInstance& inst, const PipelineConfig& cfg);

/// Direct baseline: one QUBO over the whole instance, A = D_max, no scaling,
/// no tuning, with the given proposal budget.
PipelineReport solve_tsp_direct(const TspInstance& inst, std::uint64_t proposal_budget, const PipelineConfig& cfg);

/// Thread count from PERMQUBO_THREADS, if set and positive.
std::optional<int> env_thread_count();
/// Applies env_thread_count() to the OpenMP runtime.
void apply_thread_env();

std::string report_csv_header();
/// Full report, including tuner trials, as pretty-printed JSON.
std::string report_json(const PipelineReport& r, const std::string& label);
std::string report_csv_row(const PipelineReport& r, const std::string& label);

struct BenchmarkEntry {
  ProblemKind problem = ProblemKind::Tsp;
  std::string path;
  std::optional<double> reference;
};

/// CSV manifest with header "problem,path,reference"; paths are relative to
/// the manifest. Blank lines and lines starting with '#' are skipped.
std::vector<BenchmarkEntry> read_manifest(const std::string& path);

struct BenchmarkConfig {
  std::string label;
  PipelineConfig pipeline;
};

struct BenchmarkOptions {
  std::vector<BenchmarkConfig> configs;
  int seeds = 1;
  bool compare_direct = false;   // adds a direct run at the hybrid's proposal count
  bool compare_scaling = false;  // adds a scaling-off twin of every config
  std::string out_dir;
};

struct BenchmarkSummary {
  std::size_t rows = 0;
  std::vector<std::string> missing;
  std::vector<std::string> failures;
};

/// Writes runs.csv, aggregates.csv and runs.json into out_dir.
BenchmarkSummary run_benchmark(const std::string& manifest, const BenchmarkOptions& options);

}  // namespace permqubo
