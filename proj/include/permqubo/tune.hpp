#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "permqubo/anneal.hpp"
#include "permqubo/rng.hpp"

namespace permqubo {

enum class TunerMethod { Uniform, Normal, Pso, Zoom };

std::string to_string(TunerMethod m);
std::optional<TunerMethod> parse_tuner_method(std::string_view name);

struct PsoParams {
  int particles = 10;
  int iterations = 4;  // the random initialization counts as the first
  double w_max = 0.5, w_min = 0.25;
  double c1_max = 0.5, c1_min = 0.25;
  double c2_max = 0.9, c2_min = 0.6;
  // Optional starting positions in units of A (clamped into range); tests only.
  std::vector<double> initial_positions;
};

struct NormalParams {
  double mean_ratio = 0.7594;
  double var_ratio = 0.0141;
};

struct UniformParams {
  double lo_ratio = 0.5;
  double hi_ratio = 1.0;
};

struct ZoomParams {
  int bins = 4;
  int levels = 3;
  double lo_ratio = 0.5;
  double hi_ratio = 1.0;
};

struct TunerConfig {
  TunerMethod method = TunerMethod::Uniform;
  int budget = 40;
  double d_max = 1.0;
  std::uint64_t seed = 0;
  PsoParams pso;
  NormalParams normal;
  UniformParams uniform;
  ZoomParams zoom;
  Execution execution = Execution::Parallel;

  void validate() const;
};

struct Trial {
  double A = 0.0;
  double objective = 0.0;
};

struct TuneResult {
  double best_A = 0.0;
  double best_objective = 0.0;
  std::vector<Trial> trials;  // in evaluation-index order
  int evaluations_used = 0;
  // Zoom only: the bin chosen at the last level, in units of A.
  std::optional<std::pair<double, double>> final_interval;
};

/// objective(A, trial_index); trial_index is unique within one tuner call so
/// callers can derive per-trial random streams. Must be thread-safe when the
/// tuner runs in parallel.
using TuneObjective = std::function<double(double, int)>;

double sample_uniform(const TunerConfig& cfg, Rng& rng);
/// Scaled normal draw, clamped to stay strictly positive.
double sample_normal(const TunerConfig& cfg, Rng& rng);

/// budget draws from the configured distribution (Uniform or Normal).
TuneResult sampling_search(const TuneObjective& objective, const TunerConfig& cfg);

/// Global-best PSO on [uniform.lo_ratio, uniform.hi_ratio] * d_max with
/// linearly time-varying inertia and acceleration coefficients.
TuneResult pso_search(const TuneObjective& objective, const TunerConfig& cfg);

/// Interval [zoom.lo_ratio, zoom.hi_ratio] * d_max split into bins; level l
/// samples every bin at l + 1 evenly spaced points (the last level also soaks
/// up any remaining budget), then recurses into the bin holding the best trial.
TuneResult zoom_search(const TuneObjective& objective, int bins, int levels, const TunerConfig& cfg);

/// Same as zoom_search but on an explicit interval in units of A.
TuneResult zoom_search_interval(const TuneObjective& objective, double lo, double hi, int bins, int levels,
                                int budget, Execution execution);

/// Dispatch on cfg.method.
TuneResult tune(const TuneObjective& objective, const TunerConfig& cfg);

/// Evenly spaced sweep of A with an objective weight B on the H_B term.
struct GridPreset {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  double objective_weight = 1.0;

  int points() const;
};

/// A in [max d, 1.5 max d] step 5, B = 1.
GridPreset fsp_small_grid(double max_d);
/// A in [2.5 mean d, 2 max d] step 150, B = 2.
GridPreset fsp_large_grid(double mean_d, double max_d);

/// One zoom level whose bins are centred on the grid points.
TuneResult grid_search(const TuneObjective& objective, const GridPreset& grid, Execution execution);

}  // namespace permqubo
