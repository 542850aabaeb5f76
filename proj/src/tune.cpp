#include "permqubo/tune.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "permqubo/error.hpp"

namespace permqubo {

std::string to_string(TunerMethod m) {
  switch (m) {
    case TunerMethod::Uniform: return "uniform";
    case TunerMethod::Normal: return "normal";
    case TunerMethod::Pso: return "pso";
    case TunerMethod::Zoom: return "zoom";
  }
  return "unknown";
}

std::optional<TunerMethod> parse_tuner_method(std::string_view name) {
  for (auto m : {TunerMethod::Uniform, TunerMethod::Normal, TunerMethod::Pso, TunerMethod::Zoom})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

void TunerConfig::validate() const {
  require(budget >= 1, ErrorKind::Config, "tuner budget must be at least 1");
  require(d_max > 0.0 && std::isfinite(d_max), ErrorKind::Domain, "d_max must be positive");
  require(uniform.lo_ratio > 0.0 && uniform.lo_ratio < uniform.hi_ratio, ErrorKind::Config,
          "uniform ratios need 0 < lo < hi");
  require(normal.mean_ratio > 0.0 && normal.var_ratio >= 0.0, ErrorKind::Config, "bad normal ratios");
  require(pso.particles >= 1 && pso.iterations >= 1, ErrorKind::Config, "bad PSO sizes");
  require(zoom.lo_ratio >= 0.0 && zoom.lo_ratio < zoom.hi_ratio, ErrorKind::Config, "bad zoom interval");
}

namespace {

// Smallest A kept by the samplers; the penalty must stay strictly positive.
double positive_floor(const TunerConfig& cfg) { return 1e-9 * cfg.d_max; }

void evaluate_batch(const TuneObjective& objective, std::vector<Trial>& trials, std::size_t first,
                    Execution execution) {
  const auto count = static_cast<long>(trials.size() - first);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::Parallel)
  for (long t = 0; t < count; ++t) {
    const std::size_t idx = first + static_cast<std::size_t>(t);
    try {
      trials[idx].objective = objective(trials[idx].A, static_cast<int>(idx));
    } catch (...) {
#pragma omp critical(permqubo_tune_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

TuneResult summarize(std::vector<Trial> trials) {
  TuneResult r;
  r.evaluations_used = static_cast<int>(trials.size());
  r.best_objective = std::numeric_limits<double>::infinity();
  for (const auto& t : trials)
    if (t.objective < r.best_objective) {
      r.best_objective = t.objective;
      r.best_A = t.A;
    }
  r.trials = std::move(trials);
  return r;
}

}  // namespace

double sample_uniform(const TunerConfig& cfg, Rng& rng) {
  require(cfg.d_max > 0.0, ErrorKind::Domain, "d_max must be positive");
  const double lo = cfg.uniform.lo_ratio, hi = cfg.uniform.hi_ratio;
  return (lo + (hi - lo) * uniform01(rng)) * cfg.d_max;
}

double sample_normal(const TunerConfig& cfg, Rng& rng) {
  require(cfg.d_max > 0.0, ErrorKind::Domain, "d_max must be positive");
  // Box-Muller on uniform01 keeps draws identical across standard libraries.
  const double u1 = uniform01(rng), u2 = uniform01(rng);
  const double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double ratio = cfg.normal.mean_ratio + std::sqrt(cfg.normal.var_ratio) * z;
  return std::max(ratio * cfg.d_max, positive_floor(cfg));
}

TuneResult sampling_search(const TuneObjective& objective, const TunerConfig& cfg) {
  cfg.validate();
  require(cfg.method == TunerMethod::Uniform || cfg.method == TunerMethod::Normal, ErrorKind::Config,
          "sampling search needs the uniform or normal method");
  Rng rng = make_stream(cfg.seed, 0);
  std::vector<Trial> trials(static_cast<std::size_t>(cfg.budget));
  for (auto& t : trials) t.A = cfg.method == TunerMethod::Uniform ? sample_uniform(cfg, rng) : sample_normal(cfg, rng);
  evaluate_batch(objective, trials, 0, cfg.execution);
  return summarize(std::move(trials));
}

TuneResult pso_search(const TuneObjective& objective, const TunerConfig& cfg) {
  cfg.validate();
  const auto& p = cfg.pso;
  require(cfg.budget >= p.particles, ErrorKind::Config, "PSO budget is smaller than the swarm");
  const int iterations = std::min(p.iterations, cfg.budget / p.particles);
  const double lo = cfg.uniform.lo_ratio * cfg.d_max;
  const double hi = cfg.uniform.hi_ratio * cfg.d_max;
  auto clamp = [&](double x) { return std::clamp(x, lo, hi); };

  Rng rng = make_stream(cfg.seed, 0);
  const auto np = static_cast<std::size_t>(p.particles);
  std::vector<double> x(np), v(np, 0.0), pbest(np), pbest_f(np, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < np; ++i) {
    const double u = lo + (hi - lo) * uniform01(rng);
    x[i] = clamp(i < p.initial_positions.size() ? p.initial_positions[i] : u);
  }
  double gbest = x[0], gbest_f = std::numeric_limits<double>::infinity();

  std::vector<Trial> trials;
  for (int it = 0; it < iterations; ++it) {
    if (it > 0) {
      const double frac = iterations > 1 ? static_cast<double>(it) / (iterations - 1) : 0.0;
      const double w = p.w_max - (p.w_max - p.w_min) * frac;
      const double c1 = p.c1_max - (p.c1_max - p.c1_min) * frac;
      const double c2 = p.c2_max - (p.c2_max - p.c2_min) * frac;
      for (std::size_t i = 0; i < np; ++i) {
        const double r1 = uniform01(rng), r2 = uniform01(rng);
        v[i] = w * v[i] + c1 * r1 * (pbest[i] - x[i]) + c2 * r2 * (gbest - x[i]);
        x[i] = clamp(x[i] + v[i]);
      }
    }
    const std::size_t first = trials.size();
    for (std::size_t i = 0; i < np; ++i) trials.push_back({x[i], 0.0});
    evaluate_batch(objective, trials, first, cfg.execution);
    for (std::size_t i = 0; i < np; ++i) {
      const double f = trials[first + i].objective;
      if (f < pbest_f[i]) {
        pbest_f[i] = f;
        pbest[i] = x[i];
      }
      if (f < gbest_f) {
        gbest_f = f;
        gbest = x[i];
      }
    }
  }
  return summarize(std::move(trials));
}

TuneResult zoom_search_interval(const TuneObjective& objective, double lo, double hi, int bins, int levels,
                                int budget, Execution execution) {
  require(bins >= 2 && levels >= 1, ErrorKind::Config, "zoom needs bins >= 2 and levels >= 1");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::Config, "degenerate zoom interval");
  require(lo >= 0.0, ErrorKind::Config, "zoom interval must not reach below zero");
  const long schedule = static_cast<long>(bins) * levels * (levels + 1) / 2;
  require(budget >= schedule, ErrorKind::Config,
          "zoom schedule needs " + std::to_string(schedule) + " evaluations, budget is " + std::to_string(budget));

  std::vector<Trial> trials;
  std::pair<double, double> chosen{lo, hi};
  for (int level = 0; level < levels; ++level) {
    const double width = (hi - lo) / bins;
    long used_after = static_cast<long>(trials.size()) + static_cast<long>(bins) * (level + 1);
    int extra = level + 1 == levels ? static_cast<int>(budget - used_after) : 0;
    const std::size_t first = trials.size();
    std::vector<int> bin_of;
    for (int b = 0; b < bins; ++b) {
      const int samples = level + 1 + extra / bins + (b < extra % bins ? 1 : 0);
      for (int q = 0; q < samples; ++q) {
        trials.push_back({lo + width * (b + (q + 0.5) / samples), 0.0});
        bin_of.push_back(b);
      }
    }
    evaluate_batch(objective, trials, first, execution);
    int best_bin = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = first; t < trials.size(); ++t)
      if (trials[t].objective < best) {
        best = trials[t].objective;
        best_bin = bin_of[t - first];
      }
    chosen = {lo + width * best_bin, lo + width * (best_bin + 1)};
    lo = chosen.first;
    hi = chosen.second;
  }
  TuneResult r = summarize(std::move(trials));
  r.final_interval = chosen;
  return r;
}

TuneResult zoom_search(const TuneObjective& objective, int bins, int levels, const TunerConfig& cfg) {
  cfg.validate();
  return zoom_search_interval(objective, cfg.zoom.lo_ratio * cfg.d_max, cfg.zoom.hi_ratio * cfg.d_max, bins, levels,
                              cfg.budget, cfg.execution);
}

TuneResult tune(const TuneObjective& objective, const TunerConfig& cfg) {
  switch (cfg.method) {
    case TunerMethod::Uniform:
    case TunerMethod::Normal: return sampling_search(objective, cfg);
    case TunerMethod::Pso: return pso_search(objective, cfg);
    case TunerMethod::Zoom: return zoom_search(objective, cfg.zoom.bins, cfg.zoom.levels, cfg);
  }
  fail(ErrorKind::Config, "unknown tuner method");
}

int GridPreset::points() const {
  require(step > 0.0 && hi >= lo, ErrorKind::Config, "bad grid preset");
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

GridPreset fsp_small_grid(double max_d) { return {max_d, 1.5 * max_d, 5.0, 1.0}; }

GridPreset fsp_large_grid(double mean_d, double max_d) { return {2.5 * mean_d, 2.0 * max_d, 150.0, 2.0}; }

TuneResult grid_search(const TuneObjective& objective, const GridPreset& grid, Execution execution) {
  const int count = grid.points();
  if (count == 1) {
    std::vector<Trial> trials{{grid.lo, 0.0}};
    evaluate_batch(objective, trials, 0, execution);
    return summarize(std::move(trials));
  }
  const double half = 0.5 * grid.step;
  return zoom_search_interval(objective, grid.lo - half, grid.lo + grid.step * (count - 1) + half, count, 1, count,
                              execution);
}

}  // namespace permqubo
