#include "permqubo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "permqubo/error.hpp"
#include "permqubo/partition.hpp"
#include "permqubo/qubo.hpp"
#include "permqubo/repair.hpp"
#include "permqubo/rng.hpp"
#include "permqubo/scaling.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace permqubo {

void PipelineConfig::validate() const {
  require(tau >= 1 && mu >= 2 && tau <= mu, ErrorKind::Config, "cluster bounds need 1 <= tau <= mu, mu >= 2");
  require(!k || *k >= 1, ErrorKind::Config, "cluster count must be positive");
  require(!fixed_penalty_ratio || *fixed_penalty_ratio > 0.0, ErrorKind::Config, "penalty ratio must be positive");
  require(anneal.replicas >= 0 && anneal.sweeps >= 0, ErrorKind::Config, "anneal overrides must be nonnegative");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// One cluster as seen by the QUBO stage; indices are local to the cluster.
struct SubProblem {
  std::vector<int> members;  // global ids in local order
  Matrix original;
  Matrix qubo_dist;
  double d_max = 0.0;
};

struct CycleSolution {
  std::vector<int> cycle;  // local ids
  double score = 0.0;
  std::uint64_t proposals = 0;
  bool raw_feasible = true;
};

using CycleScore = std::function<double(std::span<const int>)>;

AnnealConfig anneal_for(const QuboModel& model, std::uint64_t seed, const AnnealSettings& s, Execution ex) {
  AnnealConfig c = default_anneal_config(model, seed, s.sweeps);
  if (s.replicas > 0) c.replicas = s.replicas;
  if (s.proposal_budget) {
    const std::uint64_t per_sweep = static_cast<std::uint64_t>(c.replicas) * model.size();
    c.sweeps = static_cast<int>(std::max<std::uint64_t>(1, *s.proposal_budget / std::max<std::uint64_t>(per_sweep, 1)));
  }
  c.execution = ex;
  return c;
}

CycleSolution solve_cycle(const SubProblem& sub, double penalty, double objective_weight, std::uint64_t seed,
                          const AnnealSettings& settings, Execution ex, const CycleScore& score) {
  const std::size_t n = sub.members.size();
  CycleSolution best;
  if (n <= 3) {
    // Every cycle order is visited directly; the QUBO has nothing to add here.
    std::vector<int> perm = identity_permutation(n);
    best.cycle = perm;
    best.score = score(perm);
    while (n > 0 && std::next_permutation(perm.begin() + 1, perm.end())) {
      const double s = score(perm);
      if (s < best.score) {
        best.score = s;
        best.cycle = perm;
      }
    }
    return best;
  }
  const QuboModel model = build_permutation_qubo(sub.qubo_dist, penalty, Topology::Cycle, objective_weight);
  const SolveResult r = solve(model, anneal_for(model, seed, settings, ex));
  best.proposals = r.proposals;
  best.raw_feasible = r.feasible;
  // The best permutation visited and every replica's lowest-energy state go
  // through repair; the best tour wins.
  std::vector<std::vector<int>> candidates;
  if (r.best_feasible_bits) candidates.push_back(project(BinarySolution(n, *r.best_feasible_bits)).order);
  candidates.push_back(project(BinarySolution(n, r.best_bits)).order);
  for (const auto& bits : r.replica_best_bits) candidates.push_back(project(BinarySolution(n, bits)).order);
  for (const auto& bits : r.snapshots) candidates.push_back(project(BinarySolution(n, bits)).order);
  best.score = std::numeric_limits<double>::infinity();
  for (auto& c : candidates) {
    const double s = score(c);
    if (s < best.score) {
      best.score = s;
      best.cycle = std::move(c);
    }
  }
  return best;
}

SubProblem make_subproblem(const Matrix& dist, std::vector<int> members, const PipelineConfig& cfg) {
  SubProblem sub;
  sub.members = std::move(members);
  sub.original = principal_submatrix(dist, sub.members);
  sub.qubo_dist = sub.original;
  if (cfg.scaling && sub.members.size() >= 3) sub.qubo_dist = city_shift(sub.original, variance_min_deltas(sub.original));
  sub.d_max = cfg.penalty_scale == PenaltyScale::Scaled ? sub.qubo_dist.max_abs() : sub.original.max_abs();
  if (sub.d_max <= 0.0) sub.d_max = 1.0;
  return sub;
}

struct TunedSolve {
  CycleSolution solution;
  double penalty = 0.0;
  std::vector<Trial> trials;
  std::uint64_t proposals = 0;
  int raw_infeasible = 0;
};

std::uint64_t cluster_stream(std::uint64_t seed, std::size_t cluster) { return mix_seed(seed, 1000 + cluster); }

// Tunes A on one sub-problem and keeps the tour of the winning trial.
TunedSolve tune_cluster(const SubProblem& sub, std::size_t cluster, const PipelineConfig& cfg, const CycleScore& score,
                        std::optional<GridPreset> grid) {
  TunedSolve out;
  const std::uint64_t stream = cluster_stream(cfg.seed, cluster);
  const double weight = grid ? grid->objective_weight : 1.0;

  if (cfg.fixed_penalty_ratio) {
    out.penalty = *cfg.fixed_penalty_ratio * sub.d_max;
    out.solution = solve_cycle(sub, out.penalty, weight, mix_seed(stream, 0), cfg.anneal, cfg.execution, score);
    out.trials.push_back({out.penalty, out.solution.score});
    out.proposals = out.solution.proposals;
    out.raw_infeasible = out.solution.raw_feasible ? 0 : 1;
    return out;
  }

  TunerConfig tcfg = cfg.tuner;
  tcfg.d_max = sub.d_max;
  tcfg.seed = mix_seed(stream, 0x7E11ULL);
  tcfg.execution = cfg.execution;
  const int capacity = std::max(tcfg.budget, grid ? grid->points() : 0);
  std::vector<std::optional<CycleSolution>> cache(static_cast<std::size_t>(capacity));
  auto objective = [&](double a, int idx) {
    require(idx >= 0 && idx < capacity, ErrorKind::Config, "tuner exceeded its evaluation budget");
    // Trials already run concurrently, so each annealer call stays serial.
    CycleSolution s = solve_cycle(sub, a, weight, mix_seed(stream, 1 + static_cast<std::uint64_t>(idx)), cfg.anneal,
                                  Execution::Serial, score);
    const double value = s.score;
    cache[static_cast<std::size_t>(idx)] = std::move(s);
    return value;
  };
  const TuneResult tr = grid ? grid_search(objective, *grid, cfg.execution) : tune(objective, tcfg);
  out.penalty = tr.best_A;
  out.trials = tr.trials;
  for (std::size_t t = 0; t < tr.trials.size(); ++t) {
    out.proposals += cache[t]->proposals;
    out.raw_infeasible += cache[t]->raw_feasible ? 0 : 1;
  }
  for (std::size_t t = 0; t < tr.trials.size(); ++t)
    if (tr.trials[t].objective == tr.best_objective) {
      out.solution = *cache[t];
      break;
    }
  return out;
}

struct ClusterRun {
  std::vector<CycleSolution> solutions;
  std::vector<Trial> trials;
  double penalty = 0.0;
  std::uint64_t proposals = 0;
  int raw_infeasible = 0;
  double tuning_seconds = 0.0;
  double solve_seconds = 0.0;
};

// Tunes on the largest cluster (or every cluster) and solves the rest with its A.
ClusterRun run_clusters(const std::vector<SubProblem>& subs, const PipelineConfig& cfg,
                        const std::function<CycleScore(std::size_t)>& score_for,
                        const std::function<std::optional<GridPreset>(const SubProblem&)>& grid_for) {
  ClusterRun run;
  run.solutions.resize(subs.size());
  std::size_t rep = 0;
  for (std::size_t c = 1; c < subs.size(); ++c)
    if (subs[c].members.size() > subs[rep].members.size()) rep = c;

  auto t0 = Clock::now();
  std::vector<char> done(subs.size(), 0);
  const std::size_t tuned_count = cfg.tune_per_cluster ? subs.size() : 1;
  for (std::size_t pass = 0; pass < tuned_count; ++pass) {
    const std::size_t c = cfg.tune_per_cluster ? pass : rep;
    TunedSolve ts = tune_cluster(subs[c], c, cfg, score_for(c), grid_for(subs[c]));
    if (c == rep) {
      run.penalty = ts.penalty;
      run.trials = ts.trials;
    }
    run.proposals += ts.proposals;
    run.raw_infeasible += ts.raw_infeasible;
    run.solutions[c] = std::move(ts.solution);
    done[c] = 1;
  }
  run.tuning_seconds = seconds_since(t0);

  t0 = Clock::now();
  const auto count = static_cast<long>(subs.size());
  const double weight = [&] {
    const auto g = grid_for(subs[rep]);
    return g ? g->objective_weight : 1.0;
  }();
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (cfg.execution == Execution::Parallel)
  for (long c = 0; c < count; ++c) {
    if (done[c]) continue;
    try {
      run.solutions[c] = solve_cycle(subs[c], run.penalty, weight, mix_seed(cluster_stream(cfg.seed, c), 0),
                                     cfg.anneal, Execution::Serial, score_for(static_cast<std::size_t>(c)));
    } catch (...) {
#pragma omp critical(permqubo_pipeline_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (std::size_t c = 0; c < subs.size(); ++c)
    if (!done[c]) {
      run.proposals += run.solutions[c].proposals;
      run.raw_infeasible += run.solutions[c].raw_feasible ? 0 : 1;
    }
  run.solve_seconds = seconds_since(t0);
  return run;
}

std::vector<std::vector<int>> groups_of(const Clustering& cl) {
  std::vector<std::vector<int>> g(static_cast<std::size_t>(cl.k));
  for (std::size_t i = 0; i < cl.labels.size(); ++i) g[cl.labels[i]].push_back(static_cast<int>(i));
  return g;
}

std::vector<int> to_global(const SubProblem& sub, std::span<const int> local) {
  std::vector<int> out(local.size());
  for (std::size_t t = 0; t < local.size(); ++t) out[t] = sub.members[local[t]];
  return out;
}

int resolve_k(const PipelineConfig& cfg, std::size_t n) {
  const int k = cfg.k ? *cfg.k : default_cluster_count(n, cfg.mu);
  require(static_cast<std::size_t>(k) <= n, ErrorKind::Capacity, "more clusters than items");
  return k;
}

std::optional<double> relative_gap(double objective, std::optional<double> reference) {
  if (!reference || *reference == 0.0) return std::nullopt;
  return (objective - *reference) / *reference;
}

}  // namespace

PipelineReport solve_tsp(const TspInstance& inst, const PipelineConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t n = inst.size();
  require(n >= 3, ErrorKind::Domain, "a tour needs at least 3 cities");
  PipelineReport rep;
  rep.instance = inst.name;
  rep.problem = ProblemKind::Tsp;
  rep.size = n;
  rep.scaling = cfg.scaling;
  rep.seed = cfg.seed;
  rep.tuner = cfg.fixed_penalty_ratio ? "fixed" : to_string(cfg.tuner.method);

  // Partition.
  auto t0 = Clock::now();
  const int k = resolve_k(cfg, n);
  std::vector<std::vector<int>> groups;
  if (k == 1) {
    groups.push_back(identity_permutation(n));
  } else {
    Matrix points;
    if (inst.has_coords()) {
      points = Matrix(n, 2);
      for (std::size_t i = 0; i < n; ++i) {
        points(i, 0) = inst.coords[i].x;
        points(i, 1) = inst.coords[i].y;
      }
    } else {
      points = spectral_embedding(symmetrize(distance_to_similarity(inst.dist)), k);
    }
    // A forced k may not fit the default bounds; relax them just enough.
    const int tau = std::min(cfg.tau, static_cast<int>(n) / k);
    const int mu = std::max(cfg.mu, static_cast<int>((n + k - 1) / k));
    groups = groups_of(constrained_kmeans(points, k, tau, mu, mix_seed(cfg.seed, 1)));
  }
  rep.times.partition = seconds_since(t0);

  t0 = Clock::now();
  std::vector<SubProblem> subs;
  for (auto& g : groups) subs.push_back(make_subproblem(inst.dist, g, cfg));
  rep.times.scaling = seconds_since(t0);
  for (const auto& s : subs) rep.cluster_sizes.push_back(static_cast<int>(s.members.size()));

  auto score_for = [&](std::size_t c) -> CycleScore {
    const Matrix* d = &subs[c].original;
    return [d](std::span<const int> cycle) { return tour_length(*d, cycle); };
  };
  auto no_grid = [](const SubProblem&) -> std::optional<GridPreset> { return std::nullopt; };
  ClusterRun run = run_clusters(subs, cfg, score_for, no_grid);
  rep.times.tuning = run.tuning_seconds;
  rep.times.solve = run.solve_seconds;
  rep.trials = run.trials;
  rep.penalty = run.penalty;
  rep.proposals = run.proposals;
  rep.raw_infeasible = run.raw_infeasible;
  std::size_t largest = 0;
  for (std::size_t c = 1; c < subs.size(); ++c)
    if (subs[c].members.size() > subs[largest].members.size()) largest = c;
  rep.d_max = subs[largest].d_max;

  // Stitch.
  t0 = Clock::now();
  std::vector<std::vector<int>> tours;
  for (std::size_t c = 0; c < subs.size(); ++c) tours.push_back(to_global(subs[c], run.solutions[c].cycle));
  Permutation tour;
  double bookkept = 0.0;
  if (tours.size() == 1) {
    tour = tours[0];
    bookkept = tour_length(inst.dist, tour);
  } else {
    MergePlan plan = merge_matrix(tours, inst.dist, cfg.execution);
    const OrderMode mode =
        tours.size() <= static_cast<std::size_t>(kEnumerateClusterCap) ? OrderMode::Enumerate : OrderMode::QuboPath;
    std::optional<AnnealConfig> order_cfg;
    if (mode == OrderMode::QuboPath) {
      const double a = 2.0 * plan.delta.max_abs() + 1.0;
      const QuboModel m = build_permutation_qubo(plan.delta, a, Topology::Path);
      order_cfg = anneal_for(m, mix_seed(cfg.seed, 2), cfg.anneal, cfg.execution);
    }
    plan.order = cluster_order(plan.delta, mode, order_cfg ? &*order_cfg : nullptr);
    for (std::size_t t = 0; t + 1 < plan.order.size(); ++t) plan.splices.push_back(plan.best[plan.order[t]][plan.order[t + 1]]);
    AssembledTour at = assemble_tour(tours, plan.order, plan.splices, inst.dist);
    tour = std::move(at.tour);
    bookkept = at.parts_length + at.splice_total;
  }
  if (cfg.final_two_opt) bookkept = two_opt(tour, inst.dist);
  rep.times.stitch = seconds_since(t0);

  // Independent audit of the final tour.
  require(is_permutation(tour, n), ErrorKind::InvalidSolution, "pipeline produced an invalid tour");
  rep.objective = tour_length(inst, tour);
  require(std::abs(rep.objective - bookkept) <= 1e-9 * (1.0 + rep.objective), ErrorKind::Assembly,
          "audited tour length disagrees with the stitching bookkeeping");
  rep.solution = std::move(tour);
  rep.reference = inst.known_optimum;
  rep.gap = relative_gap(rep.objective, rep.reference);
  rep.times.total = seconds_since(start);
  return rep;
}

PipelineReport solve_tsp_direct(const TspInstance& inst, std::uint64_t proposal_budget, const PipelineConfig& cfg) {
  PipelineConfig direct = cfg;
  direct.k = 1;
  direct.scaling = false;
  direct.penalty_scale = PenaltyScale::Original;
  direct.fixed_penalty_ratio = 1.0;
  direct.anneal.proposal_budget = proposal_budget;
  direct.final_two_opt = false;
  PipelineReport r = solve_tsp(inst, direct);
  r.tuner = "direct";
  return r;
}

PipelineReport solve_fsp(const FspInstance& inst, const PipelineConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t n = inst.jobs();
  require(n >= 2, ErrorKind::Domain, "flow shop pipeline needs at least 2 jobs");
  PipelineReport rep;
  rep.instance = inst.name;
  rep.problem = ProblemKind::Fsp;
  rep.size = n;
  rep.scaling = cfg.scaling;
  rep.seed = cfg.seed;
  rep.tuner = cfg.fixed_penalty_ratio ? "fixed" : cfg.fsp_grid != FspGrid::None ? "grid" : to_string(cfg.tuner.method);

  auto t0 = Clock::now();
  const Matrix dist = job_distance_matrix(inst, cfg.distance);
  const int k = resolve_k(cfg, n);
  std::vector<std::vector<int>> groups;
  if (k == 1) {
    groups.push_back(identity_permutation(n));
  } else {
    // Job distances are asymmetric; the similarity graph uses the mean of both directions.
    groups = groups_of(spectral_cluster(symmetrize(distance_to_similarity(dist)), k, mix_seed(cfg.seed, 1)));
  }
  rep.times.partition = seconds_since(t0);

  t0 = Clock::now();
  std::vector<SubProblem> subs;
  std::vector<FspInstance> sub_inst;
  for (auto& g : groups) {
    subs.push_back(make_subproblem(dist, g, cfg));
    FspInstance si;
    si.name = inst.name;
    si.times = Matrix(g.size(), inst.machines());
    for (std::size_t r = 0; r < g.size(); ++r)
      for (std::size_t m = 0; m < inst.machines(); ++m) si.times(r, m) = inst.times(g[r], m);
    sub_inst.push_back(std::move(si));
  }
  rep.times.scaling = seconds_since(t0);
  for (const auto& s : subs) rep.cluster_sizes.push_back(static_cast<int>(s.members.size()));

  auto score_for = [&](std::size_t c) -> CycleScore {
    const FspInstance* si = &sub_inst[c];
    return [si](std::span<const int> cycle) { return best_rotation(*si, cycle).makespan; };
  };
  auto grid_for = [&](const SubProblem& s) -> std::optional<GridPreset> {
    if (cfg.fsp_grid == FspGrid::Small) return fsp_small_grid(s.original.max_abs());
    if (cfg.fsp_grid == FspGrid::Large)
      return fsp_large_grid(s.members.size() >= 2 ? s.original.off_diagonal_mean() : 0.0, s.original.max_abs());
    return std::nullopt;
  };
  ClusterRun run = run_clusters(subs, cfg, score_for, grid_for);
  rep.times.tuning = run.tuning_seconds;
  rep.times.solve = run.solve_seconds;
  rep.trials = run.trials;
  rep.penalty = run.penalty;
  rep.proposals = run.proposals;
  rep.raw_infeasible = run.raw_infeasible;
  std::size_t largest = 0;
  for (std::size_t c = 1; c < subs.size(); ++c)
    if (subs[c].members.size() > subs[largest].members.size()) largest = c;
  rep.d_max = subs[largest].d_max;

  t0 = Clock::now();
  std::vector<std::vector<int>> orders;
  for (std::size_t c = 0; c < subs.size(); ++c) {
    const ScheduleResult local = best_rotation(sub_inst[c], run.solutions[c].cycle);
    orders.push_back(to_global(subs[c], local.order));
  }
  Permutation seq;
  if (orders.size() == 1) {
    seq = orders[0];
  } else if (orders.size() <= static_cast<std::size_t>(kEnumerateClusterCap)) {
    seq = fsp_cluster_permute(orders, inst);
  } else {
    // Too many clusters to enumerate: order them as a path over boundary distances.
    Matrix delta = Matrix::square(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i)
      for (std::size_t j = 0; j < orders.size(); ++j)
        if (i != j) delta(i, j) = dist(orders[i].back(), orders[j].front());
    const double a = 2.0 * delta.max_abs() + 1.0;
    const QuboModel m = build_permutation_qubo(delta, a, Topology::Path);
    const AnnealConfig acfg = anneal_for(m, mix_seed(cfg.seed, 2), cfg.anneal, cfg.execution);
    for (int c : cluster_order(delta, OrderMode::QuboPath, &acfg)) seq.insert(seq.end(), orders[c].begin(), orders[c].end());
  }
  rep.times.stitch = seconds_since(t0);

  require(is_permutation(seq, n), ErrorKind::InvalidSolution, "pipeline produced an invalid job order");
  rep.objective = makespan(inst, seq);
  rep.solution = std::move(seq);
  const ScheduleResult baseline = neh(inst);
  rep.neh_makespan = baseline.makespan;
  rep.gap_vs_neh = relative_gap(rep.objective, baseline.makespan);
  rep.reference = inst.reference_makespan;
  rep.gap = relative_gap(rep.objective, rep.reference);
  rep.times.total = seconds_since(start);
  return rep;
}

std::optional<int> env_thread_count() {
  const char* v = std::getenv("PERMQUBO_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long t = std::strtol(v, &end, 10);
  if (*end != '\0' || t <= 0) return std::nullopt;
  return static_cast<int>(t);
}

void apply_thread_env() {
#ifdef _OPENMP
  if (auto t = env_thread_count()) omp_set_num_threads(*t);
#endif
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string problem_name(ProblemKind p) { return p == ProblemKind::Tsp ? "tsp" : "fsp"; }

nlohmann::json to_json(const PipelineReport& r, const std::string& label) {
  nlohmann::json j;
  j["label"] = label;
  j["instance"] = r.instance;
  j["problem"] = problem_name(r.problem);
  j["size"] = r.size;
  j["seed"] = r.seed;
  j["tuner"] = r.tuner;
  j["scaling"] = r.scaling;
  j["cluster_sizes"] = r.cluster_sizes;
  j["penalty"] = r.penalty;
  j["d_max"] = r.d_max;
  j["objective"] = r.objective;
  j["reference"] = r.reference ? nlohmann::json(*r.reference) : nlohmann::json();
  j["gap"] = r.gap ? nlohmann::json(*r.gap) : nlohmann::json();
  j["neh_makespan"] = r.neh_makespan ? nlohmann::json(*r.neh_makespan) : nlohmann::json();
  j["gap_vs_neh"] = r.gap_vs_neh ? nlohmann::json(*r.gap_vs_neh) : nlohmann::json();
  j["proposals"] = r.proposals;
  j["raw_infeasible"] = r.raw_infeasible;
  j["solution"] = r.solution;
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) trials.push_back({{"A", t.A}, {"objective", t.objective}});
  j["trials"] = trials;
  j["times"] = {{"partition", r.times.partition}, {"scaling", r.times.scaling}, {"tuning", r.times.tuning},
                {"solve", r.times.solve},         {"stitch", r.times.stitch},   {"total", r.times.total}};
  return j;
}

}  // namespace

std::string report_json(const PipelineReport& r, const std::string& label) { return to_json(r, label).dump(2); }

std::string report_csv_header() {
  return "label,instance,problem,size,seed,tuner,scaling,k,cluster_sizes,penalty,d_max,objective,reference,gap,"
         "neh_makespan,gap_vs_neh,proposals,raw_infeasible,t_partition,t_scaling,t_tuning,t_solve,t_stitch,t_total";
}

std::string report_csv_row(const PipelineReport& r, const std::string& label) {
  std::ostringstream os;
  std::string sizes;
  for (std::size_t c = 0; c < r.cluster_sizes.size(); ++c) sizes += (c ? ";" : "") + std::to_string(r.cluster_sizes[c]);
  os << label << ',' << r.instance << ',' << problem_name(r.problem) << ',' << r.size << ',' << r.seed << ','
     << r.tuner << ',' << (r.scaling ? "on" : "off") << ',' << r.cluster_sizes.size() << ',' << sizes << ','
     << fmt(r.penalty) << ',' << fmt(r.d_max) << ',' << fmt(r.objective) << ',' << fmt(r.reference) << ','
     << fmt(r.gap) << ',' << fmt(r.neh_makespan) << ',' << fmt(r.gap_vs_neh) << ',' << r.proposals << ','
     << r.raw_infeasible << ',' << fmt(r.times.partition) << ',' << fmt(r.times.scaling) << ','
     << fmt(r.times.tuning) << ',' << fmt(r.times.solve) << ',' << fmt(r.times.stitch) << ',' << fmt(r.times.total);
  return os.str();
}

std::vector<BenchmarkEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open manifest " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<BenchmarkEntry> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto a = cell.find_first_not_of(" \t"), b = cell.find_last_not_of(" \t");
      cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
    }
    if (!header_seen) {
      header_seen = true;
      if (!cells.empty() && cells[0] == "problem") continue;
    }
    require(cells.size() >= 2, ErrorKind::MalformedInput, "manifest row needs problem and path: " + line);
    BenchmarkEntry e;
    require(cells[0] == "tsp" || cells[0] == "fsp", ErrorKind::MalformedInput, "unknown problem kind " + cells[0]);
    e.problem = cells[0] == "tsp" ? ProblemKind::Tsp : ProblemKind::Fsp;
    const std::filesystem::path p(cells[1]);
    e.path = p.is_absolute() ? p.string() : (base / p).string();
    if (cells.size() >= 3 && !cells[2].empty()) e.reference = std::stod(cells[2]);
    out.push_back(std::move(e));
  }
  return out;
}

BenchmarkSummary run_benchmark(const std::string& manifest, const BenchmarkOptions& options) {
  require(options.seeds >= 1, ErrorKind::Config, "need at least one seed");
  const auto entries = read_manifest(manifest);
  std::filesystem::create_directories(options.out_dir);
  std::ofstream runs(std::filesystem::path(options.out_dir) / "runs.csv");
  require(static_cast<bool>(runs), ErrorKind::Io, "cannot write into " + options.out_dir);
  runs << report_csv_header() << '\n';

  BenchmarkSummary summary;
  nlohmann::json sidecar = nlohmann::json::array();
  // (label, size) -> gaps and times
  std::map<std::pair<std::string, std::size_t>, std::vector<std::pair<double, double>>> groups;

  auto record = [&](const PipelineReport& r, const std::string& label) {
    runs << report_csv_row(r, label) << '\n';
    sidecar.push_back(to_json(r, label));
    const std::optional<double> g = r.gap ? r.gap : r.gap_vs_neh;
    groups[{label, r.size}].push_back({g ? *g : std::nan(""), r.times.total});
    ++summary.rows;
  };

  for (const auto& e : entries) {
    if (!std::filesystem::exists(e.path)) {
      summary.missing.push_back(e.path);
      continue;
    }
    std::optional<TspInstance> tsp;
    std::optional<FspInstance> fsp;
    try {
      if (e.problem == ProblemKind::Tsp) {
        tsp = load_tsp_file(e.path);
        if (e.reference) tsp->known_optimum = e.reference;
      } else {
        fsp = load_fsp_file(e.path);
        if (e.reference) fsp->reference_makespan = e.reference;
      }
    } catch (const Error& err) {
      summary.failures.push_back(e.path + ": " + err.what());
      continue;
    }
    for (const auto& bc : options.configs) {
      std::vector<std::pair<std::string, PipelineConfig>> variants{{bc.label, bc.pipeline}};
      if (options.compare_scaling) {
        PipelineConfig twin = bc.pipeline;
        twin.scaling = !twin.scaling;
        variants.push_back({bc.label + (twin.scaling ? "/scaling" : "/no-scaling"), twin});
      }
      for (int s = 0; s < options.seeds; ++s) {
        for (auto [label, pc] : variants) {
          pc.seed = bc.pipeline.seed + static_cast<std::uint64_t>(s);
          try {
            const PipelineReport r = tsp ? solve_tsp(*tsp, pc) : solve_fsp(*fsp, pc);
            record(r, label);
            if (options.compare_direct && tsp && label == bc.label)
              record(solve_tsp_direct(*tsp, r.proposals, pc), bc.label + "/direct");
          } catch (const Error& err) {
            summary.failures.push_back(e.path + " [" + label + "]: " + err.what());
          }
        }
      }
    }
  }

  std::ofstream agg(std::filesystem::path(options.out_dir) / "aggregates.csv");
  agg << "label,size,runs,mean_gap,median_gap,mean_time\n";
  for (auto& [key, vals] : groups) {
    std::vector<double> gaps;
    double time = 0.0;
    for (auto [g, t] : vals) {
      if (!std::isnan(g)) gaps.push_back(g);
      time += t;
    }
    std::sort(gaps.begin(), gaps.end());
    double mean = 0.0;
    for (double g : gaps) mean += g;
    std::string mean_s, median_s;
    if (!gaps.empty()) {
      mean_s = fmt(mean / static_cast<double>(gaps.size()));
      const std::size_t m = gaps.size();
      median_s = fmt(m % 2 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]));
    }
    agg << key.first << ',' << key.second << ',' << vals.size() << ',' << mean_s << ',' << median_s << ','
        << fmt(time / static_cast<double>(vals.size())) << '\n';
  }
  std::ofstream js(std::filesystem::path(options.out_dir) / "runs.json");
  nlohmann::json doc;
  doc["runs"] = sidecar;
  doc["missing"] = summary.missing;
  doc["failures"] = summary.failures;
  js << doc.dump(2) << '\n';
  return summary;
}

}  // namespace permqubo
