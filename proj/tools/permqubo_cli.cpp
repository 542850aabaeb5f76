// Command-line front end: solve-tsp, solve-fsp, bench, export-qubo, anneal.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "permqubo/anneal.hpp"
#include "permqubo/error.hpp"
#include "permqubo/instances.hpp"
#include "permqubo/pipeline.hpp"
#include "permqubo/qubo.hpp"
#include "permqubo/repair.hpp"
#include "permqubo/scaling.hpp"

using namespace permqubo;

namespace {

struct CommonOptions {
  std::string instance;
  std::optional<int> clusters;
  int min_cluster = 7;
  int max_cluster = 30;
  std::string tuner = "uniform";
  int budget = 40;
  bool no_scaling = false;
  std::string penalty_scale = "scaled";
  std::uint64_t seed = 0;
  std::string out;
  bool serial = false;
  bool tune_per_cluster = false;
  int replicas = 0;
  int sweeps = 0;
};

void add_common(CLI::App* app, CommonOptions& o, bool needs_instance) {
  auto* inst = app->add_option("--instance", o.instance, "Instance file");
  if (needs_instance) inst->required()->check(CLI::ExistingFile);
  app->add_option("--clusters", o.clusters, "Cluster count (default ceil(n / max-cluster))");
  app->add_option("--min-cluster", o.min_cluster, "Minimum cluster size");
  app->add_option("--max-cluster", o.max_cluster, "Maximum cluster size");
  app->add_option("--tuner", o.tuner, "Penalty tuner")->check(CLI::IsMember({"uniform", "normal", "pso", "zoom"}));
  app->add_option("--budget", o.budget, "Tuner evaluations");
  app->add_flag("--no-scaling", o.no_scaling, "Disable variance-minimizing data scaling");
  app->add_option("--penalty-scale", o.penalty_scale, "Matrix that D_max is read from")
      ->check(CLI::IsMember({"original", "scaled"}));
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--out", o.out, "Write the JSON report here");
  app->add_flag("--serial", o.serial, "Single-threaded deterministic execution");
  app->add_flag("--tune-per-cluster", o.tune_per_cluster, "Tune A separately on every cluster");
  app->add_option("--replicas", o.replicas, "Annealer replicas (0 = default)");
  app->add_option("--sweeps", o.sweeps, "Annealer sweeps per replica (0 = default)");
}

PipelineConfig to_config(const CommonOptions& o) {
  PipelineConfig cfg;
  cfg.k = o.clusters;
  cfg.tau = o.min_cluster;
  cfg.mu = o.max_cluster;
  cfg.tuner.method = *parse_tuner_method(o.tuner);
  cfg.tuner.budget = o.budget;
  cfg.scaling = !o.no_scaling;
  cfg.penalty_scale = o.penalty_scale == "scaled" ? PenaltyScale::Scaled : PenaltyScale::Original;
  cfg.seed = o.seed;
  cfg.execution = o.serial ? Execution::Serial : Execution::Parallel;
  cfg.tune_per_cluster = o.tune_per_cluster;
  cfg.anneal.replicas = o.replicas;
  cfg.anneal.sweeps = o.sweeps;
  return cfg;
}

void emit(const PipelineReport& r, const std::string& out, const std::string& label) {
  std::cout << "instance " << r.instance << "  n=" << r.size << "  clusters=" << r.cluster_sizes.size()
            << "  objective=" << r.objective;
  if (r.gap) std::cout << "  gap=" << *r.gap * 100.0 << "%";
  if (r.neh_makespan) std::cout << "  neh=" << *r.neh_makespan << "  gap_vs_neh=" << *r.gap_vs_neh * 100.0 << "%";
  std::cout << "  A=" << r.penalty << "  time=" << r.times.total << "s\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) fail(ErrorKind::Io, "cannot write " + out);
    f << report_json(r, label) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();
  CLI::App app{"Permutation QUBO hybrid solver for TSP and flow shop scheduling"};
  app.require_subcommand(1);

  CommonOptions tsp_opts;
  bool two_opt = false;
  auto* tsp = app.add_subcommand("solve-tsp", "Cluster, scale, tune, anneal, repair and stitch a TSPLIB instance");
  add_common(tsp, tsp_opts, true);
  tsp->add_flag("--two-opt", two_opt, "Run a full-tour 2-opt pass after stitching (extension, off by default)");
  std::optional<std::uint64_t> direct_proposals;
  tsp->add_option("--direct", direct_proposals, "Solve the whole instance as one QUBO with A = D_max and this many proposals");

  CommonOptions fsp_opts;
  std::string distance = "residual-no-carry";
  std::string grid = "none";
  auto* fsp = app.add_subcommand("solve-fsp", "Solve a flow shop instance in the canonical 'n m' format");
  add_common(fsp, fsp_opts, true);
  fsp->add_option("--distance", distance, "Job distance formulation")
      ->check(CLI::IsMember({"residual-square", "residual-no-carry", "spirit", "fshoph"}));
  fsp->add_option("--grid", grid, "Use a fixed penalty grid instead of the tuner")
      ->check(CLI::IsMember({"none", "small", "large"}));

  CommonOptions bench_opts;
  std::string manifest, out_dir, tuners = "uniform";
  int seeds = 1;
  bool compare_direct = false, compare_scaling = false;
  auto* bench = app.add_subcommand("bench", "Run a manifest of instances and write CSV/JSON reports");
  add_common(bench, bench_opts, false);
  bench->add_option("--manifest", manifest, "CSV manifest: problem,path,reference")->required();
  bench->add_option("--out-dir", out_dir, "Output directory")->required();
  bench->add_option("--tuners", tuners, "Comma separated tuner list");
  bench->add_option("--seeds", seeds, "Seeds per instance and configuration");
  bench->add_flag("--compare-direct", compare_direct, "Add a direct QUBO run at equal annealer budget");
  bench->add_flag("--compare-scaling", compare_scaling, "Add a scaling-toggled twin of every configuration");

  std::string qubo_instance, qubo_out;
  double qubo_penalty = 0.0;
  bool qubo_path = false;
  auto* exp = app.add_subcommand("export-qubo", "Write the permutation QUBO of a TSPLIB instance as coordinate text");
  exp->add_option("--instance", qubo_instance, "TSPLIB file")->required()->check(CLI::ExistingFile);
  exp->add_option("--penalty", qubo_penalty, "Penalty A (default D_max)");
  exp->add_flag("--path", qubo_path, "Hamiltonian path variant");
  exp->add_option("--out", qubo_out, "Output file (default stdout)");

  std::string ann_instance, trace_out;
  double ann_ratio = 1.0;
  std::uint64_t ann_seed = 0;
  int ann_sweeps = 0, ann_replicas = 0;
  bool ann_scaling = false;
  auto* ann = app.add_subcommand("anneal", "Anneal the whole-instance QUBO once and optionally dump the energy trace");
  ann->add_option("--instance", ann_instance, "TSPLIB file")->required()->check(CLI::ExistingFile);
  ann->add_option("--penalty-ratio", ann_ratio, "A as a multiple of D_max");
  ann->add_option("--seed", ann_seed, "Random seed");
  ann->add_option("--sweeps", ann_sweeps, "Sweeps per replica (0 = default)");
  ann->add_option("--replicas", ann_replicas, "Replicas (0 = default)");
  ann->add_flag("--scaling", ann_scaling, "Apply variance-minimizing scaling first");
  ann->add_option("--trace", trace_out, "CSV file for the per-sweep best energy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tsp) {
      const TspInstance inst = load_tsp_file(tsp_opts.instance);
      PipelineConfig cfg = to_config(tsp_opts);
      cfg.final_two_opt = two_opt;
      const PipelineReport r = direct_proposals ? solve_tsp_direct(inst, *direct_proposals, cfg) : solve_tsp(inst, cfg);
      emit(r, tsp_opts.out, direct_proposals ? "direct" : tsp_opts.tuner);
    } else if (*fsp) {
      const FspInstance inst = load_fsp_file(fsp_opts.instance);
      PipelineConfig cfg = to_config(fsp_opts);
      cfg.distance = *parse_distance_formulation(distance);
      cfg.fsp_grid = grid == "small" ? FspGrid::Small : grid == "large" ? FspGrid::Large : FspGrid::None;
      emit(solve_fsp(inst, cfg), fsp_opts.out, fsp_opts.tuner);
    } else if (*bench) {
      BenchmarkOptions options;
      options.out_dir = out_dir;
      options.seeds = seeds;
      options.compare_direct = compare_direct;
      options.compare_scaling = compare_scaling;
      std::stringstream ss(tuners);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (!parse_tuner_method(name)) fail(ErrorKind::Config, "unknown tuner " + name);
        CommonOptions o = bench_opts;
        o.tuner = name;
        options.configs.push_back({name, to_config(o)});
      }
      const BenchmarkSummary s = run_benchmark(manifest, options);
      std::cout << s.rows << " rows written to " << out_dir << '\n';
      for (const auto& m : s.missing) std::cerr << "missing: " << m << '\n';
      for (const auto& f : s.failures) std::cerr << "failed: " << f << '\n';
      return s.failures.empty() ? 0 : 1;
    } else if (*exp) {
      const TspInstance inst = load_tsp_file(qubo_instance);
      const double a = qubo_penalty > 0.0 ? qubo_penalty : inst.dist.max_abs();
      const QuboModel m = build_permutation_qubo(inst.dist, a, qubo_path ? Topology::Path : Topology::Cycle);
      if (qubo_out.empty()) {
        export_coordinate_text(m, std::cout);
      } else {
        std::ofstream f(qubo_out);
        if (!f) fail(ErrorKind::Io, "cannot write " + qubo_out);
        export_coordinate_text(m, f);
      }
    } else if (*ann) {
      const TspInstance inst = load_tsp_file(ann_instance);
      Matrix d = inst.dist;
      if (ann_scaling) d = city_shift(d, variance_min_deltas(d));
      const QuboModel m = build_permutation_qubo(d, ann_ratio * d.max_abs(), Topology::Cycle);
      AnnealConfig cfg = default_anneal_config(m, ann_seed, ann_sweeps);
      if (ann_replicas > 0) cfg.replicas = ann_replicas;
      cfg.record_trace = !trace_out.empty();
      const SolveResult r = solve(m, cfg);
      const Projection p = project(BinarySolution(inst.size(), r.best_bits));
      std::cout << "best energy " << r.best_energy << (r.feasible ? " (feasible)" : " (infeasible)")
                << "  repaired tour length " << tour_length(inst, p.order) << "  projection distance " << p.distance
                << '\n';
      if (!trace_out.empty()) {
        std::ofstream f(trace_out);
        if (!f) fail(ErrorKind::Io, "cannot write " + trace_out);
        f << "sweep,best_energy\n";
        for (std::size_t s = 0; s < r.energy_trace.size(); ++s) f << s + 1 << ',' << r.energy_trace[s] << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
