#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "check_error.hpp"
#include "oracles.hpp"
#include "permqubo/pipeline.hpp"

using namespace permqubo;

namespace {

PipelineConfig quick(std::uint64_t seed, int budget = 4, int sweeps = 200) {
  PipelineConfig c;
  c.seed = seed;
  c.tuner.budget = budget;
  c.anneal.sweeps = sweeps;
  c.execution = Execution::Serial;
  c.tuner.execution = Execution::Serial;
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("permqubo_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("TSP pipeline with two clusters returns an audited tour") {
  Rng rng(1);
  const TspInstance inst = TspInstance::from_points("r12", oracle::random_points(12, rng));
  PipelineConfig cfg = quick(3);
  cfg.k = 2;
  cfg.tau = 3;
  cfg.mu = 9;
  const PipelineReport r = solve_tsp(inst, cfg);
  REQUIRE(is_permutation(r.solution, 12));
  CHECK(r.objective == doctest::Approx(tour_length(inst.dist, r.solution)).epsilon(1e-12));
  CHECK(r.cluster_sizes.size() == 2);
  CHECK(r.cluster_sizes[0] + r.cluster_sizes[1] == 12);
  CHECK(r.trials.size() <= 4);
  CHECK(r.proposals > 0);
  CHECK_FALSE(r.gap);
}

TEST_CASE("TSP pipeline on 8 cities with one cluster reaches the optimum") {
  Rng rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const TspInstance inst = TspInstance::from_points("r8", oracle::random_points(8, rng));
    PipelineConfig cfg = quick(static_cast<std::uint64_t>(trial), 10, 2000);
    cfg.k = 1;
    const PipelineReport r = solve_tsp(inst, cfg);
    CHECK(r.objective == doctest::Approx(oracle::best_cycle(inst.dist)));
  }
}

TEST_CASE("TSP pipeline is deterministic under serial execution and records gaps") {
  Rng rng(3);
  TspInstance inst = TspInstance::from_points("r40", oracle::random_points(40, rng));
  inst.known_optimum = 1.0;
  PipelineConfig cfg = quick(11);
  cfg.k = 2;
  const PipelineReport a = solve_tsp(inst, cfg);
  const PipelineReport b = solve_tsp(inst, cfg);
  CHECK(a.solution == b.solution);
  CHECK(a.objective == b.objective);
  REQUIRE(a.gap);
  CHECK(*a.gap == doctest::Approx(a.objective - 1.0));
  for (const auto& t : a.trials) CHECK(t.A > 0.0);
  cfg.scaling = false;
  CHECK(is_permutation(solve_tsp(inst, cfg).solution, 40));
}

TEST_CASE("direct baseline covers the whole instance") {
  Rng rng(4);
  const TspInstance inst = TspInstance::from_points("r10", oracle::random_points(10, rng));
  const PipelineReport r = solve_tsp_direct(inst, 100000, quick(0));
  REQUIRE(is_permutation(r.solution, 10));
  CHECK(r.cluster_sizes == std::vector<int>{10});
  CHECK(r.proposals <= 100000);
  CHECK(r.proposals >= 50000);
}

TEST_CASE("FSP pipeline") {
  Rng rng(5);
  FspInstance f;
  f.name = "f6";
  f.times = Matrix(6, 3);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 3; ++i) f.times(j, i) = 1.0 + static_cast<double>(uniform_below(rng, 20));
  PipelineConfig cfg = quick(1);
  cfg.k = 1;
  const PipelineReport r = solve_fsp(f, cfg);
  REQUIRE(is_permutation(r.solution, 6));
  CHECK(r.objective == makespan(f, r.solution));
  CHECK(r.objective >= oracle::best_makespan(f.times));
  REQUIRE(r.neh_makespan);
  REQUIRE(r.gap_vs_neh);

  cfg.fsp_grid = FspGrid::Small;
  const PipelineReport g = solve_fsp(f, cfg);
  CHECK(is_permutation(g.solution, 6));
  CHECK(g.tuner == "grid");
}

TEST_CASE("pipeline config validation") {
  PipelineConfig c;
  c.tau = 5;
  c.mu = 4;
  CHECK_ERROR_KIND(c.validate(), ErrorKind::Config);
  c = PipelineConfig{};
  c.k = 0;
  CHECK_ERROR_KIND(c.validate(), ErrorKind::Config);
  c = PipelineConfig{};
  c.fixed_penalty_ratio = -1.0;
  CHECK_ERROR_KIND(c.validate(), ErrorKind::Config);
  const TspInstance tiny = TspInstance::from_points("t", {{0, 0}, {1, 1}});
  CHECK_ERROR_KIND(solve_tsp(tiny, quick(0)), ErrorKind::Domain);
}

TEST_CASE("reports serialize to CSV and JSON") {
  Rng rng(6);
  const TspInstance inst = TspInstance::from_points("r9", oracle::random_points(9, rng));
  const PipelineReport r = solve_tsp(inst, quick(2));
  const std::string header = report_csv_header();
  const std::string row = report_csv_row(r, "cfg");
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  const nlohmann::json j = nlohmann::json::parse(report_json(r, "cfg"));
  CHECK(j["label"] == "cfg");
  CHECK(j["objective"].get<double>() == r.objective);
  CHECK(j["trials"].size() == r.trials.size());
  CHECK(j["solution"].get<std::vector<int>>() == r.solution);
}

TEST_CASE("benchmark runner writes one row per instance and config") {
  const auto dir = scratch("bench");
  Rng rng(7);
  for (int i = 0; i < 2; ++i) {
    std::ofstream tsp(dir / ("c" + std::to_string(i) + ".tsp"));
    tsp << "NAME: c" << i << "\nTYPE: TSP\nDIMENSION: 10\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n";
    const auto pts = oracle::random_points(10, rng);
    for (std::size_t c = 0; c < 10; ++c) tsp << c + 1 << ' ' << pts[c].x << ' ' << pts[c].y << '\n';
    tsp << "EOF\n";
  }
  {
    FspInstance f;
    f.times = Matrix(5, 2, 3.0);
    std::ofstream out(dir / "j5.fsp");
    out << write_fsp(f);
  }
  {
    std::ofstream m(dir / "manifest.csv");
    m << "problem,path,reference\n# comment\n\ntsp,c0.tsp,\ntsp,c1.tsp,100\nfsp,j5.fsp,\ntsp,missing.tsp,\n";
  }
  BenchmarkOptions opt;
  PipelineConfig uniform = quick(0);
  PipelineConfig pso = quick(0, 10);
  pso.tuner.method = TunerMethod::Pso;
  pso.tuner.pso.particles = 5;
  opt.configs = {{"uniform", uniform}, {"pso", pso}};
  opt.out_dir = (dir / "out").string();
  const BenchmarkSummary s = run_benchmark((dir / "manifest.csv").string(), opt);
  CHECK(s.rows == 6);
  CHECK(s.failures.empty());
  REQUIRE(s.missing.size() == 1);
  CHECK(count_lines(dir / "out" / "runs.csv") == 7);
  CHECK(std::filesystem::exists(dir / "out" / "aggregates.csv"));
  std::ifstream js(dir / "out" / "runs.json");
  const nlohmann::json doc = nlohmann::json::parse(js);
  CHECK(doc["runs"].size() == 6);

  {
    std::ofstream m(dir / "empty.csv");
    m << "problem,path,reference\n";
  }
  opt.out_dir = (dir / "empty_out").string();
  const BenchmarkSummary e = run_benchmark((dir / "empty.csv").string(), opt);
  CHECK(e.rows == 0);
  CHECK(count_lines(dir / "empty_out" / "runs.csv") == 1);
  CHECK_ERROR_KIND(read_manifest((dir / "nope.csv").string()), ErrorKind::Io);
}

TEST_CASE("thread count from the environment") {
  // ctest sets PERMQUBO_THREADS for every unit test.
  const auto t = env_thread_count();
  if (t) CHECK(*t >= 1);
}
