#include "parbo/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <limits>

#include "parbo/errors.hpp"
#include "parbo/objectives.hpp"

namespace parbo {

const std::vector<BenchSuite>& bench_suites() {
  static const std::vector<BenchSuite> suites = {
      {"branin", "branin", 2, 64, 8},
      {"hartmann6", "hartmann6", 6, 128, 8},
      {"sphere4", "sphere", 4, 64, 4},
  };
  return suites;
}

const BenchSuite& bench_suite(const std::string& name) {
  for (const auto& s : bench_suites())
    if (s.name == name) return s;
  throw ConfigError("unknown bench suite '" + name + "'");
}

RunConfig bench_config(const BenchSuite& suite, Algorithm algo, std::uint64_t seed, const ChooserConfig& base) {
  RunConfig cfg;
  cfg.objective = ObjectiveConfig{suite.objective, suite.dim, 0.0};
  cfg.m = suite.m;
  cfg.max_evals = suite.max_evals;
  cfg.algorithm = algo;
  cfg.seed = seed;
  cfg.chooser = base;
  return cfg;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<BenchResult> run_bench(const BenchSuite& suite, const std::vector<Algorithm>& algorithms, int seeds,
                                   const BenchOptions& opts) {
  const auto maximum = make_objective(suite.objective, suite.dim).maximum;
  if (!opts.log_dir.empty()) std::filesystem::create_directories(opts.log_dir);
  std::vector<BenchResult> out;
  for (Algorithm a : algorithms) {
    for (int s = 0; s < seeds; ++s) {
      const auto cfg = bench_config(suite, a, static_cast<std::uint64_t>(s), opts.chooser);
      const auto t0 = std::chrono::steady_clock::now();
      const RunLog log = run(cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      BenchResult r{suite.name, a, cfg.seed, -std::numeric_limits<double>::infinity(), std::nullopt, {}, secs};
      for (const auto& row : summarize(log))
        if (row.best_so_far) r.final_best = *row.best_so_far;
      if (maximum) r.gap = *maximum - r.final_best;
      r.replay = replay(log);
      if (!opts.log_dir.empty())
        persist(log, opts.log_dir + "/" + suite.name + "_" + std::string(algorithm_name(a)) + "_" +
                         std::to_string(s) + ".ndjson");
      if (opts.progress) opts.progress(r);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace parbo
