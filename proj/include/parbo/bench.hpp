#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "parbo/config.hpp"
#include "parbo/driver.hpp"

namespace parbo {

struct BenchSuite {
  std::string name;
  std::string objective;
  int dim;
  int max_evals;
  int m;
};

/// branin (64 evals, m=8), hartmann6 (128 evals, m=8), sphere4 (64 evals, m=4).
const std::vector<BenchSuite>& bench_suites();
/// Throws ConfigError on an unknown name.
const BenchSuite& bench_suite(const std::string& name);

/// Config for one benchmark run; chooser settings come from `base`.
RunConfig bench_config(const BenchSuite& suite, Algorithm algo, std::uint64_t seed,
                       const ChooserConfig& base = {});

struct BenchResult {
  std::string suite;
  Algorithm algorithm;
  std::uint64_t seed;
  double final_best;
  std::optional<double> gap;  // distance to the known maximum
  ReplayReport replay;
  double seconds;
};

struct BenchOptions {
  ChooserConfig chooser;
  std::string log_dir;  // persist each run's log here when non-empty
  std::function<void(const BenchResult&)> progress;
};

std::vector<BenchResult> run_bench(const BenchSuite& suite, const std::vector<Algorithm>& algorithms, int seeds,
                                   const BenchOptions& opts = {});

double median(std::vector<double> v);

}  // namespace parbo
