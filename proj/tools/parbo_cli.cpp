#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>

#include "parbo/bench.hpp"
#include "parbo/driver.hpp"
#include "parbo/errors.hpp"

using namespace parbo;

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  RunConfig cfg = load_run_config(config_path);
  if (seed) cfg.seed = *seed;
  std::filesystem::create_directories(out_dir);
  const auto space = cfg.space();
  std::ofstream events(out_dir + "/events.ndjson");
  events << log_header(cfg).dump() << '\n';
  RunLog log;
  log.config = cfg;
  int status = 0;
  try {
    log = run(cfg, [&](const Event& e) {
      events << event_to_json(e, space).dump() << '\n';
      events.flush();
      log.events.push_back(e);
    });
  } catch (const RunAborted& e) {
    std::cerr << "run aborted: " << e.what() << '\n';
    status = 3;
  }
  std::ofstream summary(out_dir + "/summary.csv");
  write_summary(log, summary);
  const auto rows = summarize(log);
  std::cout << "evaluations: " << rows.size() << '\n';
  if (!rows.empty() && rows.back().best_so_far)
    std::cout << "best: " << std::setprecision(10) << *rows.back().best_so_far << '\n';
  std::cout << "log: " << out_dir << "/events.ndjson\nsummary: " << out_dir << "/summary.csv\n";
  return status;
}

int cmd_bench(const std::string& suite_name, const std::string& algos, int seeds, const std::string& out_dir) {
  const auto& suite = bench_suite(suite_name);
  std::vector<Algorithm> algorithms;
  std::stringstream ss(algos);
  for (std::string a; std::getline(ss, a, ',');)
    if (!a.empty()) algorithms.push_back(algorithm_from_name(a));
  if (algorithms.empty()) throw ConfigError("no algorithms given");

  BenchOptions opts;
  if (!out_dir.empty()) opts.log_dir = out_dir;
  std::cout << "suite,algorithm,seed,final_best,gap,bayes,poll,default,replay_ok,seconds\n";
  opts.progress = [](const BenchResult& r) {
    std::cout << r.suite << ',' << algorithm_name(r.algorithm) << ',' << r.seed << ',' << std::setprecision(10)
              << r.final_best << ',' << (r.gap ? std::to_string(*r.gap) : "") << ',' << r.replay.bayes << ','
              << r.replay.poll << ',' << r.replay.fallback << ',' << (r.replay.ok() ? 1 : 0) << ','
              << std::setprecision(4) << r.seconds << std::endl;
  };
  const auto results = run_bench(suite, algorithms, seeds, opts);

  std::map<Algorithm, std::vector<double>> best;
  bool all_ok = true;
  for (const auto& r : results) {
    best[r.algorithm].push_back(r.final_best);
    all_ok = all_ok && r.replay.ok();
  }
  std::cerr << "median final best over " << seeds << " seeds:\n";
  for (Algorithm a : algorithms)
    std::cerr << "  " << algorithm_name(a) << ": " << std::setprecision(10) << median(best[a]) << '\n';
  return all_ok ? 0 : 1;
}

int cmd_replay(const std::string& path, bool rerun, const std::string& summary_path) {
  const RunLog log = load_log(path);
  ReplayOptions opts;
  opts.rerun = rerun;
  const auto rep = replay(log, opts);
  if (!summary_path.empty()) {
    std::ofstream out(summary_path);
    write_summary(log, out);
  } else {
    write_summary(log, std::cout);
  }
  std::cerr << "evaluations completed: " << rep.evals_completed << " (failed " << rep.evals_failed << ")\n"
            << "inferences: " << rep.inferences << " (discarded " << rep.discarded << ")\n"
            << "choices: bayes " << rep.bayes << ", poll " << rep.poll << ", default " << rep.fallback << '\n'
            << "max in flight: " << rep.max_in_flight << " (m = " << log.config.m << ")\n"
            << "variance checks: " << rep.variance_checked << ", violations " << rep.variance_violations << '\n'
            << "edge violations: " << rep.edge_violations << '\n';
  if (rep.rerun_identical) std::cerr << "re-run identical: " << (*rep.rerun_identical ? "yes" : "no") << '\n';
  for (const auto& v : rep.violations) std::cerr << "VIOLATION " << v << '\n';
  std::cerr << (rep.ok() ? "replay ok\n" : "replay FAILED\n");
  return rep.ok() ? 0 : 1;
}

int cmd_suggest(const std::string& state_path, const std::string& config_path) {
  const RunLog log = load_log(state_path);
  const RunConfig cfg = load_run_config(config_path);
  const auto [choice, x] = suggest(log, cfg);
  const auto& d = choice.diagnostics;
  nlohmann::json out = {{"x", to_vec(x)},
                        {"u", to_vec(choice.x)},
                        {"provenance", provenance_name(choice.provenance)},
                        {"sd", encode_number(d.sd)},
                        {"tau", encode_number(d.tau)}};
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous parallel Bayesian optimization"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an optimization from a config file");
  std::string config_path, out_dir = "parbo_out";
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the configured seed");
  run_cmd->add_option("--out", out_dir, "Output directory for events.ndjson and summary.csv");

  auto* bench_cmd = app.add_subcommand("bench", "Head-to-head benchmark on a built-in suite");
  std::string suite = "branin", algos = "bop,fubar,random", bench_out;
  int seeds = 10;
  bench_cmd->add_option("--suite", suite, "branin | hartmann6 | sphere4");
  bench_cmd->add_option("--algorithms", algos, "Comma-separated list of bop, fubar, random");
  bench_cmd->add_option("--seeds", seeds, "Runs per algorithm")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench_out, "Directory for per-run event logs");

  auto* replay_cmd = app.add_subcommand("replay", "Re-derive the summary of a log and check its invariants");
  std::string log_path, summary_path;
  bool rerun = false;
  replay_cmd->add_option("--log", log_path, "Event log")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--summary", summary_path, "Write the summary here instead of stdout");
  replay_cmd->add_flag("--rerun", rerun, "Also re-run a simulated config and compare logs");

  auto* suggest_cmd = app.add_subcommand("suggest", "Propose one point from the state in a log");
  std::string state_path, suggest_config;
  suggest_cmd->add_option("--state", state_path, "Event log holding the current state")->required()->check(CLI::ExistingFile);
  suggest_cmd->add_option("--config", suggest_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(config_path, seed, out_dir);
    if (*bench_cmd) return cmd_bench(suite, algos, seeds, bench_out);
    if (*replay_cmd) return cmd_replay(log_path, rerun, summary_path);
    if (*suggest_cmd) return cmd_suggest(state_path, suggest_config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const LogFormatError& e) {
    std::cerr << "log error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
