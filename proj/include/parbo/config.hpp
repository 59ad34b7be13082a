#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "parbo/chooser.hpp"
#include "parbo/space.hpp"

namespace parbo {

enum class Algorithm { bop, fubar, random };

std::string_view algorithm_name(Algorithm a) noexcept;
/// Throws ConfigError on unknown names.
Algorithm algorithm_from_name(std::string_view name);

struct ObjectiveConfig {
  std::string id = "branin";
  int dim = 2;
  double noise_sd = 0.0;
};

struct InitConfig {
  enum class Design { sobol, clustered } design = Design::sobol;
  std::vector<double> center;  // unit-cube coordinates; empty means the cube center
  double radius = 0.05;
};

struct SimulatedExecutorConfig {
  double eval_median = 1.0;
  double eval_sigma_log = 0.5;
  double inference_median = 0.1;
  double inference_sigma_log = 0.5;
  double failure_prob = 0.0;
};

struct SubprocessExecutorConfig {
  std::vector<std::string> command;
};

struct RunConfig {
  std::vector<double> lower;  // empty means the objective's canonical box
  std::vector<double> upper;
  std::optional<ObjectiveConfig> objective = ObjectiveConfig{};
  int m = 4;
  std::optional<int> max_evals = 64;
  std::optional<double> max_time;
  Algorithm algorithm = Algorithm::bop;
  std::uint64_t seed = 0;
  InitConfig init;
  enum class ExecutorKind { simulated, subprocess } executor = ExecutorKind::simulated;
  SimulatedExecutorConfig simulated;
  SubprocessExecutorConfig subprocess;
  ChooserConfig chooser;

  /// Search box: explicit bounds, or the objective's canonical box.
  ParameterSpace space() const;
  /// Throws ConfigError describing the first problem found.
  void validate() const;
};

/// Full configuration with every field present, defaults included.
nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys take defaults; unknown keys and wrong types are ConfigErrors.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const ChooserConfig& cfg);
ChooserConfig chooser_config_from_json(const nlohmann::json& j);

}  // namespace parbo
