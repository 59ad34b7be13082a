#include <doctest.h>

#include <fstream>

#include "parbo/config.hpp"
#include "parbo/errors.hpp"

using namespace parbo;
using nlohmann::json;

TEST_CASE("defaults are written out in full") {
  const json j = to_json(RunConfig{});
  for (const char* k : {"space", "objective", "m", "budget", "algorithm", "seed", "init", "executor", "chooser"})
    CHECK(j.contains(k));
  for (const char* k : {"n_cand", "n_poll", "l_poll", "rho", "sem_min", "z", "x_atol", "t_mcmc", "exclude_edge_points",
                        "edge_tol", "nm_evals_per_dim"})
    CHECK(j["chooser"].contains(k));
  for (const char* k : {"v_noise", "a2", "alpha_length", "lambda_length"}) CHECK(j["chooser"]["prior"].contains(k));
}

TEST_CASE("json round trip") {
  RunConfig cfg;
  cfg.m = 3;
  cfg.seed = 12345678901234ull;
  cfg.algorithm = Algorithm::fubar;
  cfg.max_time = 50.0;
  cfg.init.design = InitConfig::Design::clustered;
  cfg.init.center = {0.1, 0.9};
  cfg.chooser.z = 4.0;
  cfg.chooser.edge_tol = 0.01;
  cfg.chooser.prior.v_noise = 0.3;
  const RunConfig back = run_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.seed == cfg.seed);
  CHECK(*back.chooser.edge_tol == 0.01);

  cfg.executor = RunConfig::ExecutorKind::subprocess;
  cfg.subprocess.command = {"python3", "f.py"};
  cfg.objective.reset();
  cfg.lower = {0, 0};
  cfg.upper = {1, 2};
  CHECK(to_json(run_config_from_json(to_json(cfg))) == to_json(cfg));
}

TEST_CASE("partial configs take defaults") {
  const auto cfg = run_config_from_json(json::parse(R"({"m": 2, "chooser": {"n_cand": 3}})"));
  CHECK(cfg.m == 2);
  CHECK(cfg.chooser.n_cand == 3);
  CHECK(cfg.chooser.n_poll == ChooserConfig{}.n_poll);
  CHECK(cfg.space().dim() == 2);
}

TEST_CASE("config errors") {
  auto bad = [](const char* text) { return run_config_from_json(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"nodes": 3})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"chooser": {"n_candidates": 3}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"chooser": {"prior": {"a3": 1}}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"m": "four"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"m": 0})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"budget": {"max_evals": null}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"algorithm": "ei"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"objective": {"id": "nope"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"space": {"lower": [0, 0, 0], "upper": [1, 1, 1]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"space": {"lower": [1, 0], "upper": [0, 1]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"executor": {"kind": "subprocess"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"executor": {"kind": "simulated", "command": ["x"]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"chooser": {"edge_tol": 0.7}})"), ConfigError);
  try {
    bad(R"({"chooser": {"prior": {"a3": 1}}})");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("chooser.prior.a3") != std::string::npos);
  }
}

TEST_CASE("shipped example configs load") {
  for (const char* f : {"branin_bop.json", "hartmann6_fubar.json", "branin_clustered_bop.json", "subprocess_branin.json"})
    CHECK_NOTHROW(load_run_config(std::string(PARBO_SOURCE_DIR) + "/configs/" + f));
  CHECK_THROWS_AS(load_run_config("/nonexistent.json"), ConfigError);
}
