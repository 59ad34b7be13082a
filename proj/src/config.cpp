#include "parbo/config.hpp"

#include <fstream>
#include <set>

#include "parbo/errors.hpp"
#include "parbo/objectives.hpp"

namespace parbo {

using nlohmann::json;

std::string_view algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::bop: return "bop";
    case Algorithm::fubar: return "fubar";
    case Algorithm::random: return "random";
  }
  return "?";
}

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "bop") return Algorithm::bop;
  if (name == "fubar") return Algorithm::fubar;
  if (name == "random") return Algorithm::random;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

namespace {

// Reads an object section, remembering which keys were used so that leftovers
// can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = v;
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), where(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where(it.key().c_str()) + "'");
  }

 private:
  std::string where(const char* key = nullptr) const {
    if (!key) return path_.empty() ? "config" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const ChooserConfig& c) {
  json prior = {{"v_noise", c.prior.v_noise ? json(*c.prior.v_noise) : json(nullptr)},
                {"a2", c.prior.a2},
                {"alpha_length", c.prior.alpha_length},
                {"lambda_length", c.prior.lambda_length}};
  return {{"n_cand", c.n_cand},
          {"n_poll", c.n_poll},
          {"l_poll", c.l_poll},
          {"rho", c.rho},
          {"sem_min", c.sem_min},
          {"z", c.z},
          {"x_atol", c.x_atol},
          {"t_mcmc", c.t_mcmc},
          {"burn_in", c.burn_in},
          {"improvement_epsilon", c.improvement_epsilon},
          {"exclude_edge_points", c.exclude_edge_points},
          {"edge_tol", c.edge_tol ? json(*c.edge_tol) : json(nullptr)},
          {"nm_evals_per_dim", c.nm_evals_per_dim},
          {"prior", prior}};
}

namespace {

ChooserConfig read_chooser(Section s) {
  ChooserConfig c;
  s.get("n_cand", c.n_cand);
  s.get("n_poll", c.n_poll);
  s.get("l_poll", c.l_poll);
  s.get("rho", c.rho);
  s.get("sem_min", c.sem_min);
  s.get("z", c.z);
  s.get("x_atol", c.x_atol);
  s.get("t_mcmc", c.t_mcmc);
  s.get("burn_in", c.burn_in);
  s.get("improvement_epsilon", c.improvement_epsilon);
  s.get("exclude_edge_points", c.exclude_edge_points);
  s.get_optional("edge_tol", c.edge_tol);
  s.get("nm_evals_per_dim", c.nm_evals_per_dim);
  if (s.has("prior")) {
    auto p = s.child("prior");
    p.get_optional("v_noise", c.prior.v_noise);
    p.get("a2", c.prior.a2);
    p.get("alpha_length", c.prior.alpha_length);
    p.get("lambda_length", c.prior.lambda_length);
    p.finish();
  }
  s.finish();
  return c;
}

}  // namespace

ChooserConfig chooser_config_from_json(const json& j) {
  auto c = read_chooser(Section(j, "chooser"));
  c.validate();
  return c;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["space"] = {{"lower", cfg.lower}, {"upper", cfg.upper}};
  if (cfg.objective)
    j["objective"] = {{"id", cfg.objective->id}, {"dim", cfg.objective->dim}, {"noise_sd", cfg.objective->noise_sd}};
  else
    j["objective"] = nullptr;
  j["m"] = cfg.m;
  j["budget"] = {{"max_evals", cfg.max_evals ? json(*cfg.max_evals) : json(nullptr)},
                 {"max_time", cfg.max_time ? json(*cfg.max_time) : json(nullptr)}};
  j["algorithm"] = algorithm_name(cfg.algorithm);
  j["seed"] = cfg.seed;
  j["init"] = {{"design", cfg.init.design == InitConfig::Design::sobol ? "sobol" : "clustered"},
               {"center", cfg.init.center},
               {"radius", cfg.init.radius}};
  if (cfg.executor == RunConfig::ExecutorKind::simulated)
    j["executor"] = {{"kind", "simulated"},
                     {"eval_median", cfg.simulated.eval_median},
                     {"eval_sigma_log", cfg.simulated.eval_sigma_log},
                     {"inference_median", cfg.simulated.inference_median},
                     {"inference_sigma_log", cfg.simulated.inference_sigma_log},
                     {"failure_prob", cfg.simulated.failure_prob}};
  else
    j["executor"] = {{"kind", "subprocess"}, {"command", cfg.subprocess.command}};
  j["chooser"] = to_json(cfg.chooser);
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  Section root(j, "");
  if (root.has("space")) {
    auto s = root.child("space");
    s.get("lower", cfg.lower);
    s.get("upper", cfg.upper);
    s.finish();
  }
  if (j.contains("objective") && j.at("objective").is_null()) {
    root.has("objective");
    cfg.objective.reset();
  } else if (root.has("objective")) {
    auto s = root.child("objective");
    s.get("id", cfg.objective->id);
    s.get("dim", cfg.objective->dim);
    s.get("noise_sd", cfg.objective->noise_sd);
    s.finish();
  }
  root.get("m", cfg.m);
  if (root.has("budget")) {
    auto s = root.child("budget");
    s.get_optional("max_evals", cfg.max_evals);
    s.get_optional("max_time", cfg.max_time);
    s.finish();
  }
  std::string algo(algorithm_name(cfg.algorithm));
  root.get("algorithm", algo);
  cfg.algorithm = algorithm_from_name(algo);
  root.get("seed", cfg.seed);
  if (root.has("init")) {
    auto s = root.child("init");
    std::string design = "sobol";
    s.get("design", design);
    if (design == "sobol")
      cfg.init.design = InitConfig::Design::sobol;
    else if (design == "clustered")
      cfg.init.design = InitConfig::Design::clustered;
    else
      throw ConfigError("init.design must be sobol or clustered");
    s.get("center", cfg.init.center);
    s.get("radius", cfg.init.radius);
    s.finish();
  }
  if (root.has("executor")) {
    auto s = root.child("executor");
    std::string kind = "simulated";
    s.get("kind", kind);
    if (kind == "simulated") {
      cfg.executor = RunConfig::ExecutorKind::simulated;
      s.get("eval_median", cfg.simulated.eval_median);
      s.get("eval_sigma_log", cfg.simulated.eval_sigma_log);
      s.get("inference_median", cfg.simulated.inference_median);
      s.get("inference_sigma_log", cfg.simulated.inference_sigma_log);
      s.get("failure_prob", cfg.simulated.failure_prob);
    } else if (kind == "subprocess") {
      cfg.executor = RunConfig::ExecutorKind::subprocess;
      s.get("command", cfg.subprocess.command);
    } else {
      throw ConfigError("executor.kind must be simulated or subprocess");
    }
    s.finish();
  }
  if (root.has("chooser")) cfg.chooser = read_chooser(root.child("chooser"));
  root.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return run_config_from_json(j);
}

ParameterSpace RunConfig::space() const {
  if (!lower.empty() || !upper.empty()) {
    if (lower.size() != upper.size()) throw ConfigError("space.lower and space.upper differ in length");
    return ParameterSpace(Eigen::Map<const Eigen::VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size())),
                          Eigen::Map<const Eigen::VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size())));
  }
  if (!objective) throw ConfigError("space bounds are required without a built-in objective");
  const auto o = make_objective(objective->id, objective->dim);
  return ParameterSpace(o.lower, o.upper);
}

void RunConfig::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (!max_evals && !max_time) throw ConfigError("budget needs max_evals or max_time");
  if (max_evals && *max_evals < 1) throw ConfigError("budget.max_evals must be >= 1");
  if (max_time && !(*max_time > 0)) throw ConfigError("budget.max_time must be > 0");
  chooser.validate();
  ParameterSpace sp = [&] {
    try {
      return space();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("space: ") + e.what());
    }
  }();
  if (objective) {
    if (!(objective->noise_sd >= 0)) throw ConfigError("objective.noise_sd must be >= 0");
    const auto o = make_objective(objective->id, objective->dim);
    if (sp.dim() != o.dim()) throw ConfigError("space dimension does not match the objective");
  }
  if (!init.center.empty() && static_cast<int>(init.center.size()) != sp.dim())
    throw ConfigError("init.center has the wrong dimension");
  for (double c : init.center)
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("init.center must lie in the unit cube");
  if (!(init.radius > 0)) throw ConfigError("init.radius must be > 0");
  if (executor == ExecutorKind::simulated) {
    if (!objective) throw ConfigError("the simulated executor needs a built-in objective");
    const auto& s = simulated;
    if (!(s.eval_median > 0 && s.inference_median > 0)) throw ConfigError("executor medians must be > 0");
    if (!(s.eval_sigma_log >= 0 && s.inference_sigma_log >= 0)) throw ConfigError("executor sigma_log must be >= 0");
    if (!(s.failure_prob >= 0 && s.failure_prob < 1)) throw ConfigError("executor.failure_prob must lie in [0, 1)");
  } else if (subprocess.command.empty()) {
    throw ConfigError("executor.command must not be empty");
  }
}

}  // namespace parbo
