#include "parbo/chooser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "parbo/errors.hpp"
#include "parbo/space.hpp"

namespace parbo {

void ChooserConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("chooser: " + what); };
  if (n_cand < 1) fail("n_cand must be >= 1");
  if (n_poll < 1) fail("n_poll must be >= 1");
  if (!(l_poll > 0)) fail("l_poll must be > 0");
  if (!(rho >= 0)) fail("rho must be >= 0");
  if (!(sem_min >= 0)) fail("sem_min must be >= 0");
  if (!(z > 0)) fail("z must be > 0");
  if (!(x_atol > 0)) fail("x_atol must be > 0");
  if (t_mcmc < 1) fail("t_mcmc must be >= 1");
  if (burn_in < 0) fail("burn_in must be >= 0");
  if (!(improvement_epsilon >= 0)) fail("improvement_epsilon must be >= 0");
  if (nm_evals_per_dim < 1) fail("nm_evals_per_dim must be >= 1");
  const double tol = effective_edge_tol();
  if (!(tol > 0 && tol < 0.5)) fail("edge_tol must lie in (0, 0.5)");
  if (prior.v_noise && !(*prior.v_noise > 0)) fail("v_noise must be > 0");
  if (!(prior.a2 > 0 && prior.alpha_length > 0 && prior.lambda_length > 0)) fail("prior scales must be > 0");
}

void PendingSet::add(std::uint64_t ticket, Eigen::VectorXd u) {
  for (const auto& e : entries)
    if (e.ticket == ticket) throw DomainError("duplicate pending ticket " + std::to_string(ticket));
  entries.push_back({ticket, std::move(u)});
}

std::string_view provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::init: return "init";
    case Provenance::bayes: return "bayes";
    case Provenance::poll: return "poll";
    case Provenance::random: return "default";
  }
  return "default";
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "init") return Provenance::init;
  if (name == "bayes") return Provenance::bayes;
  if (name == "poll") return Provenance::poll;
  if (name == "default") return Provenance::random;
  throw DomainError("unknown provenance '" + std::string(name) + "'");
}

double variance_threshold(const ChooserConfig& cfg, const Hypers& h) {
  return std::max(cfg.rho * h.sigma, cfg.sem_min);
}

Dataset fantasize(const Dataset& data, const PendingSet& pending, const Hypers& hypers, Rng& rng) {
  if (pending.empty()) return data;
  auto post = std::make_shared<const GpPosterior>(fit(data, hypers));
  SampledFunction draw(post, rng());
  Dataset out = data;
  for (const auto& e : pending.entries) {
    const double f = draw.query(e.u);
    out.append(e.u, f + hypers.sigma * standard_normal(rng));
  }
  return out;
}

std::pair<std::size_t, double> best_posterior_mean(const GpPosterior& post) {
  const auto& data = post.data();
  if (data.empty()) throw DomainError("incumbent needs at least one location");
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double m = post.predict(data.location(i)).mean;
    if (m > best_mean) {
      best_mean = m;
      best = i;
    }
  }
  return {best, best_mean};
}

double incumbent(const GpPosterior& post) { return best_posterior_mean(post).second; }

double barrier_incumbent(const GpPosterior& post, double tau, double z) {
  const auto& data = post.data();
  if (data.empty()) throw DomainError("incumbent needs at least one location");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = post.predict(data.location(i));
    best = std::max(best, p.mean - barrier(std::sqrt(p.var), tau, z));
  }
  return best;
}

double expected_improvement(const GpPosterior& post, const Eigen::VectorXd& x, double inc) {
  const auto p = post.predict(x);
  const double s = std::sqrt(p.var);
  if (s <= 0.0) return std::max(p.mean - inc, 0.0);
  const double u = (p.mean - inc) / s;
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
  return s * (u * cdf + pdf);
}

std::vector<Eigen::VectorXd> poll_candidates(const Eigen::VectorXd& center, const Eigen::VectorXd& lengths,
                                             double l_poll, int n_poll, Rng& rng, bool clip) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n_poll));
  for (int j = 0; j < n_poll; ++j) {
    Eigen::VectorXd x(center.size());
    for (Eigen::Index k = 0; k < center.size(); ++k) x[k] = center[k] + l_poll * lengths[k] * standard_normal(rng);
    if (clip) x = x.cwiseMax(0.0).cwiseMin(1.0);
    out.push_back(std::move(x));
  }
  return out;
}

std::optional<PollResult> poll_step(const GpPosterior& post_fant, const ChooserConfig& cfg, Rng& rng,
                                    FilterCounts* counts) {
  const auto [best, best_mean] = best_posterior_mean(post_fant);
  (void)best_mean;
  const Hypers& h = post_fant.hypers();
  const double tau = variance_threshold(cfg, h);
  const double edge_tol = cfg.effective_edge_tol();
  const auto cands = poll_candidates(post_fant.data().location(best), h.lengths, cfg.l_poll, cfg.n_poll, rng);

  int after_sd = 0, after_edge = 0;
  std::optional<PollResult> pick;
  for (const auto& x : cands) {
    const double sd = std::sqrt(post_fant.predict(x).var);
    if (!(sd > tau)) continue;
    ++after_sd;
    if (cfg.exclude_edge_points && is_edge_point(x, edge_tol)) continue;
    ++after_edge;
    if (!pick || sd > pick->sd) pick = PollResult{x, sd};
  }
  if (counts) {
    counts->poll_generated = static_cast<int>(cands.size());
    counts->poll_after_sd = after_sd;
    counts->poll_after_edge = after_edge;
  }
  return pick;
}

Eigen::VectorXd default_step(int dim, const ChooserConfig& cfg, Rng& rng) {
  const double tol = cfg.effective_edge_tol();
  Eigen::VectorXd x(dim);
  if (!cfg.exclude_edge_points) {
    for (int k = 0; k < dim; ++k) x[k] = uniform01(rng);
    return x;
  }
  do {
    for (int k = 0; k < dim; ++k) x[k] = tol + (1.0 - 2.0 * tol) * uniform01(rng);
  } while (is_edge_point(x, tol));
  return x;
}

namespace {

struct Standardized {
  Dataset data;
  double offset;
  double scale;
};

Standardized standardize(const Dataset& data) {
  const auto& y = data.y();
  const double offset = y.mean();
  double scale = std::sqrt((y.array() - offset).square().mean());
  if (!(scale > 1e-12) || !std::isfinite(scale)) scale = 1.0;
  Eigen::VectorXd ys = (y.array() - offset) / scale;
  return {Dataset(data.X(), std::move(ys)), offset, scale};
}

bool collides(const Eigen::VectorXd& x, const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data.X().row(static_cast<Eigen::Index>(i)).transpose() == x) return true;
  return false;
}

Choice choose(const Dataset& data, const PendingSet& pending, const ChooserConfig& cfg,
              const std::optional<Hypers>& warm, std::uint64_t seed, CandidateMode mode) {
  cfg.validate();
  if (data.empty()) throw DomainError("chooser needs at least one observation");
  const int dim = data.dim();
  for (const auto& e : pending.entries)
    if (e.u.size() != dim) throw DomainError("pending point has wrong dimension");

  Rng rng(seed);
  Choice choice;
  auto& diag = choice.diagnostics;

  // (1) hyper-parameters
  const auto st = standardize(data);
  diag.y_offset = st.offset;
  diag.y_scale = st.scale;
  const PriorConfig prior = resolve_prior(cfg.prior, st.data);
  const bool cold = !(warm && warm->dim() == dim);
  const Hypers init = cold ? prior_median_hypers(dim, prior) : *warm;
  const Hypers h = sample_hypers(st.data, prior, init, cfg.t_mcmc + (cold ? cfg.burn_in : 0), rng());
  diag.hypers = h;
  const double tau = variance_threshold(cfg, h);
  diag.tau = tau;

  // (2) fantasies, (3) candidates
  const Dataset fant = fantasize(st.data, pending, h, rng);
  const auto post = std::make_shared<const GpPosterior>(fit(fant, h));
  const CandidateSearch search{cfg.x_atol, cfg.nm_evals_per_dim * dim, tau, cfg.z};
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(cfg.n_cand));
  for (int j = 0; j < cfg.n_cand; ++j) cands.push_back(sample_candidate(post, search, rng, mode));
  diag.counts.generated = static_cast<int>(cands.size());

  std::erase_if(cands, [&](const Candidate& c) { return collides(c.x, fant); });
  diag.counts.after_collision = static_cast<int>(cands.size());

  // (4) variance control; with the barrier the hard filter is dropped
  if (mode == CandidateMode::plain) std::erase_if(cands, [&](const Candidate& c) { return !(c.sd > tau); });
  diag.counts.after_sd = static_cast<int>(cands.size());
  if (cfg.exclude_edge_points) {
    const double tol = cfg.effective_edge_tol();
    std::erase_if(cands, [&](const Candidate& c) { return is_edge_point(c.x, tol); });
  }
  diag.counts.after_edge = static_cast<int>(cands.size());

  // (5)-(6) improvement over the incumbent
  const double inc = mode == CandidateMode::plain ? incumbent(*post) : barrier_incumbent(*post, tau, cfg.z);
  diag.incumbent = inc;
  const Candidate* best = nullptr;
  double best_imp = 0.0;
  int survivors = 0;
  for (const auto& c : cands) {
    const double imp = improvement(mode == CandidateMode::plain ? c.fhat : c.score, inc);
    if (!(imp > cfg.improvement_epsilon)) continue;
    ++survivors;
    if (!best || imp > best_imp) {
      best = &c;
      best_imp = imp;
    }
  }
  diag.counts.after_improvement = survivors;

  // (7)
  if (best) {
    choice.x = best->x;
    choice.provenance = Provenance::bayes;
    diag.sd = best->sd;
    diag.improvement = best_imp;
    return choice;
  }
  // (8)
  if (auto polled = poll_step(*post, cfg, rng, &diag.counts)) {
    choice.x = polled->x;
    choice.provenance = Provenance::poll;
    diag.sd = polled->sd;
    return choice;
  }
  // (9)
  choice.x = default_step(dim, cfg, rng);
  choice.provenance = Provenance::random;
  diag.sd = std::sqrt(post->predict(choice.x).var);
  return choice;
}

}  // namespace

Choice bop_choose(const Dataset& data, const PendingSet& pending, const ChooserConfig& cfg,
                  const std::optional<Hypers>& warm, std::uint64_t seed) {
  return choose(data, pending, cfg, warm, seed, CandidateMode::plain);
}

Choice fubar_choose(const Dataset& data, const PendingSet& pending, const ChooserConfig& cfg,
                    const std::optional<Hypers>& warm, std::uint64_t seed) {
  return choose(data, pending, cfg, warm, seed, CandidateMode::barrier);
}

}  // namespace parbo
