#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "parbo/gp.hpp"
#include "parbo/hypers.hpp"
#include "parbo/random.hpp"
#include "parbo/thompson.hpp"

namespace parbo {

/// Every tunable of the BOP and FuBar VC choosers.
struct ChooserConfig {
  int n_cand = 10;
  int n_poll = 10;
  double l_poll = 0.5;
  double rho = 0.5;
  double sem_min = 1e-3;  // in units of the observed y standard deviation
  double z = 10.0;
  double x_atol = 1e-3;
  int t_mcmc = 10;
  int burn_in = 30;  // extra sweeps when there is no warm start
  double improvement_epsilon = 0.0;
  bool exclude_edge_points = true;
  std::optional<double> edge_tol;  // defaults to x_atol
  int nm_evals_per_dim = 50;
  PriorSettings prior;

  double effective_edge_tol() const { return edge_tol.value_or(x_atol); }
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct PendingSet {
  struct Entry {
    std::uint64_t ticket;
    Eigen::VectorXd u;
  };
  std::vector<Entry> entries;

  /// Throws DomainError on a duplicate ticket.
  void add(std::uint64_t ticket, Eigen::VectorXd u);
  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

enum class Provenance { init, bayes, poll, random };

std::string_view provenance_name(Provenance p) noexcept;
/// Inverse of provenance_name; throws DomainError on unknown names.
Provenance provenance_from_name(std::string_view name);

struct FilterCounts {
  int generated = 0;
  int after_collision = 0;
  int after_sd = 0;
  int after_edge = 0;
  int after_improvement = 0;
  int poll_generated = 0;
  int poll_after_sd = 0;
  int poll_after_edge = 0;

  bool operator==(const FilterCounts&) const = default;
};

/// What the chooser saw and did. Model quantities (hypers, tau, sd, improvement)
/// are in standardized y units: y_std = (y - y_offset) / y_scale.
struct ChoiceDiagnostics {
  std::optional<Hypers> hypers;
  double y_offset = 0.0;
  double y_scale = 1.0;
  double tau = 0.0;
  double sd = 0.0;
  double improvement = 0.0;
  double incumbent = 0.0;
  FilterCounts counts;

  bool operator==(const ChoiceDiagnostics&) const = default;
};

struct Choice {
  Eigen::VectorXd x;
  Provenance provenance = Provenance::random;
  ChoiceDiagnostics diagnostics;

  bool operator==(const Choice& other) const {
    return x == other.x && provenance == other.provenance && diagnostics == other.diagnostics;
  }
};

/// Variance-control threshold max(rho sigma, sem_min).
double variance_threshold(const ChooserConfig& cfg, const Hypers& h);

/// Impute pending results: jointly sample f^ at the pending locations from the
/// posterior given data, add N(0, sigma^2) noise, and append them to data.
Dataset fantasize(const Dataset& data, const PendingSet& pending, const Hypers& hypers, Rng& rng);

/// Index of the location maximizing the posterior mean and that maximum.
std::pair<std::size_t, double> best_posterior_mean(const GpPosterior& post);

/// Largest posterior mean over all locations in the posterior's dataset.
double incumbent(const GpPosterior& post);

/// Barrier-penalized incumbent: max of mu(x_i) - b(sd(x_i)).
double barrier_incumbent(const GpPosterior& post, double tau, double z);

inline double improvement(double value, double inc) { return value > inc ? value - inc : 0.0; }

/// Closed-form Gaussian expected improvement over `inc` at x.
double expected_improvement(const GpPosterior& post, const Eigen::VectorXd& x, double inc);

struct PollResult {
  Eigen::VectorXd x;
  double sd;
};

/// Poll candidates around `center`: center_k + l_poll theta_k eta_k with eta standard normal.
std::vector<Eigen::VectorXd> poll_candidates(const Eigen::VectorXd& center, const Eigen::VectorXd& lengths,
                                             double l_poll, int n_poll, Rng& rng, bool clip = true);

/// Random step around the best posterior-mean location; returns the surviving
/// candidate with the largest predictive sd, or nothing.
std::optional<PollResult> poll_step(const GpPosterior& post_fant, const ChooserConfig& cfg, Rng& rng,
                                    FilterCounts* counts = nullptr);

/// Uniform point in the cube, kept edge_tol away from the faces when edge exclusion is on.
Eigen::VectorXd default_step(int dim, const ChooserConfig& cfg, Rng& rng);

/// Bayesian Optimization and Poll steps.
Choice bop_choose(const Dataset& data, const PendingSet& pending, const ChooserConfig& cfg,
                  const std::optional<Hypers>& warm, std::uint64_t seed);

/// Function Barrier Variance Control.
Choice fubar_choose(const Dataset& data, const PendingSet& pending, const ChooserConfig& cfg,
                    const std::optional<Hypers>& warm, std::uint64_t seed);

}  // namespace parbo
