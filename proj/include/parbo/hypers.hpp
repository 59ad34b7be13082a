#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>

#include "parbo/gp.hpp"
#include "parbo/random.hpp"

namespace parbo {

/// Prior scales as configured; v_noise unset means "derive from the data".
struct PriorSettings {
  std::optional<double> v_noise;
  double a2 = 1.0;
  double alpha_length = 2.0;
  double lambda_length = 0.5;
};

/// Fully resolved prior for one dataset.
struct PriorConfig {
  double v_noise = 0.01;
  double a2 = 1.0;
  double alpha_length = 2.0;
  double lambda_length = 0.5;
  double mu_min = -1.0;
  double mu_max = 1.0;
};

/// Resolve settings against a dataset: mu range from min/max y (widened by one
/// unit around a single distinct value), v_noise = 0.01 var(y) floored at 1e-6.
PriorConfig resolve_prior(const PriorSettings& settings, const Dataset& data);

/// Unnormalized log prior density over (sigma^2, mu_bar, theta_0^2, theta_k).
/// Returns -inf when mu_bar lies outside [mu_min, mu_max].
double log_prior(const Hypers& h, const PriorConfig& cfg);

double log_posterior(const Hypers& h, const Dataset& data, const PriorConfig& cfg);

// Sampling coordinates: [log sigma^2, mu_bar, log theta_0^2, log theta_1, ..., log theta_D].
Eigen::VectorXd to_params(const Hypers& h);
Hypers from_params(const Eigen::VectorXd& params);

using LogDensity = std::function<double(const Eigen::VectorXd& params)>;

/// Log density of the hypers posterior in sampling coordinates, Jacobian
/// included. With include_likelihood false only the prior remains.
LogDensity hypers_target(const Dataset& data, const PriorConfig& cfg, bool include_likelihood = true);

struct McmcState {
  Eigen::VectorXd params;
  double log_post = 0.0;
  Eigen::VectorXd step_widths;

  Hypers hypers() const { return from_params(params); }
};

/// Build a state at `params`, evaluating the target once. Throws DomainError if
/// the density there is not finite.
McmcState make_state(Eigen::VectorXd params, Eigen::VectorXd step_widths, const LogDensity& target);

/// Default slice widths: 1 in log coordinates, 0.1 (mu_max - mu_min) for mu_bar.
Eigen::VectorXd default_step_widths(int dim, const PriorConfig& cfg);

struct SliceOptions {
  int max_doublings = 10;
  int max_shrinks = 1000;
};

/// One univariate slice-sampling update of params[coord]: interval found by
/// doubling, point found by shrinkage. Throws SamplerStuckError if shrinkage
/// does not terminate.
McmcState slice_step(McmcState state, int coord, const LogDensity& target, Rng& rng,
                     const SliceOptions& opts = {});

/// One sweep: a slice step on every coordinate in order.
McmcState mcmc_sweep(McmcState state, const LogDensity& target, Rng& rng, const SliceOptions& opts = {});

/// Prior medians of every parameter (used when no warm start exists).
Hypers prior_median_hypers(int dim, const PriorConfig& cfg);

/// Run t_mcmc sweeps from init and return the last state's hypers. An init
/// whose posterior density is not finite (e.g. mu_bar outside the data range)
/// is repaired first; t_mcmc = 0 returns init untouched.
Hypers sample_hypers(const Dataset& data, const PriorConfig& cfg, const Hypers& init, int t_mcmc,
                     std::uint64_t seed);

}  // namespace parbo
