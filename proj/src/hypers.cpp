#include "parbo/hypers.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "parbo/errors.hpp"

namespace parbo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 + r^2) without overflow for huge r
double log1p_sq(double r) {
  if (r > 1e150) return 2.0 * std::log(r);
  return std::log1p(r * r);
}

// log(1 + exp(a)) for any finite a
double softplus(double a) { return a > 40.0 ? a : std::log1p(std::exp(a)); }

// Sampling coordinates outside this box have zero density; keeps exp() of
// every parameter and of its square finite.
constexpr double kLogBound = 100.0;

// Median of t = sigma^2 / v_noise, whose CDF is (t log(1 + 1/t^2) + 2 atan t) / pi.
double noise_ratio_median() {
  auto cdf = [](double t) { return (t * log1p_sq(1.0 / t) + 2.0 * std::atan(t)) / M_PI; };
  double lo = 1e-6, hi = 1e6;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

PriorConfig resolve_prior(const PriorSettings& settings, const Dataset& data) {
  PriorConfig cfg;
  cfg.a2 = settings.a2;
  cfg.alpha_length = settings.alpha_length;
  cfg.lambda_length = settings.lambda_length;
  if (data.empty()) {
    cfg.mu_min = -1.0;
    cfg.mu_max = 1.0;
    cfg.v_noise = settings.v_noise.value_or(0.01);
  } else {
    const auto& y = data.y();
    cfg.mu_min = y.minCoeff();
    cfg.mu_max = y.maxCoeff();
    if (!(cfg.mu_max > cfg.mu_min)) {
      cfg.mu_min -= 1.0;
      cfg.mu_max += 1.0;
    }
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    cfg.v_noise = settings.v_noise.value_or(std::max(0.01 * var, 1e-6));
  }
  if (!(cfg.v_noise > 0 && cfg.a2 > 0 && cfg.alpha_length > 0 && cfg.lambda_length > 0))
    throw ConfigError("prior scales must be strictly positive");
  return cfg;
}

double log_prior(const Hypers& h, const PriorConfig& cfg) {
  if (!(h.mu_bar >= cfg.mu_min && h.mu_bar <= cfg.mu_max)) return kNegInf;
  // log P_noise = log log(1 + (v / sigma^2)^2), evaluated in log space
  const double log_ratio = std::log(cfg.v_noise) - 2.0 * std::log(h.sigma);
  double lp = std::log(softplus(2.0 * log_ratio));
  const double la = 2.0 * std::log(h.amp);
  lp += -la - 0.5 * (la / cfg.a2) * (la / cfg.a2);
  for (Eigen::Index k = 0; k < h.lengths.size(); ++k) {
    const double t = h.lengths[k];
    lp += -(cfg.alpha_length + 1.0) * std::log(t) - cfg.lambda_length / t;
  }
  return lp;
}

double log_posterior(const Hypers& h, const Dataset& data, const PriorConfig& cfg) {
  const double lp = log_prior(h, cfg);
  if (lp == kNegInf) return kNegInf;
  return log_marginal(data, h) + lp;
}

Eigen::VectorXd to_params(const Hypers& h) {
  Eigen::VectorXd p(h.lengths.size() + 3);
  p[0] = std::log(h.sigma * h.sigma);
  p[1] = h.mu_bar;
  p[2] = std::log(h.amp * h.amp);
  p.tail(h.lengths.size()) = h.lengths.array().log();
  return p;
}

Hypers from_params(const Eigen::VectorXd& p) {
  Hypers h;
  h.sigma = std::exp(0.5 * p[0]);
  h.mu_bar = p[1];
  h.amp = std::exp(0.5 * p[2]);
  h.lengths = p.tail(p.size() - 3).array().exp();
  return h;
}

LogDensity hypers_target(const Dataset& data, const PriorConfig& cfg, bool include_likelihood) {
  return [&data, cfg, include_likelihood](const Eigen::VectorXd& p) -> double {
    if (!p.allFinite()) return kNegInf;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (i != 1 && std::abs(p[i]) > kLogBound) return kNegInf;
    const Hypers h = from_params(p);
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(h.sigma) || !positive(h.amp) || !(h.lengths.array() > 0.0).all() ||
        !h.lengths.allFinite())
      return kNegInf;
    const double lp = log_prior(h, cfg);
    if (lp == kNegInf) return kNegInf;
    // Jacobian of the log reparameterization of sigma^2, theta_0^2 and theta_k.
    const double jac = p[0] + p[2] + p.tail(p.size() - 3).sum();
    double ll = 0.0;
    if (include_likelihood) {
      try {
        ll = log_marginal(data, h);
      } catch (const NumericalError&) {
        return kNegInf;  // unfactorizable covariance carries no mass
      }
    }
    const double out = ll + lp + jac;
    return std::isfinite(out) ? out : kNegInf;
  };
}

McmcState make_state(Eigen::VectorXd params, Eigen::VectorXd step_widths, const LogDensity& target) {
  McmcState s{std::move(params), 0.0, std::move(step_widths)};
  s.log_post = target(s.params);
  if (!std::isfinite(s.log_post)) throw DomainError("initial MCMC state has zero posterior density");
  return s;
}

Eigen::VectorXd default_step_widths(int dim, const PriorConfig& cfg) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(dim + 3);
  w[1] = 0.1 * (cfg.mu_max - cfg.mu_min);
  return w;
}

McmcState slice_step(McmcState state, int coord, const LogDensity& target, Rng& rng,
                     const SliceOptions& opts) {
  if (!std::isfinite(state.log_post)) throw DomainError("slice step from a state with non-finite density");
  const auto c = static_cast<Eigen::Index>(coord);
  const double x0 = state.params[c];
  const double w = state.step_widths[c];
  Eigen::VectorXd probe = state.params;
  auto f = [&](double v) {
    probe[c] = v;
    return target(probe);
  };

  std::exponential_distribution<double> expo(1.0);
  const double level = state.log_post - expo(rng);

  // Doubling.
  double left = x0 - w * uniform01(rng);
  double right = left + w;
  double f_left = f(left), f_right = f(right);
  for (int k = opts.max_doublings; k > 0 && (level < f_left || level < f_right); --k) {
    if (uniform01(rng) < 0.5) {
      left -= right - left;
      f_left = f(left);
    } else {
      right += right - left;
      f_right = f(right);
    }
  }

  // Neal's acceptance check for intervals built by doubling.
  auto acceptable = [&](double x1) {
    double lo = left, hi = right;
    bool differ = false;
    while (hi - lo > 1.1 * w) {
      const double mid = 0.5 * (lo + hi);
      if ((x0 < mid && x1 >= mid) || (x0 >= mid && x1 < mid)) differ = true;
      (x1 < mid ? hi : lo) = mid;
      if (differ && level >= f(lo) && level >= f(hi)) return false;
    }
    return true;
  };

  double lo = left, hi = right;
  for (int it = 0; it < opts.max_shrinks; ++it) {
    const double x1 = lo + uniform01(rng) * (hi - lo);
    const double f1 = f(x1);
    if (level < f1 && acceptable(x1)) {
      state.params[c] = x1;
      state.log_post = f1;
      return state;
    }
    (x1 < x0 ? lo : hi) = x1;
  }
  throw SamplerStuckError("slice sampler exceeded " + std::to_string(opts.max_shrinks) +
                          " shrinkage iterations on coordinate " + std::to_string(coord));
}

McmcState mcmc_sweep(McmcState state, const LogDensity& target, Rng& rng, const SliceOptions& opts) {
  for (int c = 0; c < static_cast<int>(state.params.size()); ++c) state = slice_step(std::move(state), c, target, rng, opts);
  return state;
}

Hypers prior_median_hypers(int dim, const PriorConfig& cfg) {
  static const double t_med = noise_ratio_median();
  Hypers h;
  h.sigma = std::sqrt(cfg.v_noise * t_med);
  h.mu_bar = 0.5 * (cfg.mu_min + cfg.mu_max);
  h.amp = 1.0;
  // theta ~ InvGamma(alpha, lambda)  <=>  lambda / theta ~ Gamma(alpha, 1)
  const double len = cfg.lambda_length / boost::math::gamma_p_inv(cfg.alpha_length, 0.5);
  h.lengths = Eigen::VectorXd::Constant(dim, len);
  return h;
}

Hypers sample_hypers(const Dataset& data, const PriorConfig& cfg, const Hypers& init, int t_mcmc,
                     std::uint64_t seed) {
  if (data.empty()) throw DomainError("hyper-parameter sampling needs at least one observation");
  if (t_mcmc <= 0) return init;
  const auto target = hypers_target(data, cfg);
  Hypers start = init;
  if (!(start.mu_bar >= cfg.mu_min && start.mu_bar <= cfg.mu_max))
    start.mu_bar = 0.5 * (cfg.mu_min + cfg.mu_max);
  Eigen::VectorXd p = to_params(start);
  double lp = target(p);
  if (!std::isfinite(lp)) {
    p = to_params(prior_median_hypers(data.dim(), cfg));
    lp = target(p);
  }
  McmcState state = make_state(std::move(p), default_step_widths(data.dim(), cfg), target);
  Rng rng(seed);
  for (int t = 0; t < t_mcmc; ++t) state = mcmc_sweep(std::move(state), target, rng);
  return state.hypers();
}

}  // namespace parbo
