#include "parbo/thompson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parbo/errors.hpp"
#include "parbo/nelder_mead.hpp"
#include "parbo/simd.hpp"

namespace parbo {

SampledFunction::SampledFunction(std::shared_ptr<const GpPosterior> base, std::uint64_t seed)
    : base_(std::move(base)), rng_(seed) {
  if (!base_) throw DomainError("sampled function needs a posterior");
  dim_ = base_->data().dim();
  n_base_ = base_->data().size();
  k_base_.resize(static_cast<Eigen::Index>(n_base_));
  v_base_.resize(static_cast<Eigen::Index>(n_base_));
  inv_len_ = base_->hypers().lengths.cwiseInverse();
}

void SampledFunction::grow_factor_storage() {
  const std::size_t new_cap = std::max<std::size_t>(16, capacity_ * 2);
  const std::size_t used = chol_.size();
  std::vector<double> cols(new_cap * static_cast<std::size_t>(dim_));
  for (int k = 0; k < dim_; ++k)
    std::copy_n(factor_cols_.begin() + static_cast<std::ptrdiff_t>(k * capacity_), used,
                cols.begin() + static_cast<std::ptrdiff_t>(k * new_cap));
  factor_cols_ = std::move(cols);
  capacity_ = new_cap;
}

SampledFunction::Query SampledFunction::query_full(const Eigen::VectorXd& x) {
  const auto d = static_cast<std::size_t>(dim_);
  if (x.size() != dim_) throw DomainError("query has wrong dimension");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::equal(x.data(), x.data() + d, locations_.begin() + static_cast<std::ptrdiff_t>(i * d)))
      return values_[i];
  }

  const Hypers& h = base_->hypers();
  const double amp2 = h.amp * h.amp;
  double base_mean = h.mu_bar;
  double base_var = amp2;
  if (n_base_ > 0) {
    base_->whitened_cross(x, k_base_, v_base_);
    base_mean += simd::dot(k_base_.data(), base_->alpha().data(), n_base_);
    base_var = std::clamp(amp2 - simd::dot(v_base_.data(), v_base_.data(), n_base_), 0.0, amp2);
  }

  const std::size_t m = chol_.size();
  cross_.resize(m);
  w_.resize(m);
  double cond_mean = base_mean;
  double cond_var = base_var;
  if (m > 0) {
    simd::scaled_sqdist(factor_cols_.data(), capacity_, m, d, x.data(), inv_len_.data(), cross_.data());
    simd::matern52(cross_.data(), m, amp2, cross_.data());
    if (n_base_ > 0) {
      for (std::size_t j = 0; j < m; ++j)
        cross_[j] -= simd::dot(v_base_.data(), whitened_.data() + j * n_base_, n_base_);
    }
    chol_.solve(cross_.data(), w_.data());
    cond_mean += simd::dot(w_.data(), innovations_.data(), m);
    cond_var -= simd::dot(w_.data(), w_.data(), m);
  }

  Query q{cond_mean, base_mean, base_var};
  // Below the jitter floor the location is determined by earlier ones: use the
  // conditional mean and keep it out of the factor.
  const double floor = JitterPolicy{}.initial * amp2;
  if (cond_var > floor) {
    const double xi = standard_normal(rng_);
    const double corner = std::sqrt(cond_var);
    q.value = cond_mean + corner * xi;
    if (m == capacity_) grow_factor_storage();
    for (std::size_t k = 0; k < d; ++k) factor_cols_[k * capacity_ + m] = x[static_cast<Eigen::Index>(k)];
    chol_.append_row(w_.data(), corner);
    innovations_.push_back(xi);
    whitened_.insert(whitened_.end(), v_base_.data(), v_base_.data() + n_base_);
  }
  locations_.insert(locations_.end(), x.data(), x.data() + d);
  values_.push_back(q);
  return q;
}

double barrier(double s, double threshold, double z) {
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(threshold / s, z);
}

Candidate sample_candidate(const std::shared_ptr<const GpPosterior>& base, const CandidateSearch& search,
                           Rng& rng, CandidateMode mode) {
  const int dim = base->data().dim();
  SampledFunction sf(base, rng());
  Eigen::VectorXd x0(dim);
  for (int k = 0; k < dim; ++k) x0[k] = uniform01(rng);

  CubeObjective objective;
  if (mode == CandidateMode::plain) {
    objective = [&sf](const Eigen::VectorXd& x) { return sf.query(x); };
  } else {
    objective = [&sf, &search](const Eigen::VectorXd& x) {
      const auto q = sf.query_full(x);
      return q.value - barrier(std::sqrt(q.base_var), search.tau, search.z);
    };
  }
  const auto best = nelder_mead_max(objective, x0, search.x_atol, search.max_evals);
  const auto q = sf.query_full(best.x);
  return Candidate{best.x, q.value, best.value, std::sqrt(q.base_var)};
}

}  // namespace parbo
