#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "parbo/gp.hpp"
#include "parbo/random.hpp"

namespace parbo {

/// A lazily realized draw f^ from a GP posterior. Each new location is sampled
/// from its Gaussian conditional given the base data and every earlier query;
/// the conditional covariance factor grows by one row per new location.
/// Single owner only.
class SampledFunction {
 public:
  struct Query {
    double value;
    double base_mean;  // posterior mean under the base data only
    double base_var;   // posterior latent variance under the base data only
  };

  SampledFunction(std::shared_ptr<const GpPosterior> base, std::uint64_t seed);

  /// Sample (or recall) f^(x).
  double query(const Eigen::VectorXd& x) { return query_full(x).value; }
  Query query_full(const Eigen::VectorXd& x);

  std::size_t num_queries() const noexcept { return values_.size(); }
  /// Rows in the conditional factor; degenerate locations are not added.
  std::size_t factor_size() const noexcept { return chol_.size(); }
  const GpPosterior& base() const noexcept { return *base_; }
  Eigen::MatrixXd factor() const { return chol_.dense(); }

 private:
  std::shared_ptr<const GpPosterior> base_;
  Rng rng_;
  int dim_;
  std::size_t n_base_;

  // all queried locations, row-major (for memo lookup)
  std::vector<double> locations_;
  std::vector<Query> values_;

  // locations in the factor, column-major with stride capacity_
  std::vector<double> factor_cols_;
  std::size_t capacity_ = 0;
  std::vector<double> whitened_;   // chol_base^-1 k_base(q) per factor member, n_base_ each
  std::vector<double> innovations_; // standard normals used for factor members
  IncrementalCholesky chol_;

  // scratch
  Eigen::VectorXd k_base_, v_base_;
  std::vector<double> cross_, w_;
  Eigen::VectorXd inv_len_;

  void grow_factor_storage();
};

inline double sf_query(SampledFunction& sf, const Eigen::VectorXd& x) { return sf.query(x); }

/// Power-law barrier (threshold / s)^z; +inf at s == 0.
double barrier(double s, double threshold, double z);

enum class CandidateMode { plain, barrier };

struct CandidateSearch {
  double x_atol = 1e-3;
  int max_evals = 100;
  double tau = 0.0;   // barrier threshold
  double z = 10.0;    // barrier exponent
};

struct Candidate {
  Eigen::VectorXd x;
  double fhat = 0.0;   // sampled value f^(x)
  double score = 0.0;  // maximized objective: fhat, or g = fhat - barrier
  double sd = 0.0;     // posterior predictive std-dev at x
};

/// Draw a fresh function from `base`, maximize it (or its barrier-penalized
/// version) with Nelder-Mead from a uniform random start, and report the maximizer.
Candidate sample_candidate(const std::shared_ptr<const GpPosterior>& base, const CandidateSearch& search,
                           Rng& rng, CandidateMode mode);

}  // namespace parbo
