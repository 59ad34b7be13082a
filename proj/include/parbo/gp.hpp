#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace parbo {

/// GP model parameters. Noise and amplitude are in y-units, length scales in
/// unit-cube units.
struct Hypers {
  double sigma = 1.0;        // observation noise std-dev
  double mu_bar = 0.0;       // constant prior mean
  double amp = 1.0;          // kernel amplitude theta_0
  Eigen::VectorXd lengths;   // per-axis length scales theta_1..theta_D

  int dim() const noexcept { return static_cast<int>(lengths.size()); }
  bool operator==(const Hypers& other) const;
};

/// Throws DomainError unless sigma, amp and every length are finite and positive.
void check_hypers(const Hypers& h);

/// Observations on the unit cube. Locations are stored column-major so that
/// each coordinate is a contiguous column.
class Dataset {
 public:
  explicit Dataset(int dim) : X_(0, dim), y_(0) {}
  Dataset(Eigen::MatrixXd X, Eigen::VectorXd y);

  int dim() const noexcept { return static_cast<int>(X_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(y_.size()); }
  bool empty() const noexcept { return y_.size() == 0; }

  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  Eigen::VectorXd location(std::size_t i) const { return X_.row(static_cast<Eigen::Index>(i)).transpose(); }

  void append(const Eigen::VectorXd& u, double value);
  void append(const Dataset& other);

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
};

/// Matern-5/2 ARD covariance between two points.
double matern52(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Hypers& h);

/// Covariance matrix of the rows of X plus nugget on the diagonal. Exactly symmetric.
Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Hypers& h, double nugget);

/// Covariances k(X_i, x) for every row of X, written to out (size X.rows()).
void cross_covariance(const Eigen::MatrixXd& X, const Hypers& h, const Eigen::VectorXd& x,
                      double* out);

/// Jitter schedule for factorizing K + sigma^2 I.
struct JitterPolicy {
  double initial = 1e-10;  // relative to amp^2
  double growth = 10.0;
  double maximum = 1e-4;   // relative to amp^2
};

struct Prediction {
  double mean;
  double var;  // latent f variance, no observation noise
};

/// Exact GP posterior: immutable after fit().
class GpPosterior {
 public:
  const Dataset& data() const noexcept { return data_; }
  const Hypers& hypers() const noexcept { return hypers_; }
  /// Lower Cholesky factor of K + (sigma^2 + nugget) I.
  const Eigen::MatrixXd& chol() const noexcept { return chol_; }
  /// (K + (sigma^2 + nugget) I)^-1 (y - mu_bar)
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  /// Diagonal jitter actually used on top of sigma^2.
  double nugget() const noexcept { return nugget_; }
  double prior_var() const noexcept { return hypers_.amp * hypers_.amp; }

  Prediction predict(const Eigen::VectorXd& x) const;

  /// Fills k with the cross-covariance to the data and v with chol^-1 k.
  /// Both must have size data().size().
  void whitened_cross(const Eigen::VectorXd& x, Eigen::VectorXd& k, Eigen::VectorXd& v) const;

 private:
  friend GpPosterior fit(Dataset data, const Hypers& hypers, const JitterPolicy& jitter);

  GpPosterior(Dataset data, Hypers hypers) : data_(std::move(data)), hypers_(std::move(hypers)) {}

  Dataset data_;
  Hypers hypers_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double nugget_ = 0.0;
};

GpPosterior fit(Dataset data, const Hypers& hypers, const JitterPolicy& jitter = {});

inline Prediction predict(const GpPosterior& post, const Eigen::VectorXd& x) { return post.predict(x); }

/// Log marginal likelihood of the data under the GP prior with the given hypers.
double log_marginal(const Dataset& data, const Hypers& hypers, const JitterPolicy& jitter = {});

/// Factor of the covariance extended by one point: new row is (chol^-1 cross)^T
/// with corner sqrt(self_var - |chol^-1 cross|^2). Throws DegeneracyError when
/// the corner argument is not positive.
Eigen::MatrixXd chol_append(const Eigen::MatrixXd& chol, const Eigen::VectorXd& cross,
                            double self_var);

/// Growable lower-triangular factor in packed row storage. Used by sampled
/// functions that add one location at a time.
class IncrementalCholesky {
 public:
  IncrementalCholesky() = default;

  std::size_t size() const noexcept { return diag_.size(); }

  /// Forward substitution: returns w with L w = rhs (rhs.size() == size()).
  void solve(const double* rhs, double* w) const;

  /// Append a row given the already solved w and a positive corner.
  void append_row(const double* w, double corner);

  /// Solve, check the pivot, append. Throws DegeneracyError on a non-positive pivot.
  void append(const Eigen::VectorXd& cross, double self_var);

  /// Dense lower-triangular copy.
  Eigen::MatrixXd dense() const;

 private:
  std::vector<double> packed_;  // row i occupies [i(i+1)/2, i(i+1)/2 + i]
  std::vector<double> diag_;
};

}  // namespace parbo
