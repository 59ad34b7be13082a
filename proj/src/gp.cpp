#include "parbo/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "parbo/errors.hpp"
#include "parbo/simd.hpp"

namespace parbo {

bool Hypers::operator==(const Hypers& other) const {
  return sigma == other.sigma && mu_bar == other.mu_bar && amp == other.amp &&
         lengths.size() == other.lengths.size() && lengths == other.lengths;
}

void check_hypers(const Hypers& h) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(h.sigma)) throw DomainError("noise sigma must be positive");
  if (!positive(h.amp)) throw DomainError("amplitude must be positive");
  if (!std::isfinite(h.mu_bar)) throw DomainError("prior mean must be finite");
  if (h.lengths.size() == 0) throw DomainError("length scales are empty");
  for (Eigen::Index k = 0; k < h.lengths.size(); ++k)
    if (!positive(h.lengths[k])) throw DomainError("length scale " + std::to_string(k) + " must be positive");
}

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() != y_.size()) throw DomainError("dataset locations and values differ in length");
  for (Eigen::Index i = 0; i < X_.rows(); ++i)
    for (Eigen::Index k = 0; k < X_.cols(); ++k)
      if (!(X_(i, k) >= 0.0 && X_(i, k) <= 1.0)) throw DomainError("dataset location outside the unit cube");
}

void Dataset::append(const Eigen::VectorXd& u, double value) {
  if (u.size() != X_.cols()) throw DomainError("appended point has wrong dimension");
  for (Eigen::Index k = 0; k < u.size(); ++k)
    if (!(u[k] >= 0.0 && u[k] <= 1.0)) throw DomainError("appended point outside the unit cube");
  const Eigen::Index n = X_.rows();
  X_.conservativeResize(n + 1, Eigen::NoChange);
  X_.row(n) = u.transpose();
  y_.conservativeResize(n + 1);
  y_[n] = value;
}

void Dataset::append(const Dataset& other) {
  if (other.dim() != dim()) throw DomainError("datasets have different dimensions");
  const Eigen::Index n = X_.rows();
  X_.conservativeResize(n + other.X_.rows(), Eigen::NoChange);
  X_.bottomRows(other.X_.rows()) = other.X_;
  y_.conservativeResize(n + other.y_.size());
  y_.tail(other.y_.size()) = other.y_;
}

double matern52(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Hypers& h) {
  const double r = ((xi - xj).array() / h.lengths.array()).matrix().norm();
  const double s = std::sqrt(5.0) * r;
  return h.amp * h.amp * (1.0 + s + (5.0 / 3.0) * r * r) * std::exp(-s);
}

void cross_covariance(const Eigen::MatrixXd& X, const Hypers& h, const Eigen::VectorXd& x, double* out) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (n == 0) return;
  const Eigen::VectorXd inv_len = h.lengths.cwiseInverse();
  simd::scaled_sqdist(X.data(), n, n, static_cast<std::size_t>(X.cols()), x.data(), inv_len.data(), out);
  simd::matern52(out, n, h.amp * h.amp, out);
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Hypers& h, double nugget) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd xj(X.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    xj = X.row(j).transpose();
    cross_covariance(X, h, xj, K.col(j).data());
  }
  // Mirror the lower triangle so the matrix is exactly symmetric regardless of kernel path.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) K(i, j) = K(j, i);
    K(j, j) = h.amp * h.amp + nugget;
  }
  return K;
}

namespace {

struct Factorization {
  Eigen::MatrixXd L;
  double nugget;
};

Factorization factorize(const Dataset& data, const Hypers& h, const JitterPolicy& jitter) {
  check_hypers(h);
  const double amp2 = h.amp * h.amp;
  Eigen::MatrixXd K = gram(data.X(), h, h.sigma * h.sigma);
  std::vector<double> tried;
  for (double rel = jitter.initial; rel <= jitter.maximum * (1.0 + 1e-9); rel *= jitter.growth) {
    const double nugget = rel * amp2;
    tried.push_back(nugget);
    Eigen::MatrixXd A = K;
    A.diagonal().array() += nugget;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      if (L.allFinite()) return {std::move(L), nugget};
    }
  }
  std::string levels;
  for (double t : tried) levels += (levels.empty() ? "" : ", ") + std::to_string(t);
  throw NumericalError("Cholesky factorization failed at jitter levels [" + levels + "]", std::move(tried));
}

}  // namespace

GpPosterior fit(Dataset data, const Hypers& hypers, const JitterPolicy& jitter) {
  check_hypers(hypers);
  if (hypers.dim() != data.dim()) throw DomainError("hypers and data have different dimensions");
  GpPosterior post(std::move(data), hypers);
  if (post.data_.empty()) return post;
  auto f = factorize(post.data_, hypers, jitter);
  post.chol_ = std::move(f.L);
  post.nugget_ = f.nugget;
  Eigen::VectorXd r = post.data_.y().array() - hypers.mu_bar;
  post.chol_.triangularView<Eigen::Lower>().solveInPlace(r);
  post.chol_.triangularView<Eigen::Lower>().adjoint().solveInPlace(r);
  post.alpha_ = std::move(r);
  return post;
}

void GpPosterior::whitened_cross(const Eigen::VectorXd& x, Eigen::VectorXd& k, Eigen::VectorXd& v) const {
  cross_covariance(data_.X(), hypers_, x, k.data());
  v = k;
  chol_.triangularView<Eigen::Lower>().solveInPlace(v);
}

Prediction GpPosterior::predict(const Eigen::VectorXd& x) const {
  const double amp2 = prior_var();
  const auto n = data_.size();
  if (n == 0) return {hypers_.mu_bar, amp2};
  Eigen::VectorXd k(n), v(n);
  whitened_cross(x, k, v);
  const double mean = hypers_.mu_bar + simd::dot(k.data(), alpha_.data(), n);
  const double var = amp2 - simd::dot(v.data(), v.data(), n);
  return {mean, std::clamp(var, 0.0, amp2)};
}

double log_marginal(const Dataset& data, const Hypers& hypers, const JitterPolicy& jitter) {
  if (data.empty()) throw DomainError("log marginal likelihood needs at least one observation");
  const auto f = factorize(data, hypers, jitter);
  Eigen::VectorXd r = data.y().array() - hypers.mu_bar;
  f.L.triangularView<Eigen::Lower>().solveInPlace(r);
  const double n = static_cast<double>(data.size());
  const double log_det = 2.0 * f.L.diagonal().array().log().sum();
  return -0.5 * r.squaredNorm() - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::MatrixXd chol_append(const Eigen::MatrixXd& chol, const Eigen::VectorXd& cross, double self_var) {
  const Eigen::Index k = chol.rows();
  if (cross.size() != k) throw DomainError("cross-covariance length does not match factor");
  Eigen::VectorXd w = cross;
  if (k > 0) chol.triangularView<Eigen::Lower>().solveInPlace(w);
  const double pivot = self_var - w.squaredNorm();
  if (!(pivot > 0.0)) throw DegeneracyError("extended covariance is not positive definite", pivot);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k + 1, k + 1);
  out.topLeftCorner(k, k) = chol;
  out.row(k).head(k) = w.transpose();
  out(k, k) = std::sqrt(pivot);
  return out;
}

void IncrementalCholesky::solve(const double* rhs, double* w) const {
  const std::size_t k = diag_.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double* row = packed_.data() + i * (i + 1) / 2;
    w[i] = (rhs[i] - simd::dot(row, w, i)) / diag_[i];
  }
}

void IncrementalCholesky::append_row(const double* w, double corner) {
  const std::size_t k = diag_.size();
  packed_.insert(packed_.end(), w, w + k);
  packed_.push_back(corner);
  diag_.push_back(corner);
}

void IncrementalCholesky::append(const Eigen::VectorXd& cross, double self_var) {
  if (static_cast<std::size_t>(cross.size()) != size())
    throw DomainError("cross-covariance length does not match factor");
  Eigen::VectorXd w(cross.size());
  solve(cross.data(), w.data());
  const double pivot = self_var - w.squaredNorm();
  if (!(pivot > 0.0)) throw DegeneracyError("extended covariance is not positive definite", pivot);
  append_row(w.data(), std::sqrt(pivot));
}

Eigen::MatrixXd IncrementalCholesky::dense() const {
  const auto k = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) L(i, j) = packed_[static_cast<std::size_t>(i * (i + 1) / 2 + j)];
  return L;
}

}  // namespace parbo
