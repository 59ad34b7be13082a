#pragma once

#include <Eigen/Core>

namespace parbo {

/// Box-bounded parameter domain. Everything inside the optimizer works on the
/// unit cube; raw coordinates only appear at the evaluator boundary.
class ParameterSpace {
 public:
  ParameterSpace(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }

  /// Raw box coordinates to [0,1]^D. Throws DomainError naming the first
  /// coordinate outside [lower, upper].
  Eigen::VectorXd to_unit(const Eigen::VectorXd& x_raw) const;

  /// Exact affine inverse of to_unit.
  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// True iff some coordinate lies within edge_tol of 0 or 1.
bool is_edge_point(const Eigen::VectorXd& u, double edge_tol);

}  // namespace parbo
