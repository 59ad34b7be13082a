#pragma once

#include <Eigen/Core>
#include <functional>

namespace parbo {

using CubeObjective = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value;
  int evaluations;
};

/// Maximize over the closed unit cube with the Nelder-Mead simplex method.
/// Every iterate is clipped to [0,1]^D before evaluation. The initial simplex
/// is x0 plus one vertex per axis offset by +0.05 (reflected inward near the
/// upper face). Stops when every vertex is within x_atol (max-norm) of the
/// best one or after max_evals objective calls.
NelderMeadResult nelder_mead_max(const CubeObjective& objective, const Eigen::VectorXd& x0,
                                 double x_atol, int max_evals);

}  // namespace parbo
