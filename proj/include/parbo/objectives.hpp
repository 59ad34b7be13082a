#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

namespace parbo {

/// Built-in benchmark, written for maximization on its canonical box.
struct Objective {
  std::string id;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::function<double(const Eigen::VectorXd&)> f;
  std::optional<double> maximum;  // known global maximum, if any

  int dim() const noexcept { return static_cast<int>(lower.size()); }
};

double sphere(const Eigen::VectorXd& x);
/// Negated Branin; maximum -0.397887.
double branin(const Eigen::VectorXd& x);
/// Negated Hartmann-6; maximum about 3.32237.
double hartmann6(const Eigen::VectorXd& x);

/// id is one of sphere, branin, hartmann6. dim only matters for sphere.
/// Throws ConfigError on an unknown id or a dimension the function does not support.
Objective make_objective(const std::string& id, int dim);

}  // namespace parbo
