#include "parbo/space.hpp"

#include <cmath>
#include <string>

#include "parbo/errors.hpp"

namespace parbo {

ParameterSpace::ParameterSpace(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw DomainError("parameter space needs at least one dimension");
  if (lower_.size() != upper_.size())
    throw DomainError("lower and upper bounds have different lengths");
  for (Eigen::Index k = 0; k < lower_.size(); ++k) {
    if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k]) || !(lower_[k] < upper_[k]))
      throw DomainError("bounds for coordinate " + std::to_string(k) + " must satisfy lower < upper");
  }
}

Eigen::VectorXd ParameterSpace::to_unit(const Eigen::VectorXd& x_raw) const {
  if (x_raw.size() != lower_.size()) throw DomainError("point has wrong dimension");
  Eigen::VectorXd u(x_raw.size());
  for (Eigen::Index k = 0; k < x_raw.size(); ++k) {
    if (!(x_raw[k] >= lower_[k] && x_raw[k] <= upper_[k]))
      throw DomainError("coordinate " + std::to_string(k) + " = " + std::to_string(x_raw[k]) +
                        " outside [" + std::to_string(lower_[k]) + ", " + std::to_string(upper_[k]) + "]");
    u[k] = (x_raw[k] - lower_[k]) / (upper_[k] - lower_[k]);
  }
  return u;
}

Eigen::VectorXd ParameterSpace::from_unit(const Eigen::VectorXd& u) const {
  if (u.size() != lower_.size()) throw DomainError("point has wrong dimension");
  Eigen::VectorXd x(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (!(u[k] >= 0.0 && u[k] <= 1.0))
      throw DomainError("unit coordinate " + std::to_string(k) + " = " + std::to_string(u[k]) +
                        " outside [0, 1]");
    x[k] = lower_[k] + u[k] * (upper_[k] - lower_[k]);
  }
  return x;
}

bool is_edge_point(const Eigen::VectorXd& u, double edge_tol) {
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u[k] <= edge_tol || u[k] >= 1.0 - edge_tol) return true;
  }
  return false;
}

}  // namespace parbo
