#include "parbo/objectives.hpp"

#include <cmath>
#include <numbers>

#include "parbo/errors.hpp"

namespace parbo {

double sphere(const Eigen::VectorXd& x) { return -x.squaredNorm(); }

double branin(const Eigen::VectorXd& x) {
  constexpr double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi, t = 1.0 / (8.0 * pi);
  const double q = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
  return -(q * q + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0);
}

double hartmann6(const Eigen::VectorXd& x) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < 6; ++j) e += A[i][j] * (x[j] - P[i][j]) * (x[j] - P[i][j]);
    s += alpha[i] * std::exp(-e);
  }
  return s;
}

Objective make_objective(const std::string& id, int dim) {
  Objective o;
  o.id = id;
  if (id == "sphere") {
    if (dim < 1) throw ConfigError("sphere needs dim >= 1");
    o.lower = Eigen::VectorXd::Constant(dim, -5.12);
    o.upper = Eigen::VectorXd::Constant(dim, 5.12);
    o.f = sphere;
    o.maximum = 0.0;
  } else if (id == "branin") {
    if (dim != 2) throw ConfigError("branin is two-dimensional");
    o.lower = Eigen::Vector2d(-5.0, 0.0);
    o.upper = Eigen::Vector2d(10.0, 15.0);
    o.f = branin;
    o.maximum = -0.397887;
  } else if (id == "hartmann6") {
    if (dim != 6) throw ConfigError("hartmann6 is six-dimensional");
    o.lower = Eigen::VectorXd::Zero(6);
    o.upper = Eigen::VectorXd::Ones(6);
    o.f = hartmann6;
    o.maximum = 3.32237;
  } else {
    throw ConfigError("unknown objective '" + id + "'");
  }
  return o;
}

}  // namespace parbo
