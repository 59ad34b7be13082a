#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace parbo {

/// First n points of a digitally shifted Sobol sequence on [0,1]^dim. With a
/// margin the points are mapped affinely into [margin, 1 - margin].
std::vector<Eigen::VectorXd> sobol_design(int n, int dim, std::uint64_t seed, double margin = 0.0);

/// n uniform points in the box center +- radius, clipped to [margin, 1 - margin].
std::vector<Eigen::VectorXd> clustered_design(int n, const Eigen::VectorXd& center, double radius,
                                              std::uint64_t seed, double margin = 0.0);

/// L-infinity star discrepancy of a two-dimensional point set, exact up to
/// the choice of open or closed anchored boxes.
double star_discrepancy_2d(const std::vector<Eigen::VectorXd>& pts);

}  // namespace parbo
