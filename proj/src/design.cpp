#include "parbo/design.hpp"

#include <algorithm>
#include <boost/random/sobol.hpp>
#include <cmath>

#include "parbo/errors.hpp"
#include "parbo/random.hpp"

namespace parbo {

std::vector<Eigen::VectorXd> sobol_design(int n, int dim, std::uint64_t seed, double margin) {
  if (n < 1 || dim < 1) throw DomainError("design needs n >= 1 and dim >= 1");
  if (!(margin >= 0.0 && margin < 0.5)) throw DomainError("design margin must lie in [0, 0.5)");
  boost::random::sobol engine(static_cast<unsigned>(dim));
  Rng rng(seed);
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = rng();

  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd u(dim);
    for (int k = 0; k < dim; ++k) {
      const std::uint64_t v = static_cast<std::uint64_t>(engine()) ^ shift[static_cast<std::size_t>(k)];
      u[k] = std::ldexp(static_cast<double>(v >> 11), -53);
    }
    out.push_back(margin + (1.0 - 2.0 * margin) * u.array());
  }
  return out;
}

std::vector<Eigen::VectorXd> clustered_design(int n, const Eigen::VectorXd& center, double radius,
                                              std::uint64_t seed, double margin) {
  if (n < 1) throw DomainError("design needs n >= 1");
  if (!(radius > 0.0)) throw DomainError("cluster radius must be > 0");
  if ((center.array() < 0.0).any() || (center.array() > 1.0).any())
    throw DomainError("cluster center must lie in the unit cube");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd u(center.size());
    for (Eigen::Index k = 0; k < center.size(); ++k)
      u[k] = std::clamp(center[k] + radius * (2.0 * uniform01(rng) - 1.0), margin, 1.0 - margin);
    out.push_back(std::move(u));
  }
  return out;
}

double star_discrepancy_2d(const std::vector<Eigen::VectorXd>& pts) {
  const std::size_t n = pts.size();
  if (n == 0) return 1.0;
  std::vector<double> xs{1.0}, ys{1.0};
  for (const auto& p : pts) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double worst = 0.0;
  std::vector<double> col;
  for (double a : xs) {
    // y coordinates of points in the strip x <= a (closed) and x < a (open)
    col.clear();
    std::vector<double> open;
    for (const auto& p : pts) {
      if (p[0] <= a) col.push_back(p[1]);
      if (p[0] < a) open.push_back(p[1]);
    }
    std::sort(col.begin(), col.end());
    std::sort(open.begin(), open.end());
    for (double b : ys) {
      const double vol = a * b;
      const auto closed = static_cast<double>(std::upper_bound(col.begin(), col.end(), b) - col.begin());
      const auto strict = static_cast<double>(std::lower_bound(open.begin(), open.end(), b) - open.begin());
      worst = std::max({worst, closed / static_cast<double>(n) - vol, vol - strict / static_cast<double>(n)});
    }
  }
  return worst;
}

}  // namespace parbo
