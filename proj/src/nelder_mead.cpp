#include "parbo/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "parbo/errors.hpp"

namespace parbo {

namespace {

Eigen::VectorXd clip_unit(Eigen::VectorXd x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

}  // namespace

NelderMeadResult nelder_mead_max(const CubeObjective& objective, const Eigen::VectorXd& x0,
                                 double x_atol, int max_evals) {
  const auto dim = x0.size();
  if (dim == 0) throw DomainError("Nelder-Mead needs a non-empty start point");
  constexpr double kStep = 0.05;
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  int evals = 0;
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> fs;
  xs.reserve(static_cast<std::size_t>(dim + 1));
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return objective(x);
  };

  xs.push_back(clip_unit(x0));
  fs.push_back(eval(xs[0]));
  for (Eigen::Index k = 0; k < dim && evals < max_evals; ++k) {
    Eigen::VectorXd v = xs[0];
    v[k] = v[k] + kStep <= 1.0 ? v[k] + kStep : v[k] - kStep;
    v = clip_unit(std::move(v));
    fs.push_back(eval(v));
    xs.push_back(std::move(v));
  }

  std::vector<std::size_t> order(xs.size());
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] > fs[b]; });
    std::vector<Eigen::VectorXd> xs2;
    std::vector<double> fs2;
    for (auto i : order) {
      xs2.push_back(std::move(xs[i]));
      fs2.push_back(fs[i]);
    }
    xs = std::move(xs2);
    fs = std::move(fs2);
  };
  auto converged = [&] {
    double diam = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) diam = std::max(diam, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
    return diam < x_atol;
  };

  if (xs.size() < static_cast<std::size_t>(dim + 1)) {
    sort_vertices();
    return {xs[0], fs[0], evals};
  }

  sort_vertices();
  const std::size_t worst = xs.size() - 1;
  while (evals < max_evals && !converged()) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < worst; ++i) centroid += xs[i];
    centroid /= static_cast<double>(worst);

    const Eigen::VectorXd xr = clip_unit(centroid + kReflect * (centroid - xs[worst]));
    const double fr = eval(xr);
    bool shrink = false;
    if (fr > fs[0]) {
      if (evals < max_evals) {
        Eigen::VectorXd xe = clip_unit(centroid + kExpand * (xr - centroid));
        const double fe = eval(xe);
        if (fe > fr) {
          xs[worst] = std::move(xe);
          fs[worst] = fe;
        } else {
          xs[worst] = xr;
          fs[worst] = fr;
        }
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr > fs[worst - 1]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else if (evals < max_evals) {
      if (fr > fs[worst]) {
        Eigen::VectorXd xc = clip_unit(centroid + kContract * (xr - centroid));
        const double fc = eval(xc);
        if (fc >= fr) {
          xs[worst] = std::move(xc);
          fs[worst] = fc;
        } else {
          shrink = true;
        }
      } else {
        Eigen::VectorXd xc = clip_unit(centroid + kContract * (xs[worst] - centroid));
        const double fc = eval(xc);
        if (fc > fs[worst]) {
          xs[worst] = std::move(xc);
          fs[worst] = fc;
        } else {
          shrink = true;
        }
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i < xs.size() && evals < max_evals; ++i) {
        xs[i] = clip_unit(xs[0] + kShrink * (xs[i] - xs[0]));
        fs[i] = eval(xs[i]);
      }
    }
    sort_vertices();
  }
  return {xs[0], fs[0], evals};
}

}  // namespace parbo
