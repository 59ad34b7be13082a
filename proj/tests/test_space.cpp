#include <doctest.h>

#include <random>

#include "parbo/errors.hpp"
#include "parbo/space.hpp"

using parbo::ParameterSpace;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}
}  // namespace

TEST_CASE("to_unit maps the Branin box corners and center") {
  const ParameterSpace box(vec({-5, 0}), vec({10, 15}));
  CHECK(box.to_unit(vec({-5, 0})) == vec({0, 0}));
  CHECK(box.to_unit(vec({10, 15})) == vec({1, 1}));
  CHECK(box.to_unit(vec({2.5, 7.5})).isApprox(vec({0.5, 0.5}), 1e-15));
}

TEST_CASE("from_unit is the affine inverse") {
  const ParameterSpace box(vec({-5, 0}), vec({10, 15}));
  CHECK(box.from_unit(vec({0, 0})) == box.lower());
  CHECK(box.from_unit(vec({1, 1})) == box.upper());
  CHECK(box.from_unit(vec({0.5, 0.5})).isApprox(vec({2.5, 7.5}), 1e-15));
}

TEST_CASE("out-of-box inputs are rejected with the coordinate named") {
  const ParameterSpace box(vec({-5, 0}), vec({10, 15}));
  try {
    (void)box.to_unit(vec({0, 16}));
    FAIL("expected DomainError");
  } catch (const parbo::DomainError& e) {
    CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
  }
  CHECK_THROWS_AS((void)box.from_unit(vec({0.5, 1.5})), parbo::DomainError);
  CHECK_THROWS_AS((void)box.from_unit(vec({-0.1, 0.5})), parbo::DomainError);
  CHECK_THROWS_AS(ParameterSpace(vec({1, 0}), vec({0, 1})), parbo::DomainError);
  CHECK_THROWS_AS(ParameterSpace(vec({0}), vec({0, 1})), parbo::DomainError);
}

TEST_CASE("edge detection") {
  CHECK_FALSE(parbo::is_edge_point(vec({0.5, 0.5}), 0.4));
  CHECK_FALSE(parbo::is_edge_point(vec({0.5, 0.5, 0.5}), 1e-3));
  CHECK(parbo::is_edge_point(vec({0.0, 0.5}), 1e-3));
  CHECK(parbo::is_edge_point(vec({0.5, 1.0}), 1e-3));
  CHECK_FALSE(parbo::is_edge_point(vec({0.002, 0.5}), 1e-3));
}

TEST_CASE("property: random round trips and edge monotonicity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> wide(-100.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int dim = 1 + trial % 6;
    Eigen::VectorXd lo(dim), hi(dim), x(dim), un(dim);
    for (int k = 0; k < dim; ++k) {
      const double a = wide(rng), b = wide(rng);
      lo[k] = std::min(a, b);
      hi[k] = std::max(a, b) + 1e-3;
      x[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
      un[k] = u(rng);
    }
    const ParameterSpace box(lo, hi);
    const Eigen::VectorXd back = box.from_unit(box.to_unit(x));
    for (int k = 0; k < dim; ++k) CHECK(std::abs(back[k] - x[k]) <= 1e-10 * std::max(1.0, std::abs(x[k])));
    const Eigen::VectorXd un2 = box.to_unit(box.from_unit(un));
    CHECK((un2 - un).cwiseAbs().maxCoeff() <= 1e-12);

    const double t = 0.49 * u(rng);
    if (parbo::is_edge_point(un, t)) {
      for (double t2 = t; t2 < 0.5; t2 += 0.05) CHECK(parbo::is_edge_point(un, t2));
    }
  }
}
