#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <random>

#include "parbo/errors.hpp"
#include "parbo/gp.hpp"
#include "test_support.hpp"

using namespace parbo;
using parbo::testing::DenseGp;

namespace {

Hypers unit_hypers(int dim) {
  Hypers h;
  h.sigma = 0.1;
  h.mu_bar = 0.0;
  h.amp = 1.0;
  h.lengths = Eigen::VectorXd::Ones(dim);
  return h;
}

}  // namespace

TEST_CASE("matern52 scalar values") {
  Hypers h = unit_hypers(2);
  h.amp = 1.7;
  Eigen::VectorXd a(2), b(2);
  a << 0.3, 0.4;
  CHECK(matern52(a, a, h) == doctest::Approx(1.7 * 1.7));

  h.amp = 1.0;
  b << 0.3 + 0.6, 0.4 + 0.8;  // unit displacement
  CHECK(matern52(a, b, h) == doctest::Approx(0.52400).epsilon(1e-5));

  // r depends only on displacement / length
  Hypers h2 = h;
  h2.lengths *= 2.0;
  Eigen::VectorXd half = a + 0.5 * (b - a);
  CHECK(matern52(a, b, h2) == doctest::Approx(matern52(a, half, h)).epsilon(1e-14));
}

TEST_CASE("gram matrix") {
  std::mt19937_64 rng(3);
  Hypers h = testing::random_hypers(rng, 3);
  SUBCASE("single point") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 3, 0.2);
    const auto K = gram(X, h, 0.25);
    CHECK(K.rows() == 1);
    CHECK(K(0, 0) == doctest::Approx(h.amp * h.amp + 0.25));
  }
  SUBCASE("duplicated location is rank deficient") {
    Eigen::MatrixXd X(2, 3);
    X.row(0) << 0.1, 0.2, 0.3;
    X.row(1) = X.row(0);
    const auto K = gram(X, h, 0.0);
    CHECK((K.array() - h.amp * h.amp).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(K.determinant()) < 1e-12);
  }
  SUBCASE("entrywise oracle, exact symmetry, nonnegative spectrum") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto data = testing::random_dataset(rng, 5 + trial % 10, 1 + trial % 5);
      const Hypers hh = testing::random_hypers(rng, data.dim());
      const double nug = 1e-10 * hh.amp * hh.amp;
      const auto K = gram(data.X(), hh, nug);
      for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
          const double ref = testing::matern52_reference(data.X().row(i).transpose(), data.X().row(j).transpose(), hh) +
                             (i == j ? nug : 0.0);
          CHECK(std::abs(K(i, j) - ref) <= 1e-13);
          CHECK(K(i, j) == K(j, i));
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12 * hh.amp * hh.amp);
    }
  }
}

TEST_CASE("fit with no data is the prior") {
  Hypers h = unit_hypers(2);
  h.mu_bar = 0.7;
  h.amp = 2.0;
  const auto post = fit(Dataset(2), h);
  for (double t : {0.0, 0.3, 1.0}) {
    const auto p = post.predict(Eigen::VectorXd::Constant(2, t));
    CHECK(p.mean == 0.7);
    CHECK(p.var == 4.0);
  }
}

TEST_CASE("near-noiseless interpolation and far-field decay") {
  Hypers h = unit_hypers(2);
  h.sigma = 1e-5;
  h.lengths = Eigen::VectorXd::Constant(2, 0.05);
  Dataset d(2);
  Eigen::VectorXd x1(2);
  x1 << 0.1, 0.1;
  d.append(x1, 3.0);
  const auto post = fit(d, h);
  const auto at = post.predict(x1);
  CHECK(at.mean == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(at.var < 1e-8);
  const auto far = post.predict(Eigen::VectorXd::Constant(2, 0.95));
  CHECK(far.mean == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(far.var == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("posterior and log marginal match the dense explicit-inverse oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 1 + trial % 5;
    const auto data = testing::random_dataset(rng, 3 + trial % 6, dim);
    const Hypers h = testing::random_hypers(rng, dim);
    const auto post = fit(data, h);
    const DenseGp oracle(data, h, post.nugget());
    for (int t = 0; t < 10; ++t) {
      const auto x = testing::random_point(rng, dim);
      const auto p = post.predict(x);
      CHECK(testing::relative_error(p.mean, oracle.mean(x)) < 1e-8);
      CHECK(testing::relative_error(p.var, std::max(0.0, oracle.var(x))) < 1e-8);
    }
    CHECK(testing::relative_error(log_marginal(data, h), oracle.log_marginal()) < 1e-8);
  }
}

TEST_CASE("log marginal of one observation is a scalar Gaussian") {
  Hypers h = unit_hypers(1);
  h.sigma = 0.3;
  h.mu_bar = 0.2;
  Dataset d(1);
  d.append(Eigen::VectorXd::Constant(1, 0.5), 1.1);
  const double v = 1.0 + 0.09 + 1e-10;
  const double expected = -0.5 * 0.81 / v - 0.5 * std::log(v) - 0.5 * std::log(2 * M_PI);
  CHECK(log_marginal(d, h) == doctest::Approx(expected).epsilon(1e-12));

  // shifting y and mu_bar together leaves the value unchanged
  Dataset shifted(d.X(), d.y().array() + 5.0);
  Hypers hs = h;
  hs.mu_bar += 5.0;
  CHECK(log_marginal(shifted, hs) == doctest::Approx(log_marginal(d, h)).epsilon(1e-12));
  CHECK_THROWS_AS(log_marginal(Dataset(1), h), DomainError);
}

TEST_CASE("predictive variance ignores y values") {
  std::mt19937_64 rng(23);
  const auto a = testing::random_dataset(rng, 12, 3);
  const auto b = Dataset(a.X(), testing::random_dataset(rng, 12, 3).y());
  const Hypers h = testing::random_hypers(rng, 3);
  const auto pa = fit(a, h), pb = fit(b, h);
  for (int t = 0; t < 20; ++t) {
    const auto x = testing::random_point(rng, 3);
    CHECK(pa.predict(x).var == pb.predict(x).var);
  }
}

TEST_CASE("variance is clamped into [0, amp^2]") {
  std::mt19937_64 rng(5);
  Hypers h = unit_hypers(2);
  h.sigma = 1e-6;
  Dataset d(2);
  for (int i = 0; i < 10; ++i) d.append(testing::random_point(rng, 2), 0.0);
  const auto post = fit(d, h);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto p = post.predict(d.location(i));
    CHECK(p.var >= 0.0);
    CHECK(p.var <= 1.0);
  }
}

TEST_CASE("invalid hypers are rejected") {
  Hypers h = unit_hypers(2);
  h.sigma = 0.0;
  CHECK_THROWS_AS(fit(Dataset(2), h), DomainError);
  h = unit_hypers(2);
  h.lengths[1] = -1;
  CHECK_THROWS_AS(fit(Dataset(2), h), DomainError);
  CHECK_THROWS_AS(fit(Dataset(3), unit_hypers(2)), DomainError);
}

TEST_CASE("factorization failure reports the attempted jitter levels") {
  Hypers h = unit_hypers(1);
  h.sigma = 1e-300;
  Dataset d(1);
  d.append(Eigen::VectorXd::Constant(1, 0.5), 0.0);
  d.append(Eigen::VectorXd::Constant(1, 0.5), 0.0);
  // Negative jitter schedule forces every attempt to fail.
  const JitterPolicy bad{-1.0, 0.5, -0.1};
  try {
    (void)fit(d, h, bad);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.jitter_levels().size() >= 1);
  }
  // Default schedule rescues the duplicate.
  CHECK_NOTHROW((void)fit(d, h));
}

TEST_CASE("chol_append") {
  SUBCASE("empty factor") {
    const auto L = chol_append(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), 4.0);
    CHECK(L.rows() == 1);
    CHECK(L(0, 0) == 2.0);
  }
  SUBCASE("duplicate point without nugget is degenerate") {
    Hypers h = unit_hypers(2);
    Eigen::MatrixXd X(1, 2);
    X << 0.3, 0.3;
    const Eigen::MatrixXd L = gram(X, h, 0.0).llt().matrixL();
    Eigen::VectorXd cross(1);
    cross << 1.0;
    CHECK_THROWS_AS(chol_append(L, cross, 1.0), DegeneracyError);
    IncrementalCholesky inc;
    inc.append(Eigen::VectorXd(0), 1.0);
    CHECK_THROWS_AS(inc.append(cross, 1.0), DegeneracyError);
  }
  SUBCASE("one at a time equals batch") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      const auto data = testing::random_dataset(rng, 6, 2);
      const Hypers h = testing::random_hypers(rng, 2);
      const Eigen::MatrixXd K = gram(data.X(), h, h.sigma * h.sigma);
      const Eigen::MatrixXd batch = K.llt().matrixL();
      Eigen::MatrixXd L(0, 0);
      IncrementalCholesky inc;
      for (Eigen::Index i = 0; i < K.rows(); ++i) {
        const Eigen::VectorXd cross = K.row(i).head(i).transpose();
        L = chol_append(L, cross, K(i, i));
        inc.append(cross, K(i, i));
      }
      CHECK((L - batch).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((inc.dense() - batch).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}
