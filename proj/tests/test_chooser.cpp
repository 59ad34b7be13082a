#include <doctest.h>

#include <cmath>
#include <random>

#include "parbo/chooser.hpp"
#include "parbo/errors.hpp"
#include "parbo/space.hpp"
#include "test_support.hpp"

using namespace parbo;

namespace {

Hypers unit_hypers(int dim, double length = 0.3) {
  Hypers h;
  h.sigma = 0.1;
  h.mu_bar = 0.0;
  h.amp = 1.0;
  h.lengths = Eigen::VectorXd::Constant(dim, length);
  return h;
}

Eigen::VectorXd pt(double a, double b) {
  Eigen::VectorXd x(2);
  x << a, b;
  return x;
}

ChooserConfig fast_cfg() {
  ChooserConfig c;
  c.n_cand = 5;
  c.n_poll = 5;
  c.t_mcmc = 3;
  c.nm_evals_per_dim = 30;
  return c;
}

Dataset clustered(int n, std::uint64_t seed) {
  Dataset d(2);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 0.01);
  for (int i = 0; i < n; ++i) {
    const auto x = pt(0.3 + g(gen), 0.6 + g(gen));
    d.append(x, -((x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.6) * (x[1] - 0.6)));
  }
  return d;
}

// dense sampling of a smooth surface in a small box
Dataset smooth_cluster(int n, std::uint64_t seed) {
  Dataset d(2);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int i = 0; i < n; ++i) {
    const auto x = pt(0.5 + u(gen), 0.5 + u(gen));
    const double a = -5.0 + 15.0 * x[0], b = 15.0 * x[1];
    const double c = b - 5.1 / (4 * M_PI * M_PI) * a * a + 5.0 / M_PI * a - 6.0;
    d.append(x, -(c * c + 10.0 * (1.0 - 1.0 / (8 * M_PI)) * std::cos(a) + 10.0));
  }
  return d;
}

}  // namespace

TEST_CASE("fantasize") {
  Rng rng(1);
  Dataset data(2);
  data.append(pt(0.1, 0.1), 0.5);
  const Hypers h = unit_hypers(2, 0.05);
  SUBCASE("no pending is the identity") {
    const auto out = fantasize(data, PendingSet{}, h, rng);
    CHECK(out.X() == data.X());
    CHECK(out.y() == data.y());
  }
  SUBCASE("far pending point follows the prior predictive") {
    PendingSet p;
    p.add(1, pt(0.9, 0.9));
    std::vector<double> ys;
    for (int i = 0; i < 10000; ++i) ys.push_back(fantasize(data, p, h, rng).y()[1]);
    const double sd = std::sqrt(1.0 + 0.01);
    CHECK(testing::ks_statistic(ys, [sd](double y) { return testing::normal_cdf(y / sd); }) < 0.05);
  }
  SUBCASE("fantasized variance is independent of the draw") {
    PendingSet p;
    p.add(1, pt(0.5, 0.5));
    p.add(2, pt(0.52, 0.5));
    const auto a = fit(fantasize(data, p, h, rng), h);
    const auto b = fit(fantasize(data, p, h, rng), h);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd x = pt(0.1 * t + 0.05, 0.4);
      CHECK(a.predict(x).var == b.predict(x).var);
    }
  }
  PendingSet dup;
  dup.add(4, pt(0.2, 0.2));
  CHECK_THROWS_AS(dup.add(4, pt(0.3, 0.3)), DomainError);
}

TEST_CASE("incumbent") {
  Hypers h = unit_hypers(2);
  SUBCASE("single observation with tiny noise") {
    Dataset d(2);
    d.append(pt(0.2, 0.2), 2.0);
    h.sigma = 1e-5;
    CHECK(incumbent(fit(d, h)) == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("huge noise shrinks to the prior mean") {
    Dataset d(2);
    d.append(pt(0.2, 0.2), 2.0);
    h.sigma = 1e4;
    h.mu_bar = 0.3;
    CHECK(incumbent(fit(d, h)) == doctest::Approx(0.3).epsilon(1e-6));
  }
  SUBCASE("four points against the dense oracle") {
    std::mt19937_64 gen(6);
    const auto d = testing::random_dataset(gen, 4, 2);
    const auto post = fit(d, h);
    const testing::DenseGp oracle(d, h, post.nugget());
    double best = -1e300;
    for (std::size_t i = 0; i < 4; ++i) best = std::max(best, oracle.mean(d.location(i)));
    CHECK(incumbent(post) == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("improvement hinge and its barrier form") {
  CHECK(improvement(0.5, 0.7) == 0.0);
  CHECK(improvement(0.7, 0.7) == 0.0);
  CHECK(improvement(1.7, 0.7) == doctest::Approx(1.0));

  std::mt19937_64 gen(31);
  const auto d = testing::random_dataset(gen, 3, 2);
  const Hypers h = unit_hypers(2);
  const auto post = fit(d, h);
  const testing::DenseGp oracle(d, h, post.nugget());
  const double tau = 0.2, z = 10;
  double inc = -1e300;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto x = d.location(i);
    const double sd = std::sqrt(std::max(0.0, oracle.var(x)));
    inc = std::max(inc, oracle.mean(x) - std::pow(tau / sd, z));
  }
  CHECK(barrier_incumbent(post, tau, z) == doctest::Approx(inc).epsilon(1e-8));
  const double g = inc + 0.25;
  CHECK(improvement(g, barrier_incumbent(post, tau, z)) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("expected improvement") {
  const Hypers h = unit_hypers(2);
  const auto prior = fit(Dataset(2), h);
  CHECK(expected_improvement(prior, pt(0.5, 0.5), 0.0) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)).epsilon(1e-12));

  Dataset d(2);
  d.append(pt(0.5, 0.5), 3.0);
  Hypers tight = h;
  tight.sigma = 1e-7;
  const auto post = fit(d, tight);
  CHECK(expected_improvement(post, pt(0.5, 0.5), 1.0) == doctest::Approx(2.0).epsilon(1e-5));

  // Monte-Carlo oracle
  std::mt19937_64 gen(99);
  const auto data = testing::random_dataset(gen, 5, 2);
  const auto p2 = fit(data, h);
  const Eigen::VectorXd x = pt(0.35, 0.65);
  const auto pr = p2.predict(x);
  const double inc = pr.mean + 0.3 * std::sqrt(pr.var);
  std::normal_distribution<double> g;
  double sum = 0, sum2 = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double v = std::max(0.0, pr.mean + std::sqrt(pr.var) * g(gen) - inc);
    sum += v;
    sum2 += v * v;
  }
  const double mc = sum / n;
  const double se = std::sqrt((sum2 / n - mc * mc) / n);
  CHECK(std::abs(expected_improvement(p2, x, inc) - mc) < 3 * se);
}

TEST_CASE("poll step") {
  const ChooserConfig cfg = fast_cfg();
  SUBCASE("displacement law without clipping") {
    Eigen::VectorXd lengths(2);
    lengths << 0.2, 0.05;
    Rng rng(3);
    const auto cands = poll_candidates(pt(0.5, 0.5), lengths, 0.5, 10000, rng, false);
    std::vector<double> d0, d1;
    for (const auto& c : cands) {
      d0.push_back(c[0] - 0.5);
      d1.push_back(c[1] - 0.5);
    }
    CHECK(std::abs(std::sqrt(testing::var_of(d0)) / 0.1 - 1.0) < 0.05);
    CHECK(std::abs(std::sqrt(testing::var_of(d1)) / 0.025 - 1.0) < 0.05);
  }
  SUBCASE("all candidates in a low-variance basin") {
    const auto d = clustered(30, 4);
    Hypers h = unit_hypers(2, 0.3);
    h.sigma = 0.01;
    const auto post = fit(d, h);
    ChooserConfig c = cfg;
    c.l_poll = 1e-3;
    c.sem_min = 0.9;
    Rng rng(5);
    CHECK_FALSE(poll_step(post, c, rng).has_value());
  }
  SUBCASE("returns the highest-sd survivor") {
    const auto d = clustered(10, 5);
    const auto post = fit(d, unit_hypers(2, 0.1));
    ChooserConfig c = cfg;
    c.n_poll = 2;
    c.l_poll = 3.0;
    c.sem_min = 0.0;
    c.rho = 0.0;
    Rng rng(11), replay(11);
    FilterCounts counts;
    const auto r = poll_step(post, c, rng, &counts);
    const auto cands = poll_candidates(d.location(best_posterior_mean(post).first), post.hypers().lengths, 3.0, 2, replay);
    double best = -1;
    for (const auto& x : cands)
      if (!is_edge_point(x, c.effective_edge_tol())) best = std::max(best, std::sqrt(post.predict(x).var));
    if (best > 0) {
      REQUIRE(r.has_value());
      CHECK(r->sd == best);
    }
    CHECK(counts.poll_generated == 2);
  }
}

TEST_CASE("default step") {
  ChooserConfig cfg = fast_cfg();
  cfg.edge_tol = 0.1;
  Rng rng(8);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 10000; ++i) {
    const auto x = default_step(3, cfg, rng);
    CHECK_FALSE(is_edge_point(x, 0.1));
    mean += x;
  }
  mean /= 10000.0;
  CHECK((mean.array() - 0.5).abs().maxCoeff() < 0.02);
  Rng a(4), b(4);
  CHECK(default_step(3, cfg, a) == default_step(3, cfg, b));
}

TEST_CASE("bop_choose contracts") {
  const auto data = clustered(8, 2);
  PendingSet pending;
  pending.add(100, pt(0.7, 0.2));
  const ChooserConfig cfg = fast_cfg();

  SUBCASE("deterministic") {
    const auto a = bop_choose(data, pending, cfg, std::nullopt, 17);
    const auto b = bop_choose(data, pending, cfg, std::nullopt, 17);
    CHECK(a == b);
  }
  SUBCASE("infinite threshold never yields a bayes point") {
    ChooserConfig c = cfg;
    c.sem_min = 1e300;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto ch = bop_choose(data, pending, c, std::nullopt, s);
      CHECK(ch.provenance == Provenance::random);
      CHECK(ch.diagnostics.counts.after_sd == 0);
    }
  }
  SUBCASE("invariants over seeds") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto ch = bop_choose(data, pending, cfg, std::nullopt, s);
      CHECK((ch.x.array() >= 0).all());
      CHECK((ch.x.array() <= 1).all());
      const auto& k = ch.diagnostics.counts;
      CHECK(k.generated >= k.after_collision);
      CHECK(k.after_collision >= k.after_sd);
      CHECK(k.after_sd >= k.after_edge);
      CHECK(k.after_edge >= k.after_improvement);
      if (ch.provenance == Provenance::bayes || ch.provenance == Provenance::poll) {
        CHECK(ch.diagnostics.sd > ch.diagnostics.tau);
        CHECK_FALSE(is_edge_point(ch.x, cfg.effective_edge_tol()));
      }
      if (ch.provenance == Provenance::bayes) CHECK(ch.diagnostics.improvement > cfg.improvement_epsilon);
    }
  }
  SUBCASE("huge epsilon screens out every candidate") {
    ChooserConfig c = cfg;
    c.improvement_epsilon = 1e6;
    const auto ch = bop_choose(data, pending, c, std::nullopt, 3);
    CHECK(ch.provenance != Provenance::bayes);
    CHECK(ch.diagnostics.counts.after_improvement == 0);
  }
  SUBCASE("one observation: prior draws almost always improve") {
    Dataset one(2);
    one.append(pt(0.5, 0.5), 0.0);
    int bayes = 0;
    for (std::uint64_t s = 0; s < 100; ++s) bayes += bop_choose(one, PendingSet{}, cfg, std::nullopt, s).provenance == Provenance::bayes;
    CHECK(bayes >= 90);
  }
  CHECK_THROWS_AS(bop_choose(Dataset(2), pending, cfg, std::nullopt, 1), DomainError);
  ChooserConfig bad = cfg;
  bad.n_cand = 0;
  CHECK_THROWS_AS(bop_choose(data, pending, bad, std::nullopt, 1), ConfigError);
}

TEST_CASE("fubar_choose") {
  const auto data = clustered(20, 3);
  ChooserConfig cfg = fast_cfg();
  SUBCASE("deterministic") {
    CHECK(fubar_choose(data, PendingSet{}, cfg, std::nullopt, 5) == fubar_choose(data, PendingSet{}, cfg, std::nullopt, 5));
  }
  SUBCASE("bayes choices keep sd above the threshold") {
    const auto dense = smooth_cluster(20, 3);
    int bayes = 0, ok = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto ch = fubar_choose(dense, PendingSet{}, cfg, std::nullopt, s);
      CHECK(ch.diagnostics.counts.after_sd == ch.diagnostics.counts.after_collision);
      if (ch.provenance != Provenance::bayes) continue;
      ++bayes;
      ok += ch.diagnostics.sd > ch.diagnostics.tau;
    }
    REQUIRE(bayes > 0);
    CHECK(ok >= 0.99 * bayes);
  }
  SUBCASE("sd never exceeds the sampled amplitude") {
    // a flat cluster admits noise-dominated draws with amp < tau, where no point can clear the barrier
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto ch = fubar_choose(data, PendingSet{}, cfg, std::nullopt, s);
      if (ch.provenance != Provenance::bayes) continue;
      CHECK(ch.diagnostics.sd <= ch.diagnostics.hypers->amp * (1 + 1e-12));
    }
  }
  SUBCASE("sharp barrier behaves like the hard filter") {
    Dataset one(2);
    one.append(pt(0.5, 0.5), 0.0);
    ChooserConfig sharp = cfg;
    sharp.z = 500;
    int bop_bayes = 0, fubar_bayes = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      bop_bayes += bop_choose(one, PendingSet{}, cfg, std::nullopt, s).provenance == Provenance::bayes;
      fubar_bayes += fubar_choose(one, PendingSet{}, sharp, std::nullopt, s).provenance == Provenance::bayes;
    }
    CHECK(std::abs(bop_bayes - fubar_bayes) <= 10);
  }
}
