#include <doctest.h>

#include <random>
#include <utility>
#include <vector>

#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/topk.hpp"
#include "support.hpp"

using namespace lbridge;

TEST_CASE("top-k fixtures") {
  const TopKResult a = uncertainty_aware_topk(DirichletParams(Vector{{40.0, 35.0, 2.0, 2.0, 2.0}}));
  CHECK(a.k() == 2);
  CHECK(a.classes == std::vector<Index>{0, 1});
  REQUIRE(a.boundary_quantiles.size() == 2);
  CHECK(a.boundary_quantiles[0].first == doctest::Approx(0.38605).epsilon(1e-4));
  CHECK(a.boundary_quantiles[1].second == doctest::Approx(0.54061).epsilon(1e-4));
  CHECK(a.boundary_quantiles[1].first == doctest::Approx(0.32676).epsilon(1e-4));

  CHECK(uncertainty_aware_topk(DirichletParams(Vector{{40.0, 35.0, 2.0, 2.0}})).k() == 2);

  const TopKResult c = uncertainty_aware_topk(DirichletParams(Vector{{990.0, 5.0, 5.0}}));
  CHECK(c.k() == 1);
  CHECK(c.classes == std::vector<Index>{0});
  CHECK(c.boundary_quantiles[0].first == doctest::Approx(0.98297).epsilon(1e-4));

  CHECK(uncertainty_aware_topk(DirichletParams(Vector::Constant(5, 100.0))).k() == 5);
}

TEST_CASE("top-k ordering and ties") {
  const TopKResult r = uncertainty_aware_topk(DirichletParams(Vector{{2.0, 30.0, 30.0, 29.0}}));
  REQUIRE(r.k() >= 3);
  CHECK(r.classes[0] == 1);
  CHECK(r.classes[1] == 2);
  CHECK(r.classes[2] == 3);
}

TEST_CASE("top-k metadata matches the Beta marginals") {
  const DirichletParams d(Vector{{12.0, 9.0, 7.0, 1.0}});
  const TopKResult r = uncertainty_aware_topk(d, 0.1);
  CHECK(r.threshold == 0.1);
  REQUIRE(r.marginals.size() == r.k());
  for (std::size_t i = 0; i < r.k(); ++i) {
    const ShapePair s = beta_marginal(d, r.classes[i]);
    CHECK(r.marginals[i] == s);
    CHECK(r.boundary_quantiles[i].first == doctest::Approx(beta_quantile(0.05, s)).epsilon(1e-14));
    CHECK(r.boundary_quantiles[i].second == doctest::Approx(beta_quantile(0.95, s)).epsilon(1e-14));
  }
}

TEST_CASE("top-k properties over random Dirichlets") {
  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 300; ++trial) {
    const Index k = 2 + static_cast<Index>(trial % 9);
    const DirichletParams d(testsupport::random_alpha(rng, k, 0.5, 200.0));
    const TopKResult loose = uncertainty_aware_topk(d, 0.2);
    const TopKResult strict = uncertainty_aware_topk(d, 0.01);
    CHECK(loose.k() >= 1);
    CHECK(loose.k() <= static_cast<std::size_t>(k));
    // Smaller thresholds widen every interval and can only keep more classes.
    CHECK(strict.k() >= loose.k());
    // The chain is a prefix of the descending order.
    for (std::size_t i = 1; i < strict.k(); ++i) {
      CHECK(d[strict.classes[i - 1]] >= d[strict.classes[i]]);
      CHECK(strict.boundary_quantiles[i].second > strict.boundary_quantiles[i - 1].first);
    }
    for (std::size_t cap : {1u, 2u, 3u}) {
      const TopKResult capped = uncertainty_aware_topk(d, 0.01, cap);
      CHECK(capped.k() == std::min(cap, strict.k()));
    }
  }
}

TEST_CASE("top-k errors") {
  const DirichletParams d(Vector::Ones(3));
  CHECK_THROWS_AS(uncertainty_aware_topk(d, 0.0), DomainError);
  CHECK_THROWS_AS(uncertainty_aware_topk(d, 1.0), DomainError);
  CHECK_THROWS_AS(uncertainty_aware_topk(d, 0.05, 0), DomainError);
  CHECK_THROWS_AS(topk_histogram({}, 0.05, 3), EmptyInputError);
  CHECK_THROWS_AS(topk_accuracy({{d, 3}}), IndexError);
}

TEST_CASE("top-k histogram and accuracy") {
  const std::vector<DirichletParams> batch = {
      DirichletParams(Vector{{990.0, 5.0, 5.0}}),
      DirichletParams(Vector{{40.0, 35.0, 2.0, 2.0}}),
      DirichletParams(Vector::Constant(5, 100.0)),
  };
  CHECK(topk_histogram(batch, 0.05, 5) == std::vector<std::size_t>{1, 1, 0, 0, 1});
  CHECK(topk_histogram(batch, 0.05, 2) == std::vector<std::size_t>{1, 2});

  const std::vector<std::pair<DirichletParams, Index>> labeled = {
      {batch[0], 0}, {batch[0], 1}, {batch[1], 1}, {batch[1], 2}};
  CHECK(topk_accuracy(labeled) == doctest::Approx(0.5));
  CHECK(topk_accuracy(labeled, 0.05, 1) == doctest::Approx(0.25));
}
