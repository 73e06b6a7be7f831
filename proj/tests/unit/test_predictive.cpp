#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "laplace_bridge/bridge.hpp"
#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/predictive.hpp"
#include "support.hpp"

using namespace lbridge;

namespace {

LogitGaussian isotropic(const Vector& mu, double v) {
  return LogitGaussian(mu, DiagonalCovariance{Vector::Constant(mu.size(), v)});
}

double dirichlet_var(double a, double s) {
  const double t = a + s;
  return a * s / (t * t * (t + 1.0));
}

}  // namespace

TEST_CASE("lb predictive mean on the reference Gaussian") {
  const SimplexPoint p = lb_predictive_mean(isotropic(Vector{{2.0, 0.0, 0.0}}, 0.1));
  CHECK(p[0] == doctest::Approx(0.64643370258242507053).epsilon(1e-13));
  CHECK(p[1] == doctest::Approx(0.17678314870878746473).epsilon(1e-13));
  CHECK(p[2] == doctest::Approx(0.17678314870878746473).epsilon(1e-13));
}

TEST_CASE("mc softmax mean against a quadrature reference") {
  // E[softmax(z)] for mu = (2, 0, 0), Sigma = 0.1 I by Gauss-Hermite
  // quadrature, with the per-component standard deviation of softmax(z).
  const Vector ref{{0.77587451264743346, 0.11206274367626833, 0.11206274367626849}};
  const Vector sd{{0.06657649, 0.04211436, 0.04211436}};
  const std::size_t n = 1000000;
  const SimplexPoint p = mc_softmax_mean(isotropic(Vector{{2.0, 0.0, 0.0}}, 0.1), n, 7);
  for (Index k = 0; k < 3; ++k) {
    CAPTURE(k);
    CHECK(std::abs(p[k] - ref[k]) <= 4.0 * sd[k] / std::sqrt(static_cast<double>(n)));
  }
  CHECK(std::abs(p.values().sum() - 1.0) <= 1e-15);
}

TEST_CASE("mc softmax mean is reproducible and thread-count independent") {
  std::mt19937_64 rng(301);
  const LogitGaussian g(testsupport::random_normal(rng, 5),
                        FullCovariance{testsupport::random_spd(rng, 5)});
  const SimplexPoint a = mc_softmax_mean(g, 50000, 99, 1);
  const SimplexPoint b = mc_softmax_mean(g, 50000, 99, 4);
  const SimplexPoint c = mc_softmax_mean(g, 50000, 99, 7);
  CHECK(a.values() == b.values());
  CHECK(a.values() == c.values());
  CHECK(mc_softmax_mean(g, 50000, 100, 1).values() != a.values());
  CHECK_THROWS_AS(mc_softmax_mean(g, 0, 1), DomainError);
}

TEST_CASE("extended mackay") {
  const Vector mu{{1.0, -0.5, 2.0}};
  const Vector v{{0.4, 2.0, 0.0}};
  const SimplexPoint p = extended_mackay_mean(mu, v);
  Vector scaled(3);
  for (Index k = 0; k < 3; ++k) scaled[k] = mu[k] / std::sqrt(1.0 + M_PI * v[k] / 8.0);
  const Vector want = scaled.array().exp() / scaled.array().exp().sum();
  CHECK((p.values() - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((extended_mackay_mean(mu, Vector::Zero(3)).values() - softmax(mu)).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK_THROWS_AS(extended_mackay_mean(mu, Vector::Zero(2)), DimensionError);
  CHECK_THROWS_AS(extended_mackay_mean(mu, Vector{{0.1, -0.1, 0.1}}), DomainError);
}

TEST_CASE("sodpp") {
  const SodppResult r = sodpp_mean(SimplexPoint(Vector{{0.8, 0.2}}), Matrix{{1.0, 0.0}, {0.0, 0.0}});
  CHECK(r.values[0] == doctest::Approx(0.672).epsilon(1e-14));
  CHECK(r.values[1] == doctest::Approx(0.328).epsilon(1e-14));
  CHECK(r.residual <= 1e-15);

  // Zero covariance returns p itself.
  const SimplexPoint p(Vector{{0.5, 0.3, 0.2}});
  const SodppResult z = sodpp_mean(p, Matrix::Zero(3, 3));
  CHECK(z.values == p.values());

  std::mt19937_64 rng(302);
  const Matrix cov = testsupport::random_spd(rng, 3);
  const SodppResult s = sodpp_mean(p, cov);
  const Vector sp = cov * p.values();
  const double quad = p.values().dot(sp);
  for (Index k = 0; k < 3; ++k) {
    CHECK(s.values[k] == doctest::Approx(p[k] * (1.0 + quad - sp[k])).epsilon(1e-14));
  }
  CHECK(s.residual == doctest::Approx(std::abs(1.0 - s.values.sum())));
  CHECK_THROWS_AS(sodpp_mean(p, Matrix::Zero(2, 2)), DimensionError);
}

TEST_CASE("approximations converge to softmax(mu) as the covariance vanishes") {
  const Vector mu{{1.5, -0.3, 0.4, 0.0}};
  const Vector target = softmax(mu);
  for (double v : {1e-2, 1e-4, 1e-6}) {
    CAPTURE(v);
    const LogitGaussian g = isotropic(mu, v);
    CHECK(testsupport::total_variation(extended_mackay_mean(mu, g.variances()).values(), target) <=
          2.0 * v);
    CHECK(testsupport::total_variation(sodpp_mean(g).values, target) <= 2.0 * v);
    CHECK(testsupport::total_variation(mc_softmax_mean(g, 20000, 5).values(), target) <=
          10.0 * std::sqrt(v) / std::sqrt(20000.0) + 1e-12);
  }
}

TEST_CASE("lb mean under vanishing isotropic covariance") {
  // alpha_k = (1 - 2/K + e^{mu_k} S / K^2) / v, so the normalized mean does
  // not depend on v and stays away from softmax(mu).
  const Vector mu{{1.5, -0.3, 0.4, 0.0}};
  const double s = (-mu.array()).exp().sum();
  Vector want = (0.5 + mu.array().exp() * s / 16.0).matrix();
  want /= want.sum();
  for (double v : {1.0, 1e-3, 1e-8}) {
    const SimplexPoint p = lb_predictive_mean(isotropic(mu, v));
    CHECK((p.values() - want).cwiseAbs().maxCoeff() <= 1e-13);
  }
  CHECK(testsupport::total_variation(want, softmax(mu)) > 0.1);
}

TEST_CASE("prop1 threshold values") {
  CHECK(prop1_threshold(1.0) == doctest::Approx(0.6180339887498948482).epsilon(1e-14));
  CHECK(prop1_threshold(10.0) == doctest::Approx(5.1596460097781872858).epsilon(1e-14));
  CHECK(prop1_threshold(0.0) == 0.0);
}

TEST_CASE("variance derivative against finite differences") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = testsupport::log_uniform(rng, 0.05, 50.0);
    const double s = testsupport::log_uniform(rng, 0.05, 50.0);
    const double h = 1e-5 * a;
    const double fd = (dirichlet_var(a + h, s) - dirichlet_var(a - h, s)) / (2.0 * h);
    CHECK(variance_derivative(a, s) == doctest::Approx(fd).epsilon(1e-5).scale(1e-12));
  }
}

TEST_CASE("prop1 condition matches the sign of the variance derivative") {
  std::mt19937_64 rng(304);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector alpha = testsupport::random_alpha(rng, 4, 0.05, 50.0);
    const DirichletParams d(alpha);
    for (Index k = 0; k < 4; ++k) {
      const double rest = d.total() - alpha[k];
      const double t = prop1_threshold(rest);
      if (std::abs(alpha[k] - t) <= 1e-9 * t) continue;
      CHECK(prop1_condition(d, k) == (variance_derivative(alpha[k], rest) < 0.0));
    }
  }
  CHECK_THROWS_AS(prop1_condition(DirichletParams(Vector::Ones(3)), 3), IndexError);
  CHECK_THROWS_AS(prop1_condition(DirichletParams(Vector::Ones(3)), -1), IndexError);
}

TEST_CASE("prop1 frequency") {
  // Threshold for s = 2 is (sqrt(57) - 3) / 4 ~ 1.137.
  const std::vector<DirichletParams> batch = {
      DirichletParams(Vector{{5.0, 1.0, 1.0}}),  // argmax 5 > threshold(2)
      DirichletParams(Vector{{1.0, 1.0, 1.0}}),  // 1 < 1.137
  };
  CHECK(prop1_frequency(batch) == doctest::Approx(0.5));
  // AllClasses: 5 passes, 1 vs threshold(6) fails twice; 1 vs threshold(2) fails three times.
  CHECK(prop1_frequency(batch, ClassRule::AllClasses) == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(prop1_frequency({}), EmptyInputError);
}
