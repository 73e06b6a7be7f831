#include "laplace_bridge/bridge.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "laplace_bridge/errors.hpp"

namespace lbridge {

namespace {

Vector normalized_on_grid(const Vector& density, int grid) {
  const double mass = density.sum() / grid;
  return density / mass;
}

}  // namespace

LogitGaussian BridgeGaussian::to_full() const {
  return LogitGaussian(mean, FullCovariance{cov_full});
}

LogitGaussian BridgeGaussian::to_diagonal() const {
  return LogitGaussian(mean, DiagonalCovariance{cov_diag});
}

BridgeMoments forward_diag(const DirichletParams& params) {
  const Index k = params.size();
  const double kd = static_cast<double>(k);
  const Vector log_alpha = params.alpha().array().log();
  const Vector inv_alpha = params.alpha().cwiseInverse();
  const double inv_sum = inv_alpha.sum();
  BridgeMoments out;
  out.mean = log_alpha.array() - log_alpha.mean();
  out.variances = inv_alpha.array() * (1.0 - 2.0 / kd) + inv_sum / (kd * kd);
  return out;
}

BridgeGaussian forward(const DirichletParams& params) {
  const Index k = params.size();
  const double kd = static_cast<double>(k);
  BridgeMoments moments = forward_diag(params);
  const Vector inv_alpha = params.alpha().cwiseInverse();
  const double inv_mean = inv_alpha.sum() / kd;

  BridgeGaussian out;
  out.cov_full.resize(k, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < k; ++i) {
      out.cov_full(i, j) = -(inv_alpha[i] + inv_alpha[j] - inv_mean) / kd;
    }
  }
  out.cov_full.diagonal() = moments.variances;
  out.mean = std::move(moments.mean);
  out.cov_diag = std::move(moments.variances);
  return out;
}

DirichletParams inverse(const Vector& mean, const Vector& variances) {
  const Index k = mean.size();
  if (k < 2) throw DimensionError("the inverse map needs at least two classes");
  if (variances.size() != k) {
    throw DimensionError("mean has " + std::to_string(k) + " entries but the covariance has " +
                         std::to_string(variances.size()));
  }
  if (!mean.allFinite()) throw DomainError("logit mean has non-finite entries");
  for (Index i = 0; i < k; ++i) {
    if (!(variances[i] > 0.0) || !std::isfinite(variances[i])) {
      throw DomainError("covariance diagonal entry " + std::to_string(i) +
                        " must be positive and finite, got " + std::to_string(variances[i]));
    }
  }
  const double kd = static_cast<double>(k);
  const double base = 1.0 - 2.0 / kd;
  const double log_neg = log_sum_exp(-mean) - 2.0 * std::log(kd);
  Vector alpha(k);
  for (Index i = 0; i < k; ++i) {
    alpha[i] = (base + std::exp(mean[i] + log_neg)) / variances[i];
    assert(alpha[i] > 0.0);
  }
  return DirichletParams(std::move(alpha));
}

DirichletParams inverse(const LogitGaussian& g) { return inverse(g.mean(), g.variances()); }

double roundtrip_residual(const DirichletParams& params) {
  const BridgeMoments moments = forward_diag(params);
  const DirichletParams back = inverse(moments.mean, moments.variances);
  const double err = (back.alpha() - params.alpha()).cwiseAbs().maxCoeff();
  return err / params.alpha().maxCoeff();
}

BetaBridgeCurves beta_bridge_curves(const ShapePair& s, int grid) {
  if (grid < 16) {
    throw DomainError("the curve grid needs at least 16 points, got " + std::to_string(grid));
  }
  const double a = s.a();
  const double b = s.b();
  BetaBridgeCurves out;
  out.x.resize(grid);
  out.beta.resize(grid);
  out.bridge.resize(grid);
  for (int i = 0; i < grid; ++i) out.x[i] = (i + 0.5) / grid;

  for (int i = 0; i < grid; ++i) out.beta[i] = std::exp(beta_log_pdf(out.x[i], s));

  if (a > 1.0 && b > 1.0) {
    const double mode = (a - 1.0) / (a + b - 2.0);
    const double precision =
        (a - 1.0) / (mode * mode) + (b - 1.0) / ((1.0 - mode) * (1.0 - mode));
    Vector lap(grid);
    for (int i = 0; i < grid; ++i) {
      const double d = out.x[i] - mode;
      lap[i] = std::exp(-0.5 * precision * d * d);
    }
    out.laplace = normalized_on_grid(lap, grid);
  }

  const Vector alpha{{a, b}};
  const BridgeGaussian g = forward(DirichletParams(alpha));
  const double center = g.mean[0] - g.mean[1];
  const double var = g.cov_full(0, 0) + g.cov_full(1, 1) - 2.0 * g.cov_full(0, 1);
  for (int i = 0; i < grid; ++i) {
    const double x = out.x[i];
    const double t = std::log(x) - std::log1p(-x) - center;
    out.bridge[i] = std::exp(-0.5 * t * t / var) / (x * (1.0 - x));
  }
  out.bridge = normalized_on_grid(out.bridge, grid);
  out.bridge_logit_mode = 1.0 / (1.0 + std::exp(-center));
  return out;
}

}  // namespace lbridge
