#include "laplace_bridge/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "laplace_bridge/bridge.hpp"
#include "laplace_bridge/errors.hpp"

namespace lbridge {

namespace {

Vector pairwise_sum(std::vector<Vector>& parts, std::size_t begin, std::size_t end) {
  if (end - begin == 1) return parts[begin];
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(parts, begin, mid) + pairwise_sum(parts, mid, end);
}

}  // namespace

SimplexPoint mc_softmax_mean(const LogitGaussian& g, std::size_t n, std::uint64_t seed,
                             unsigned threads) {
  if (n == 0) throw DomainError("sample count must be at least 1");
  const LogitSampler sampler(g);
  const Index k = g.size();
  const std::size_t shards = (n + kShardSize - 1) / kShardSize;
  std::vector<Vector> sums(shards, Vector::Zero(k));
  parallel_for(shards, threads, [&](std::size_t shard) {
    Engine engine = make_engine(seed, shard);
    Vector z(k);
    Vector acc = Vector::Zero(k);
    const std::size_t end = std::min(n, (shard + 1) * kShardSize);
    for (std::size_t i = shard * kShardSize; i < end; ++i) {
      sampler.draw(engine, z);
      acc += softmax(z);
    }
    sums[shard] = std::move(acc);
  });
  const Vector total = pairwise_sum(sums, 0, shards);
  return SimplexPoint(total / total.sum());
}

SimplexPoint lb_predictive_mean(const LogitGaussian& g) { return dirichlet_mean(inverse(g)); }

SimplexPoint extended_mackay_mean(const Vector& mean, const Vector& variances) {
  if (mean.size() != variances.size()) {
    throw DimensionError("mean has " + std::to_string(mean.size()) + " entries, variances " +
                         std::to_string(variances.size()));
  }
  if (mean.size() < 2) throw DimensionError("need at least two classes");
  Vector scaled(mean.size());
  for (Index k = 0; k < mean.size(); ++k) {
    if (!(variances[k] >= 0.0)) {
      throw DomainError("variance " + std::to_string(k) + " must be non-negative");
    }
    scaled[k] = mean[k] / std::sqrt(1.0 + std::numbers::pi * variances[k] / 8.0);
  }
  return SimplexPoint(softmax(scaled));
}

SodppResult sodpp_mean(const SimplexPoint& p, const Matrix& cov) {
  const Index k = p.size();
  if (cov.rows() != k || cov.cols() != k) {
    throw DimensionError("covariance must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  const Vector& pv = p.values();
  const Vector sp = cov * pv;
  const double psp = pv.dot(sp);
  const Vector half_diag = 0.5 * cov.diagonal();
  const Vector bracket = ((1.0 + psp) + half_diag.array() - sp.array() - half_diag.array()).matrix();
  SodppResult out;
  out.values = pv.cwiseProduct(bracket);
  out.residual = std::abs(1.0 - out.values.sum());
  return out;
}

SodppResult sodpp_mean(const LogitGaussian& g) {
  return sodpp_mean(SimplexPoint(softmax(g.mean())), g.dense_covariance());
}

double prop1_threshold(double rest) {
  return 0.25 * (std::sqrt(9.0 * rest * rest + 10.0 * rest + 1.0) - rest - 1.0);
}

bool prop1_condition(const DirichletParams& params, Index k) {
  if (k < 0 || k >= params.size()) {
    throw IndexError("class index " + std::to_string(k) + " out of range for K=" +
                     std::to_string(params.size()));
  }
  double rest = 0.0;
  for (Index l = 0; l < params.size(); ++l) {
    if (l != k) rest += params[l];
  }
  return params[k] > prop1_threshold(rest);
}

double prop1_frequency(const std::vector<DirichletParams>& batch, ClassRule rule) {
  if (batch.empty()) throw EmptyInputError("prop1_frequency needs a non-empty batch");
  std::size_t hits = 0;
  std::size_t checked = 0;
  for (const auto& params : batch) {
    if (rule == ClassRule::ArgmaxClass) {
      Index best = 0;
      params.alpha().maxCoeff(&best);
      hits += prop1_condition(params, best) ? 1 : 0;
      ++checked;
    } else {
      for (Index k = 0; k < params.size(); ++k) hits += prop1_condition(params, k) ? 1 : 0;
      checked += static_cast<std::size_t>(params.size());
    }
  }
  return static_cast<double>(hits) / static_cast<double>(checked);
}

double variance_derivative(double alpha_k, double rest) {
  const double a = alpha_k;
  const double s = rest;
  const double t = a + s;
  return s * (s * s - s * a + s - a * (2.0 * a + 1.0)) / (t * t * t * (t + 1.0) * (t + 1.0));
}

}  // namespace lbridge
