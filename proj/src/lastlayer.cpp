#include "laplace_bridge/lastlayer.hpp"

#include <algorithm>
#include <string>

#include "laplace_bridge/errors.hpp"

namespace lbridge {

namespace {

std::string shape(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void check_phi(const LastLayerPosterior& post, const Vector& phi) {
  if (phi.size() != post.features()) {
    throw DimensionError("feature vector has " + std::to_string(phi.size()) +
                         " entries, the posterior expects " + std::to_string(post.features()));
  }
  if (!phi.allFinite()) throw DomainError("feature vector has non-finite entries");
}

template <typename T>
const T& require(const LastLayerPosterior& post, const char* name) {
  const T* cov = std::get_if<T>(&post.covariance());
  if (cov == nullptr) {
    throw DimensionError(std::string("posterior does not use the ") + name + " encoding");
  }
  return *cov;
}

}  // namespace

LastLayerPosterior::LastLayerPosterior(Matrix weight_mean, WeightCovariance cov)
    : weight_mean_(std::move(weight_mean)), cov_(std::move(cov)) {
  const Index k = weight_mean_.rows();
  const Index q = weight_mean_.cols();
  if (k < 1 || q < 1) throw DimensionError("weight mean must be non-empty");
  if (!weight_mean_.allFinite()) throw DomainError("weight mean has non-finite entries");
  if (const auto* kron = std::get_if<KronFactors>(&cov_)) {
    if (kron->U.rows() != k || kron->U.cols() != k) {
      throw DimensionError("U must be " + shape(k, k) + ", got " +
                           shape(kron->U.rows(), kron->U.cols()));
    }
    if (kron->V.rows() != q || kron->V.cols() != q) {
      throw DimensionError("V must be " + shape(q, q) + ", got " +
                           shape(kron->V.rows(), kron->V.cols()));
    }
    check_symmetric_psd(kron->U, "U");
    check_symmetric_psd(kron->V, "V");
  } else if (const auto* diag = std::get_if<DiagonalWeights>(&cov_)) {
    if (diag->variances.rows() != k || diag->variances.cols() != q) {
      throw DimensionError("weight variances must be " + shape(k, q) + ", got " +
                           shape(diag->variances.rows(), diag->variances.cols()));
    }
    if (!diag->variances.allFinite() || diag->variances.minCoeff() < 0.0) {
      throw DecompositionError("weight variances must be non-negative and finite");
    }
  } else {
    const auto& full = std::get<FullWeights>(cov_);
    if (full.covariance.rows() != k * q || full.covariance.cols() != k * q) {
      throw DimensionError("weight covariance must be " + shape(k * q, k * q) + ", got " +
                           shape(full.covariance.rows(), full.covariance.cols()));
    }
    check_symmetric_psd(full.covariance, "weight covariance");
  }
}

LogitGaussian logit_gaussian_kfac(const LastLayerPosterior& post, const Vector& phi) {
  const auto& kron = require<KronFactors>(post, "Kronecker");
  check_phi(post, phi);
  const double scale = std::max(0.0, phi.dot(kron.V * phi));
  return LogitGaussian(post.weight_mean() * phi, ScaledKronCovariance{scale, kron.U});
}

LogitGaussian logit_gaussian_diag(const LastLayerPosterior& post, const Vector& phi) {
  const auto& diag = require<DiagonalWeights>(post, "diagonal");
  check_phi(post, phi);
  const Vector phi2 = phi.cwiseAbs2();
  return LogitGaussian(post.weight_mean() * phi, DiagonalCovariance{diag.variances * phi2});
}

LogitGaussian logit_gaussian_full(const LastLayerPosterior& post, const Vector& phi) {
  const auto& full = require<FullWeights>(post, "full");
  check_phi(post, phi);
  const Index k = post.classes();
  const Index q = post.features();
  // J = I_K (x) phi^T, so J H^-1 J^T contracts each Q x Q block with phi.
  Matrix cov(k, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c <= r; ++c) {
      const double v = phi.dot(full.covariance.block(r * q, c * q, q, q) * phi);
      cov(r, c) = v;
      cov(c, r) = v;
    }
  }
  return LogitGaussian(post.weight_mean() * phi, FullCovariance{std::move(cov)});
}

LogitGaussian logit_gaussian(const LastLayerPosterior& post, const Vector& phi) {
  if (std::holds_alternative<KronFactors>(post.covariance())) {
    return logit_gaussian_kfac(post, phi);
  }
  if (std::holds_alternative<DiagonalWeights>(post.covariance())) {
    return logit_gaussian_diag(post, phi);
  }
  return logit_gaussian_full(post, phi);
}

}  // namespace lbridge
