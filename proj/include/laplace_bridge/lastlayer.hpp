#pragma once

// Logit Gaussians induced by a Gaussian posterior over the last linear layer
// z = W phi(x). Biases are handled by appending a constant 1 to phi.

#include <variant>

#include "laplace_bridge/dist.hpp"

namespace lbridge {

/// Matrix-normal posterior: Cov[vec W] = U (x) V with U over classes (K x K)
/// and V over features (Q x Q).
struct KronFactors {
  Matrix U;
  Matrix V;
};

/// Independent weights; entry (k, j) is the variance of W_kj.
struct DiagonalWeights {
  Matrix variances;
};

/// Dense (KQ) x (KQ) covariance of the class-major vectorization of W:
/// weight W_kj sits at index k * Q + j (rows of W stacked).
struct FullWeights {
  Matrix covariance;
};

using WeightCovariance = std::variant<KronFactors, DiagonalWeights, FullWeights>;

/// Last-layer posterior with MAP weights (K x Q). Construction checks shapes
/// and that every covariance factor is symmetric PSD within tolerance.
class LastLayerPosterior {
 public:
  LastLayerPosterior(Matrix weight_mean, WeightCovariance cov);

  const Matrix& weight_mean() const noexcept { return weight_mean_; }
  const WeightCovariance& covariance() const noexcept { return cov_; }
  Index classes() const noexcept { return weight_mean_.rows(); }
  Index features() const noexcept { return weight_mean_.cols(); }

 private:
  Matrix weight_mean_;
  WeightCovariance cov_;
};

/// mean W phi, covariance (phi^T V phi) U.
LogitGaussian logit_gaussian_kfac(const LastLayerPosterior& post, const Vector& phi);

/// mean W phi, covariance diag_k sum_j phi_j^2 sigma^2_kj.
LogitGaussian logit_gaussian_diag(const LastLayerPosterior& post, const Vector& phi);

/// mean W phi, covariance (phi^T (x) I) H^-1 (phi (x) I) under the
/// class-major layout, i.e. Sigma_kl = sum_ij phi_i phi_j H^-1[kQ+i, lQ+j].
LogitGaussian logit_gaussian_full(const LastLayerPosterior& post, const Vector& phi);

/// Dispatches on the posterior's covariance encoding.
LogitGaussian logit_gaussian(const LastLayerPosterior& post, const Vector& phi);

}  // namespace lbridge
