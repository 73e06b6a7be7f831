#pragma once

// The Laplace Bridge between Dirichlet distributions over the simplex and
// Gaussians over logits.

#include <optional>

#include "laplace_bridge/dist.hpp"

namespace lbridge {

/// Gaussian produced by the forward map. The mean sums to zero and the full
/// covariance has zero row sums.
struct BridgeGaussian {
  Vector mean;
  Matrix cov_full;
  Vector cov_diag;

  LogitGaussian to_full() const;
  LogitGaussian to_diagonal() const;
};

/// Dirichlet to Gaussian:
///   mu_k = ln alpha_k - (1/K) sum_l ln alpha_l
///   Sigma_kl = delta_kl / alpha_k - (1/K) [1/alpha_k + 1/alpha_l - (1/K) sum_u 1/alpha_u]
BridgeGaussian forward(const DirichletParams& params);

/// Mean and covariance diagonal of forward(params) in O(K).
struct BridgeMoments {
  Vector mean;
  Vector variances;
};
BridgeMoments forward_diag(const DirichletParams& params);

/// Gaussian to Dirichlet:
///   alpha_k = (1 / Sigma_kk) (1 - 2/K + e^{mu_k} / K^2 sum_l e^{-mu_l})
///
/// Only the covariance diagonal is used, whatever the encoding; off-diagonal
/// entries are discarded. The mean is used exactly as given: a constant shift
/// of all logits cancels in the product e^{mu_k} sum_l e^{-mu_l}.
/// Throws DomainError if some Sigma_kk <= 0.
DirichletParams inverse(const LogitGaussian& g);

/// Same map from a mean and the covariance diagonal.
DirichletParams inverse(const Vector& mean, const Vector& variances);

/// max_k |inverse(forward(alpha))_k - alpha_k| / max_k alpha_k.
double roundtrip_residual(const DirichletParams& params);

/// Tabulated one-dimensional curves for Beta(a, b) on the grid midpoints
/// x_i = (i + 1/2) / n.
struct BetaBridgeCurves {
  Vector x;
  Vector beta;
  /// Gaussian at the mode with the inverse Hessian as variance, renormalized
  /// on the grid. Empty when a <= 1 or b <= 1 (no interior mode with
  /// negative curvature).
  std::optional<Vector> laplace;
  /// forward([a, b]) reduced to the logit difference z_1 - z_2, which is
  /// N(ln(a/b), 1/a + 1/b), and pushed back to (0, 1) through
  /// x = sigmoid(z_1 - z_2). Renormalized on the grid.
  Vector bridge;
  /// Maximizer of the bridge Gaussian mapped through the sigmoid, which is
  /// the mode in the softmax basis: a / (a + b).
  double bridge_logit_mode;
};

/// Throws DomainError if grid < 16.
BetaBridgeCurves beta_bridge_curves(const ShapePair& s, int grid);

}  // namespace lbridge
