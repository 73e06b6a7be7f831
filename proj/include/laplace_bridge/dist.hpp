#pragma once

// Dirichlet and logit-Gaussian distribution objects: densities in the
// probability and softmax bases, moments, marginals and seeded sampling.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "laplace_bridge/rng.hpp"
#include "laplace_bridge/specfun.hpp"

namespace lbridge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Concentration vector of a Dirichlet over K >= 2 classes; every entry is
/// positive and finite.
class DirichletParams {
 public:
  explicit DirichletParams(Vector alpha);

  const Vector& alpha() const noexcept { return alpha_; }
  Index size() const noexcept { return alpha_.size(); }
  double operator[](Index k) const { return alpha_[k]; }

  /// alpha_0, the sum of all concentrations.
  double total() const noexcept { return total_; }

 private:
  Vector alpha_;
  double total_;
};

/// Point on the probability simplex. Components lie in [0, 1] and sum to one
/// within `tolerance`.
class SimplexPoint {
 public:
  explicit SimplexPoint(Vector pi, double tolerance = 1e-12);

  const Vector& values() const noexcept { return pi_; }
  Index size() const noexcept { return pi_.size(); }
  double operator[](Index k) const { return pi_[k]; }

  /// Largest component (the confidence of the point).
  double max() const { return pi_.maxCoeff(); }

  /// Index of the largest component, ties to the lowest index.
  Index argmax() const;

 private:
  Vector pi_;
};

struct FullCovariance {
  Matrix matrix;
};

struct DiagonalCovariance {
  Vector variances;
};

/// Covariance scale * factor, as produced by a Kronecker-factored last layer.
struct ScaledKronCovariance {
  double scale;
  Matrix factor;
};

using Covariance = std::variant<FullCovariance, DiagonalCovariance, ScaledKronCovariance>;

/// Gaussian over the K logits. Full and Kronecker factors must be symmetric
/// within 1e-9 (relative) with eigenvalues >= -1e-9 * largest eigenvalue.
class LogitGaussian {
 public:
  LogitGaussian(Vector mean, Covariance cov);

  const Vector& mean() const noexcept { return mean_; }
  const Covariance& covariance() const noexcept { return cov_; }
  Index size() const noexcept { return mean_.size(); }

  /// Diagonal of the covariance in any encoding.
  Vector variances() const;

  /// Covariance expanded to a dense K x K matrix.
  Matrix dense_covariance() const;

 private:
  Vector mean_;
  Covariance cov_;
};

/// Throws DecompositionError unless `m` is square, symmetric and PSD within
/// the tolerances above. `what` names the matrix in the message.
void check_symmetric_psd(const Matrix& m, const char* what);

Vector softmax(const Vector& z);
double log_sum_exp(const Vector& z);

/// ln Dir(x | alpha). Throws DomainError if any x_k <= 0.
double dirichlet_log_density(const DirichletParams& params, const SimplexPoint& x);

/// ln Dir_z(softmax(z) | alpha): the density of the logits z, equal to
/// ln Dir(softmax(z) | alpha) + sum_k ln softmax_k(z). Evaluated with
/// log-softmax so extreme logits neither overflow nor raise.
double dirichlet_log_density_softmax_basis(const DirichletParams& params, const Vector& z);

SimplexPoint dirichlet_mean(const DirichletParams& params);

/// Interior mode (alpha_k - 1) / sum(alpha - 1). Throws DomainError if any
/// alpha_k <= 1, where the mode sits on the boundary of the simplex.
SimplexPoint dirichlet_mode(const DirichletParams& params);

double dirichlet_component_variance(const DirichletParams& params, Index k);

/// Full analytic covariance of a Dirichlet vector.
Matrix dirichlet_covariance(const DirichletParams& params);

/// Aggregates concentrations over the cells of a partition of {0..K-1}.
/// Throws PartitionError for overlapping, missing or empty cells, or fewer
/// than two cells.
DirichletParams dirichlet_marginal(const DirichletParams& params,
                                   const std::vector<std::vector<Index>>& groups);

/// Beta(alpha_k, alpha_0 - alpha_k), the law of pi_k against the rest.
ShapePair beta_marginal(const DirichletParams& params, Index k);

/// Draws z = mean + L * eps for a fixed factor L (L L^T = Sigma).
///
/// Full covariances are factored by a symmetric eigendecomposition with
/// eigenvalues below K * eps * lambda_max set to zero, so singular matrices
/// such as the bridge covariance (rows summing to zero) are sampled exactly
/// within their support.
class LogitSampler {
 public:
  explicit LogitSampler(const LogitGaussian& g);

  Index size() const noexcept { return mean_.size(); }

  /// Writes one draw into `out` (resized as needed).
  void draw(Engine& engine, Vector& out) const;

 private:
  Vector mean_;
  Vector scale_;   // used when the covariance is diagonal
  Matrix factor_;  // used otherwise
  bool diagonal_;
};

/// n draws from the logit Gaussian, one per row. Draw i comes from shard
/// i / kShardSize with engine make_engine(seed, shard), so the output is
/// identical for any `threads` (0 = default_threads()).
Matrix sample_logit_gaussian(const LogitGaussian& g, std::size_t n, std::uint64_t seed,
                             unsigned threads = 0);

/// n Dirichlet draws (normalized Gamma variates), one per row, sharded like
/// sample_logit_gaussian.
Matrix sample_dirichlet(const DirichletParams& params, std::size_t n, std::uint64_t seed,
                        unsigned threads = 0);

}  // namespace lbridge
