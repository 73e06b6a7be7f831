#pragma once

// Approximations of the predictive E[softmax(z)] under a logit Gaussian, and
// the condition under which a larger logit variance means a larger Dirichlet
// marginal variance.

#include <cstdint>
#include <vector>

#include "laplace_bridge/dist.hpp"

namespace lbridge {

/// Monte Carlo average of softmax(z_i) over n draws. Draws are sharded as in
/// sample_logit_gaussian and the per-shard sums are combined pairwise, so the
/// result depends only on (g, n, seed). The average is divided by its own
/// component sum (equal to n in exact arithmetic) so it lies on the simplex.
SimplexPoint mc_softmax_mean(const LogitGaussian& g, std::size_t n, std::uint64_t seed,
                             unsigned threads = 0);

/// Mean of the Dirichlet obtained by the inverse bridge.
SimplexPoint lb_predictive_mean(const LogitGaussian& g);

/// softmax(tau(v_k) mu_k) with tau(v) = 1 / sqrt(1 + pi v / 8).
SimplexPoint extended_mackay_mean(const Vector& mean, const Vector& variances);

/// Second-order delta approximation. `values` is
///   p .* [1 + p^T Sigma p + diag(Sigma)/2 - Sigma p - diag(Sigma)/2]
/// where the two diagonal terms cancel. It is not renormalized;
/// `residual` = |1 - sum_k values_k|.
struct SodppResult {
  Vector values;
  double residual;
};
SodppResult sodpp_mean(const SimplexPoint& p, const Matrix& cov);

/// sodpp_mean(softmax(mu), Sigma) for a logit Gaussian.
SodppResult sodpp_mean(const LogitGaussian& g);

/// 1/4 (sqrt(9 s^2 + 10 s + 1) - s - 1) for s = sum of the other concentrations.
double prop1_threshold(double rest);

/// alpha_k > prop1_threshold(alpha_0 - alpha_k). Throws IndexError on a bad k.
bool prop1_condition(const DirichletParams& params, Index k);

enum class ClassRule { ArgmaxClass, AllClasses };

/// Fraction of checked (params, k) pairs meeting prop1_condition. ArgmaxClass
/// checks one class per Dirichlet (largest alpha, lowest index on ties);
/// AllClasses checks every class. Throws EmptyInputError on an empty batch.
double prop1_frequency(const std::vector<DirichletParams>& batch,
                       ClassRule rule = ClassRule::ArgmaxClass);

/// d Var(pi_k) / d alpha_k in closed form, with s = sum of the others:
///   s (s^2 - s a + s - a (2a + 1)) / ((a + s)^3 (a + s + 1)^2).
double variance_derivative(double alpha_k, double rest);

}  // namespace lbridge
