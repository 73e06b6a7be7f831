#pragma once

// Uncertainty-aware top-k: grow the prediction set while consecutive Beta
// marginals (in descending concentration order) still overlap.

#include <optional>
#include <utility>
#include <vector>

#include "laplace_bridge/dist.hpp"

namespace lbridge {

inline constexpr double kDefaultThreshold = 0.05;

struct TopKResult {
  /// Retained class indices, largest concentration first.
  std::vector<Index> classes;
  double threshold = kDefaultThreshold;
  /// Beta marginal of each retained class, aligned with `classes`.
  std::vector<ShapePair> marginals;
  /// For each retained class: (left T/2 quantile, right 1 - T/2 quantile).
  std::vector<std::pair<double, double>> boundary_quantiles;

  std::size_t k() const noexcept { return classes.size(); }
};

/// Sort alpha descending (ties by lower index) and keep the top class. For
/// i = 2..K, add class i iff F_i^{-1}(1 - T/2) > F_{i-1}^{-1}(T/2) where
/// F_j is the Beta(alpha_j, alpha_0 - alpha_j) CDF; stop at the first
/// failure or once k_max classes are kept.
/// Throws DomainError unless 0 < T < 1 and k_max >= 1.
TopKResult uncertainty_aware_topk(const DirichletParams& params,
                                  double threshold = kDefaultThreshold,
                                  std::optional<std::size_t> k_max = std::nullopt);

/// counts[j] = number of inputs with k = j + 1, for j < k_max; inputs with
/// k > k_max land in the last bin. Throws EmptyInputError on an empty batch.
std::vector<std::size_t> topk_histogram(const std::vector<DirichletParams>& batch,
                                        double threshold, std::size_t k_max);

/// Fraction of inputs whose top-k set contains the true class.
double topk_accuracy(const std::vector<std::pair<DirichletParams, Index>>& batch,
                     double threshold = kDefaultThreshold,
                     std::optional<std::size_t> k_max = std::nullopt);

}  // namespace lbridge
