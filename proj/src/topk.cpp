#include "laplace_bridge/topk.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "laplace_bridge/errors.hpp"

namespace lbridge {

TopKResult uncertainty_aware_topk(const DirichletParams& params, double threshold,
                                  std::optional<std::size_t> k_max) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  if (k_max && *k_max == 0) throw DomainError("k_max must be at least 1");

  const Index k = params.size();
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index l, Index r) { return params[l] > params[r]; });

  const std::size_t cap = k_max.value_or(static_cast<std::size_t>(k));
  TopKResult out;
  out.threshold = threshold;
  auto keep = [&](Index cls) {
    const ShapePair s = beta_marginal(params, cls);
    out.classes.push_back(cls);
    out.marginals.push_back(s);
    out.boundary_quantiles.emplace_back(beta_quantile(0.5 * threshold, s),
                                        beta_quantile(1.0 - 0.5 * threshold, s));
  };
  keep(order[0]);
  for (std::size_t i = 1; i < order.size() && out.classes.size() < cap; ++i) {
    const double left_prev = out.boundary_quantiles.back().first;
    const ShapePair s = beta_marginal(params, order[i]);
    const double right = beta_quantile(1.0 - 0.5 * threshold, s);
    if (!(right > left_prev)) break;
    keep(order[i]);
  }
  return out;
}

std::vector<std::size_t> topk_histogram(const std::vector<DirichletParams>& batch,
                                        double threshold, std::size_t k_max) {
  if (batch.empty()) throw EmptyInputError("topk_histogram needs a non-empty batch");
  if (k_max == 0) throw DomainError("k_max must be at least 1");
  std::vector<std::size_t> counts(k_max, 0);
  for (const auto& params : batch) {
    const std::size_t k = uncertainty_aware_topk(params, threshold).k();
    ++counts[std::min(k, k_max) - 1];
  }
  return counts;
}

double topk_accuracy(const std::vector<std::pair<DirichletParams, Index>>& batch,
                     double threshold, std::optional<std::size_t> k_max) {
  if (batch.empty()) throw EmptyInputError("topk_accuracy needs a non-empty batch");
  std::size_t hits = 0;
  for (const auto& [params, label] : batch) {
    if (label < 0 || label >= params.size()) {
      throw IndexError("true class " + std::to_string(label) + " out of range for K=" +
                       std::to_string(params.size()));
    }
    const TopKResult r = uncertainty_aware_topk(params, threshold, k_max);
    if (std::find(r.classes.begin(), r.classes.end(), label) != r.classes.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

}  // namespace lbridge
