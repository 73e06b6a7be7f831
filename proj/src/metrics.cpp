#include "laplace_bridge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/rng.hpp"

namespace lbridge {

namespace {

constexpr std::uint64_t kExactPairLimit = 10'000'000;

void check_scores(const std::vector<double>& scores, const char* what) {
  if (scores.empty()) throw EmptyInputError(std::string(what) + " scores are empty");
  for (double s : scores) {
    if (std::isnan(s)) throw DomainError(std::string(what) + " scores contain NaN");
  }
}

// Twice the Mann-Whitney U statistic of `in_dist` against `ood`.
std::uint64_t doubled_u_pairwise(const std::vector<double>& in_dist,
                                 const std::vector<double>& ood) {
  std::uint64_t twice = 0;
  for (double a : in_dist) {
    for (double b : ood) twice += a > b ? 2 : (a == b ? 1 : 0);
  }
  return twice;
}

std::uint64_t doubled_u_ranks(const std::vector<double>& in_dist,
                              const std::vector<double>& ood) {
  const std::size_t n = in_dist.size();
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(n + ood.size());
  for (double a : in_dist) pooled.emplace_back(a, true);
  for (double b : ood) pooled.emplace_back(b, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  // Tied runs at 1-based positions r..s share midrank (r + s) / 2; keep it doubled.
  std::uint64_t rank_sum2 = 0;
  for (std::size_t start = 0; start < pooled.size();) {
    std::size_t stop = start;
    while (stop + 1 < pooled.size() && pooled[stop + 1].first == pooled[start].first) ++stop;
    const std::uint64_t doubled_rank = (start + 1) + (stop + 1);
    for (std::size_t i = start; i <= stop; ++i) {
      if (pooled[i].second) rank_sum2 += doubled_rank;
    }
    start = stop + 1;
  }
  return rank_sum2 - static_cast<std::uint64_t>(n) * (n + 1);
}

void check_aligned(std::size_t predictions, std::size_t labels) {
  if (predictions == 0) throw EmptyInputError("no predictions given");
  if (predictions != labels) {
    throw DimensionError(std::to_string(predictions) + " predictions but " +
                         std::to_string(labels) + " labels");
  }
}

void check_label(const SimplexPoint& p, Index label) {
  if (label < 0 || label >= p.size()) {
    throw IndexError("label " + std::to_string(label) + " out of range for K=" +
                     std::to_string(p.size()));
  }
}

double clamp_kl(double kl) { return kl < 0.0 ? 0.0 : kl; }

}  // namespace

double mmc(const std::vector<double>& confidences) {
  if (confidences.empty()) throw EmptyInputError("mmc needs at least one confidence");
  return std::accumulate(confidences.begin(), confidences.end(), 0.0) /
         static_cast<double>(confidences.size());
}

double auroc(const std::vector<double>& in_dist, const std::vector<double>& ood) {
  check_scores(in_dist, "in-distribution");
  check_scores(ood, "out-of-distribution");
  const std::uint64_t pairs = static_cast<std::uint64_t>(in_dist.size()) * ood.size();
  const std::uint64_t twice =
      pairs <= kExactPairLimit ? doubled_u_pairwise(in_dist, ood) : doubled_u_ranks(in_dist, ood);
  const std::uint64_t denom = 2 * pairs;
  const double d = static_cast<double>(denom);
  if (2 * twice <= denom) return static_cast<double>(twice) / d;
  return 1.0 - static_cast<double>(denom - twice) / d;
}

double brier(const std::vector<SimplexPoint>& predictions, const std::vector<Index>& labels) {
  check_aligned(predictions.size(), labels.size());
  double total = 0.0;
  for (std::size_t n = 0; n < predictions.size(); ++n) {
    const SimplexPoint& p = predictions[n];
    check_label(p, labels[n]);
    double s = 0.0;
    for (Index k = 0; k < p.size(); ++k) {
      const double d = p[k] - (k == labels[n] ? 1.0 : 0.0);
      s += d * d;
    }
    total += s;
  }
  return total / static_cast<double>(predictions.size());
}

double accuracy(const std::vector<SimplexPoint>& predictions, const std::vector<Index>& labels) {
  check_aligned(predictions.size(), labels.size());
  std::size_t hits = 0;
  for (std::size_t n = 0; n < predictions.size(); ++n) {
    check_label(predictions[n], labels[n]);
    if (predictions[n].argmax() == labels[n]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

SimplexHistogram::SimplexHistogram(int bins_per_axis) : bins_(bins_per_axis), total_(0) {
  if (bins_per_axis < 1) {
    throw DomainError("bins per axis must be at least 1, got " + std::to_string(bins_per_axis));
  }
  const auto b = static_cast<std::size_t>(bins_per_axis);
  counts_.assign(b * (b + 1) / 2, 0);
}

std::size_t SimplexHistogram::cell_index(int i, int j) const {
  if (i < 0 || j < 0 || i + j > bins_ - 1) {
    throw IndexError("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") is outside the simplex grid");
  }
  const auto ii = static_cast<std::size_t>(i);
  return ii * static_cast<std::size_t>(bins_) - ii * (ii - 1) / 2 + static_cast<std::size_t>(j);
}

std::size_t SimplexHistogram::locate(double x1, double x2) const {
  int i = std::clamp(static_cast<int>(std::floor(x1 * bins_)), 0, bins_ - 1);
  int j = std::clamp(static_cast<int>(std::floor(x2 * bins_)), 0, bins_ - 1);
  while (i + j > bins_ - 1) {
    if (j > 0) {
      --j;
    } else {
      --i;
    }
  }
  return cell_index(i, j);
}

std::pair<double, double> SimplexHistogram::centroid(int i, int j) const {
  const double b = bins_;
  if (i + j == bins_ - 1) return {(i + 1.0 / 3.0) / b, (j + 1.0 / 3.0) / b};
  return {(i + 0.5) / b, (j + 0.5) / b};
}

double SimplexHistogram::relative_area(int i, int j) const {
  return i + j == bins_ - 1 ? 0.5 : 1.0;
}

void SimplexHistogram::add(double x1, double x2) {
  ++counts_[locate(x1, x2)];
  ++total_;
}

void SimplexHistogram::merge(const SimplexHistogram& other) {
  if (other.bins_ != bins_) throw DimensionError("cannot merge histograms with different binning");
  for (std::size_t c = 0; c < counts_.size(); ++c) counts_[c] += other.counts_[c];
  total_ += other.total_;
}

SimplexHistogram build_histogram(const Matrix& samples, int bins_per_axis, unsigned threads) {
  if (samples.cols() != 3) {
    throw DimensionError("simplex histograms support K = 3 only, got K = " +
                         std::to_string(samples.cols()));
  }
  const auto n = static_cast<std::size_t>(samples.rows());
  const std::size_t shards = std::max<std::size_t>(1, (n + kShardSize - 1) / kShardSize);
  std::vector<SimplexHistogram> parts(shards, SimplexHistogram(bins_per_axis));
  parallel_for(shards, threads, [&](std::size_t shard) {
    const std::size_t end = std::min(n, (shard + 1) * kShardSize);
    for (std::size_t r = shard * kShardSize; r < end; ++r) {
      const auto row = static_cast<Index>(r);
      parts[shard].add(samples(row, 0), samples(row, 1));
    }
  });
  SimplexHistogram out(bins_per_axis);
  for (const auto& part : parts) out.merge(part);
  return out;
}

SimplexHistogram build_histogram(const std::vector<SimplexPoint>& samples, int bins_per_axis) {
  SimplexHistogram out(bins_per_axis);
  for (const auto& p : samples) {
    if (p.size() != 3) {
      throw DimensionError("simplex histograms support K = 3 only, got K = " +
                           std::to_string(p.size()));
    }
    out.add(p[0], p[1]);
  }
  return out;
}

double kl_hist_vs_hist(const SimplexHistogram& p, const SimplexHistogram& q) {
  if (p.bins_per_axis() != q.bins_per_axis()) {
    throw DimensionError("histograms use different binning (" +
                         std::to_string(p.bins_per_axis()) + " vs " +
                         std::to_string(q.bins_per_axis()) + " bins per axis)");
  }
  if (p.total() == 0 || q.total() == 0) throw EmptyInputError("histogram has no samples");
  const double np = static_cast<double>(p.total());
  const double nq = static_cast<double>(q.total());
  const double eps = 1.0 / (nq * static_cast<double>(q.cells()));
  std::size_t floored = 0;
  for (std::size_t c = 0; c < p.cells(); ++c) {
    if (p.counts()[c] > 0 && q.counts()[c] == 0) ++floored;
  }
  const double log_z = std::log1p(eps * static_cast<double>(floored));
  double kl = 0.0;
  for (std::size_t c = 0; c < p.cells(); ++c) {
    if (p.counts()[c] == 0) continue;
    const double pc = static_cast<double>(p.counts()[c]) / np;
    const double qc = q.counts()[c] > 0 ? static_cast<double>(q.counts()[c]) / nq : eps;
    kl += pc * (std::log(pc) - std::log(qc) + log_z);
  }
  return clamp_kl(kl);
}

double kl_hist_vs_dirichlet(const SimplexHistogram& p, const DirichletParams& params) {
  if (params.size() != 3) {
    throw DimensionError("simplex histograms support K = 3 only, got K = " +
                         std::to_string(params.size()));
  }
  if (p.total() == 0) throw EmptyInputError("histogram has no samples");
  const int b = p.bins_per_axis();
  Vector log_q(static_cast<Index>(p.cells()));
  for (int i = 0; i < b; ++i) {
    for (int j = 0; i + j < b; ++j) {
      const auto [x1, x2] = p.centroid(i, j);
      const SimplexPoint x(Vector{{x1, x2, 1.0 - x1 - x2}}, 1e-12);
      log_q[static_cast<Index>(p.cell_index(i, j))] =
          dirichlet_log_density(params, x) + std::log(p.relative_area(i, j));
    }
  }
  const double log_norm = log_sum_exp(log_q);
  const double np = static_cast<double>(p.total());
  double kl = 0.0;
  for (std::size_t c = 0; c < p.cells(); ++c) {
    if (p.counts()[c] == 0) continue;
    const double pc = static_cast<double>(p.counts()[c]) / np;
    kl += pc * (std::log(pc) - (log_q[static_cast<Index>(c)] - log_norm));
  }
  return clamp_kl(kl);
}

}  // namespace lbridge
