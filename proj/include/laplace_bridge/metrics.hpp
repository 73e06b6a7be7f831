#pragma once

// Evaluation metrics and histogram-based KL estimates on the 2-simplex.

#include <cstdint>
#include <vector>

#include "laplace_bridge/dist.hpp"

namespace lbridge {

/// Mean of the given maximum confidences. Throws EmptyInputError if empty.
double mmc(const std::vector<double>& confidences);

/// P(in > out) + P(in == out) / 2 over all (in, out) pairs. Computed from
/// integer counts so auroc(a, b) + auroc(b, a) == 1 exactly: pairwise when
/// n * m <= 1e7, from midranks of the pooled sample otherwise.
double auroc(const std::vector<double>& in_dist, const std::vector<double>& ood);

/// Mean squared distance to the one-hot label vector.
double brier(const std::vector<SimplexPoint>& predictions, const std::vector<Index>& labels);

/// Fraction of predictions whose argmax (lowest index on ties) is the label.
double accuracy(const std::vector<SimplexPoint>& predictions, const std::vector<Index>& labels);

/// Histogram over the 2-simplex with B bins per axis. A point (x1, x2, x3)
/// goes to cell (i, j) = (floor(B x1), floor(B x2)), clamped to i + j <= B - 1,
/// giving B (B + 1) / 2 cells. Cells with i + j < B - 1 are squares of side
/// 1/B; cells with i + j = B - 1 are the half-size triangles on the diagonal.
class SimplexHistogram {
 public:
  explicit SimplexHistogram(int bins_per_axis);

  int bins_per_axis() const noexcept { return bins_; }
  std::size_t cells() const noexcept { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }

  /// Flat index of cell (i, j): i * B - i (i - 1) / 2 + j.
  std::size_t cell_index(int i, int j) const;

  /// Cell of the point with first two coordinates (x1, x2).
  std::size_t locate(double x1, double x2) const;

  /// Centroid (x1, x2) of cell (i, j), always strictly inside the simplex.
  std::pair<double, double> centroid(int i, int j) const;

  /// Area of cell (i, j) relative to a full square cell (1 or 1/2).
  double relative_area(int i, int j) const;

  void add(double x1, double x2);
  void merge(const SimplexHistogram& other);

 private:
  int bins_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_;
};

/// Bins the rows of an n x 3 matrix of simplex points. Throws DimensionError
/// for K != 3.
SimplexHistogram build_histogram(const Matrix& samples, int bins_per_axis, unsigned threads = 0);
SimplexHistogram build_histogram(const std::vector<SimplexPoint>& samples, int bins_per_axis);

/// sum_i p_i ln(p_i / q_i) over cells with p_i > 0, where p_i = c_i / N_p.
/// q_i = c_i / N_q for populated q cells; empty q cells where p is populated
/// get eps = 1 / (N_q * cells) and q is renormalized. Throws DimensionError
/// when the binnings differ and EmptyInputError for an empty histogram.
double kl_hist_vs_hist(const SimplexHistogram& p, const SimplexHistogram& q);

/// As kl_hist_vs_hist with q_i proportional to Dir(centroid_i | alpha) times
/// the cell area, normalized over all cells in log space.
double kl_hist_vs_dirichlet(const SimplexHistogram& p, const DirichletParams& params);

}  // namespace lbridge
