#pragma once

// Drivers behind the lbridge subcommands. Each one is deterministic in its
// data outputs for fixed inputs and seed; only timing fields vary.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "laplace_bridge/dist.hpp"
#include "laplace_bridge/records.hpp"

namespace lbridge {

inline constexpr std::uint64_t kDefaultSeed = 1234;

/// Seed used when none is given on the command line: $LB_SEED if set and
/// parseable, kDefaultSeed otherwise. Throws ConfigError for a malformed
/// $LB_SEED.
std::uint64_t default_seed();

// ---- bridge ---------------------------------------------------------------

enum class CovOutput { Full, Diagonal };

/// Reads Dirichlet records and writes Gaussian records. Returns the count.
std::size_t bridge_forward(std::istream& in, std::ostream& out, CovOutput cov = CovOutput::Full);

/// Reads Gaussian records and writes Dirichlet records. Returns the count.
std::size_t bridge_inverse(std::istream& in, std::ostream& out);

// ---- KL vs samples ----------------------------------------------------------

struct KlSet {
  std::string name;
  LogitGaussian gaussian;
};

/// The three K = 3 Gaussians with mean (-1, 2, -1) and covariance
/// 10 I, 1 I and 0.1 I.
std::vector<KlSet> default_kl_sets();

/// 10, 20, 50, 100, ..., 100000.
std::vector<std::size_t> default_sample_counts();

struct KlConfig {
  std::uint64_t seed = kDefaultSeed;
  int bins = 50;
  std::size_t truth_samples = 100000;
  std::vector<std::size_t> sample_counts = default_sample_counts();
  unsigned threads = 0;
};

struct KlRow {
  std::string set;
  std::size_t samples;
  double kl_sampling;
  double kl_lb;
  double time_sampling;
  double time_lb;
};

/// For each set: a histogram of truth_samples softmax draws (stream 0 of
/// derive_seed(seed, set index)) is the reference; row i compares it with a
/// histogram of sample_counts[i] fresh draws (stream i + 1) and with the
/// Dirichlet from the inverse bridge. time_lb covers the inverse map;
/// time_sampling covers drawing and the softmax.
std::vector<KlRow> kl_experiment(const std::vector<KlSet>& sets, const KlConfig& config);

void write_kl_csv(std::ostream& out, const std::vector<KlRow>& rows);

/// Smallest sample count whose sampling KL is at or below the bridge KL,
/// if any row for `set` reaches it.
std::optional<std::size_t> kl_crossover(const std::vector<KlRow>& rows, const std::string& set);

// ---- OOD evaluation -----------------------------------------------------------

enum class Method { LB, MC, MacKay, SODPP };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct PredictConfig {
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 1000;
  unsigned threads = 0;
};

/// Predictive vector of one Gaussian. For MC the draws use
/// derive_seed(seed, stream). SODPP values are returned unnormalized.
Vector predictive_vector(const LogitGaussian& g, Method method, const PredictConfig& config,
                         std::uint64_t stream);

/// Maximum predictive component per record, in input order. Record i uses
/// stream `stream_offset + i`.
std::vector<double> confidences(const std::vector<LogitRecord>& records, Method method,
                                const PredictConfig& config, std::uint64_t stream_offset = 0);

struct OodReport {
  Method method;
  std::uint64_t seed;
  std::size_t samples;
  std::size_t n_in;
  std::size_t n_out;
  double mmc_in;
  double mmc_out;
  double auroc;
  double wall_time;
};

/// In-distribution records use streams 0..n_in-1, OOD records the streams
/// from 2^32 on. Throws DimensionError if the class counts differ.
OodReport ood_eval(const std::vector<LogitRecord>& in_dist, const std::vector<LogitRecord>& ood,
                   Method method, const PredictConfig& config);

void write_report(std::ostream& out, const OodReport& r);

// ---- top-k ----------------------------------------------------------------------

struct TopkConfig {
  double threshold = 0.05;
  std::size_t k_max = 10;
  unsigned threads = 0;
};

struct TopkReport {
  std::size_t n;
  double accuracy;
  double mean_k;
  double threshold;
  std::size_t k_max;
  std::vector<std::size_t> histogram;  // bins k = 1..k_max, overflow in the last
};

/// Inverse bridge then top-k per labelled record. Throws ConfigError if a
/// record has no label.
TopkReport topk_eval(const std::vector<LogitRecord>& records, const TopkConfig& config);

void write_report(std::ostream& out, const TopkReport& r);
void write_histogram_csv(std::ostream& out, const TopkReport& r);

// ---- benchmark ------------------------------------------------------------------

struct BenchConfig {
  std::uint64_t seed = kDefaultSeed;
  std::size_t batch = 10000;
  Index classes = 10;
  int repeats = 3;
  std::vector<std::size_t> mc_samples{10, 100, 1000};
};

struct BenchReport {
  std::uint64_t seed;
  std::size_t batch;
  Index classes;
  int repeats;
  double lb_per_record;
  std::vector<std::pair<std::size_t, double>> mc_per_record;
};

/// Random full-covariance Gaussians (mean ~ N(0, 4 I), Sigma = A A^T / K with
/// A_ij ~ N(0, 1)), built before timing.
std::vector<LogitGaussian> bench_gaussians(std::size_t batch, Index classes, std::uint64_t seed);

/// Single-threaded per-record wall time of lb_predictive_mean and of
/// mc_softmax_mean at each sample count, median over repeats.
BenchReport bench(const BenchConfig& config);

void write_report(std::ostream& out, const BenchReport& r);

// ---- Beta curves ----------------------------------------------------------------

/// CSV with columns a,b,x,beta_density,laplace_density,laplace_status,
/// bridge_density. laplace_status is "ok" or "absent" (empty density).
void write_fig2_csv(std::ostream& out, const std::vector<std::pair<double, double>>& shapes,
                    int grid);

/// The shape pairs (0.8, 0.9), (4, 2) and (2, 7).
std::vector<std::pair<double, double>> default_fig2_shapes();

}  // namespace lbridge
