#include "laplace_bridge/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "laplace_bridge/bridge.hpp"
#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/metrics.hpp"
#include "laplace_bridge/predictive.hpp"
#include "laplace_bridge/rng.hpp"
#include "laplace_bridge/topk.hpp"

namespace lbridge {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void softmax_rows(Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) m.row(r) = softmax(m.row(r).transpose()).transpose();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

constexpr std::uint64_t kOodStreamOffset = std::uint64_t{1} << 32;

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("LB_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, seed);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(std::string("LB_SEED must be an unsigned 64-bit integer, got '") + env + "'");
  }
  return seed;
}

std::size_t bridge_forward(std::istream& in, std::ostream& out, CovOutput cov) {
  const auto records = read_dirichlet_records(in);
  for (const auto& rec : records) {
    const BridgeGaussian g = forward(rec.params());
    LogitRecord result{rec.id, rec.label, g.mean, Covariance{}};
    if (cov == CovOutput::Full) {
      result.cov = FullCovariance{g.cov_full};
    } else {
      result.cov = DiagonalCovariance{g.cov_diag};
    }
    write_record(out, result);
  }
  return records.size();
}

std::size_t bridge_inverse(std::istream& in, std::ostream& out) {
  const auto records = read_logit_records(in);
  for (const auto& rec : records) {
    const LogitGaussian g = rec.gaussian();
    DirichletParams params = [&] {
      try {
        return inverse(g);
      } catch (const DomainError& e) {
        throw DomainError("record '" + rec.id + "': " + e.what());
      }
    }();
    write_record(out, DirichletRecord{rec.id, rec.label, params.alpha()});
  }
  return records.size();
}

std::vector<KlSet> default_kl_sets() {
  const Vector mu{{-1.0, 2.0, -1.0}};
  std::vector<KlSet> sets;
  for (const auto& [name, scale] :
       std::vector<std::pair<std::string, double>>{{"10I", 10.0}, {"1I", 1.0}, {"0.1I", 0.1}}) {
    sets.push_back({name, LogitGaussian(mu, DiagonalCovariance{Vector::Constant(3, scale)})});
  }
  return sets;
}

std::vector<std::size_t> default_sample_counts() {
  std::vector<std::size_t> out;
  for (std::size_t decade = 10; decade <= 10000; decade *= 10) {
    out.push_back(decade);
    out.push_back(2 * decade);
    out.push_back(5 * decade);
  }
  out.push_back(100000);
  return out;
}

std::vector<KlRow> kl_experiment(const std::vector<KlSet>& sets, const KlConfig& config) {
  if (config.bins < 1) throw ConfigError("bins must be at least 1");
  if (config.truth_samples < 1) throw ConfigError("ground-truth sample count must be at least 1");
  if (config.sample_counts.empty()) throw ConfigError("no sample counts given");
  std::vector<KlRow> rows;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    const KlSet& set = sets[si];
    if (set.gaussian.size() != 3) {
      throw ConfigError("KL experiment needs K = 3 Gaussians, set '" + set.name + "' has K = " +
                        std::to_string(set.gaussian.size()));
    }
    const std::uint64_t base = derive_seed(config.seed, si);
    Matrix truth = sample_logit_gaussian(set.gaussian, config.truth_samples,
                                         derive_seed(base, 0), config.threads);
    softmax_rows(truth);
    const SimplexHistogram truth_hist = build_histogram(truth, config.bins, config.threads);

    constexpr int kLbRepeats = 1000;
    volatile double sink = 0.0;
    const auto lb_start = Clock::now();
    for (int r = 0; r < kLbRepeats; ++r) sink = sink + inverse(set.gaussian).total();
    const double time_lb = seconds_since(lb_start) / kLbRepeats;
    const DirichletParams lb = inverse(set.gaussian);
    const double kl_lb = kl_hist_vs_dirichlet(truth_hist, lb);

    for (std::size_t i = 0; i < config.sample_counts.size(); ++i) {
      const std::size_t n = config.sample_counts[i];
      if (n < 1) throw ConfigError("sample counts must be at least 1");
      const auto start = Clock::now();
      Matrix draws = sample_logit_gaussian(set.gaussian, n, derive_seed(base, i + 1), 1);
      softmax_rows(draws);
      const double time_sampling = seconds_since(start);
      const SimplexHistogram hist = build_histogram(draws, config.bins, config.threads);
      rows.push_back({set.name, n, kl_hist_vs_hist(truth_hist, hist), kl_lb, time_sampling,
                      time_lb});
    }
  }
  return rows;
}

void write_kl_csv(std::ostream& out, const std::vector<KlRow>& rows) {
  out << "gaussian,sample_count,kl_sampling,kl_lb,wall_time_sampling,wall_time_lb\n";
  for (const auto& r : rows) {
    out << r.set << ',' << r.samples << ',' << num(r.kl_sampling) << ',' << num(r.kl_lb) << ','
        << num(r.time_sampling) << ',' << num(r.time_lb) << '\n';
  }
}

std::optional<std::size_t> kl_crossover(const std::vector<KlRow>& rows, const std::string& set) {
  for (const auto& r : rows) {
    if (r.set == set && r.kl_sampling <= r.kl_lb) return r.samples;
  }
  return std::nullopt;
}

Method parse_method(const std::string& name) {
  if (name == "lb") return Method::LB;
  if (name == "mc") return Method::MC;
  if (name == "mackay") return Method::MacKay;
  if (name == "sodpp") return Method::SODPP;
  throw ConfigError("unknown method '" + name + "' (expected lb, mc, mackay or sodpp)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::LB:
      return "lb";
    case Method::MC:
      return "mc";
    case Method::MacKay:
      return "mackay";
    case Method::SODPP:
      return "sodpp";
  }
  return "?";
}

Vector predictive_vector(const LogitGaussian& g, Method method, const PredictConfig& config,
                         std::uint64_t stream) {
  switch (method) {
    case Method::LB:
      return lb_predictive_mean(g).values();
    case Method::MC:
      return mc_softmax_mean(g, config.samples, derive_seed(config.seed, stream), 1).values();
    case Method::MacKay:
      return extended_mackay_mean(g.mean(), g.variances()).values();
    case Method::SODPP:
      return sodpp_mean(g).values;
  }
  return {};
}

std::vector<double> confidences(const std::vector<LogitRecord>& records, Method method,
                                const PredictConfig& config, std::uint64_t stream_offset) {
  if (config.samples < 1) throw ConfigError("sample count must be at least 1");
  std::vector<LogitGaussian> gaussians;
  gaussians.reserve(records.size());
  for (const auto& rec : records) gaussians.push_back(rec.gaussian());
  std::vector<double> out(records.size());
  std::vector<std::string> errors(records.size());
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    try {
      out[i] = predictive_vector(gaussians[i], method, config, stream_offset + i).maxCoeff();
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw DomainError("record '" + records[i].id + "': " + errors[i]);
  }
  return out;
}

OodReport ood_eval(const std::vector<LogitRecord>& in_dist, const std::vector<LogitRecord>& ood,
                   Method method, const PredictConfig& config) {
  if (in_dist.empty()) throw EmptyInputError("in-distribution file has no records");
  if (ood.empty()) throw EmptyInputError("OOD file has no records");
  if (in_dist.front().mean.size() != ood.front().mean.size()) {
    throw DimensionError("in-distribution records have K = " +
                         std::to_string(in_dist.front().mean.size()) + ", OOD records K = " +
                         std::to_string(ood.front().mean.size()));
  }
  const auto start = Clock::now();
  const std::vector<double> c_in = confidences(in_dist, method, config, 0);
  const std::vector<double> c_out = confidences(ood, method, config, kOodStreamOffset);
  OodReport r;
  r.wall_time = seconds_since(start);
  r.method = method;
  r.seed = config.seed;
  r.samples = config.samples;
  r.n_in = in_dist.size();
  r.n_out = ood.size();
  r.mmc_in = mmc(c_in);
  r.mmc_out = mmc(c_out);
  r.auroc = auroc(c_in, c_out);
  return r;
}

void write_report(std::ostream& out, const OodReport& r) {
  out << "seed: " << r.seed << '\n'
      << "method: " << method_name(r.method) << '\n';
  if (r.method == Method::MC) out << "samples: " << r.samples << '\n';
  out << "n_in: " << r.n_in << '\n'
      << "n_ood: " << r.n_out << '\n'
      << "mmc_in: " << num(r.mmc_in) << '\n'
      << "mmc_ood: " << num(r.mmc_out) << '\n'
      << "auroc: " << num(r.auroc) << '\n'
      << "wall_time_s: " << num(r.wall_time) << '\n';
}

TopkReport topk_eval(const std::vector<LogitRecord>& records, const TopkConfig& config) {
  if (records.empty()) throw EmptyInputError("input file has no records");
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw ConfigError("threshold must lie in (0, 1)");
  }
  if (config.k_max < 1) throw ConfigError("k-max must be at least 1");
  for (const auto& rec : records) {
    if (!rec.label) throw ConfigError("record '" + rec.id + "' has no label");
  }
  std::vector<DirichletParams> params;
  params.reserve(records.size());
  for (const auto& rec : records) {
    try {
      params.push_back(inverse(rec.gaussian()));
    } catch (const DomainError& e) {
      throw DomainError("record '" + rec.id + "': " + e.what());
    }
  }
  std::vector<std::size_t> ks(records.size());
  std::vector<char> hit(records.size());
  std::vector<std::string> errors(records.size());
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    try {
      const TopKResult r = uncertainty_aware_topk(params[i], config.threshold, config.k_max);
      ks[i] = r.k();
      hit[i] = std::find(r.classes.begin(), r.classes.end(), *records[i].label) !=
               r.classes.end();
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  TopkReport rep;
  rep.n = records.size();
  rep.threshold = config.threshold;
  rep.k_max = config.k_max;
  rep.histogram.assign(config.k_max, 0);
  std::size_t hits = 0;
  std::size_t k_sum = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!errors[i].empty()) throw DomainError("record '" + records[i].id + "': " + errors[i]);
    hits += hit[i] ? 1 : 0;
    k_sum += ks[i];
    ++rep.histogram[std::min(ks[i], config.k_max) - 1];
  }
  rep.accuracy = static_cast<double>(hits) / static_cast<double>(rep.n);
  rep.mean_k = static_cast<double>(k_sum) / static_cast<double>(rep.n);
  return rep;
}

void write_report(std::ostream& out, const TopkReport& r) {
  out << "n: " << r.n << '\n'
      << "threshold: " << num(r.threshold) << '\n'
      << "k_max: " << r.k_max << '\n'
      << "topk_accuracy: " << num(r.accuracy) << '\n'
      << "mean_k: " << num(r.mean_k) << '\n';
}

void write_histogram_csv(std::ostream& out, const TopkReport& r) {
  out << "k,count\n";
  for (std::size_t i = 0; i < r.histogram.size(); ++i) {
    out << i + 1 << ',' << r.histogram[i] << '\n';
  }
}

std::vector<LogitGaussian> bench_gaussians(std::size_t batch, Index classes, std::uint64_t seed) {
  Engine engine = make_engine(seed, 0);
  std::normal_distribution<double> normal;
  std::vector<LogitGaussian> out;
  out.reserve(batch);
  for (std::size_t n = 0; n < batch; ++n) {
    Vector mean(classes);
    for (Index k = 0; k < classes; ++k) mean[k] = 2.0 * normal(engine);
    Matrix a(classes, classes);
    for (Index c = 0; c < classes; ++c) {
      for (Index r = 0; r < classes; ++r) a(r, c) = normal(engine);
    }
    Matrix cov = a * a.transpose() / static_cast<double>(classes);
    cov = 0.5 * (cov + cov.transpose());
    out.emplace_back(std::move(mean), FullCovariance{std::move(cov)});
  }
  return out;
}

BenchReport bench(const BenchConfig& config) {
  if (config.batch < 1) throw ConfigError("batch must be at least 1");
  if (config.classes < 2) throw ConfigError("classes must be at least 2");
  if (config.repeats < 1) throw ConfigError("repeats must be at least 1");
  const std::vector<LogitGaussian> gaussians =
      bench_gaussians(config.batch, config.classes, config.seed);
  const double per = 1.0 / static_cast<double>(gaussians.size());

  BenchReport rep;
  rep.seed = config.seed;
  rep.batch = config.batch;
  rep.classes = config.classes;
  rep.repeats = config.repeats;

  volatile double sink = 0.0;
  std::vector<double> times;
  for (int r = 0; r < config.repeats; ++r) {
    const auto start = Clock::now();
    double acc = 0.0;
    for (const auto& g : gaussians) acc += lb_predictive_mean(g)[0];
    times.push_back(seconds_since(start) * per);
    sink = sink + acc;
  }
  rep.lb_per_record = median(times);

  for (std::size_t n : config.mc_samples) {
    times.clear();
    for (int r = 0; r < config.repeats; ++r) {
      const auto start = Clock::now();
      double acc = 0.0;
      for (std::size_t i = 0; i < gaussians.size(); ++i) {
        acc += mc_softmax_mean(gaussians[i], n, derive_seed(config.seed, i + 1), 1)[0];
      }
      times.push_back(seconds_since(start) * per);
      sink = sink + acc;
    }
    rep.mc_per_record.emplace_back(n, median(times));
  }
  return rep;
}

void write_report(std::ostream& out, const BenchReport& r) {
  out << "seed: " << r.seed << '\n'
      << "batch: " << r.batch << '\n'
      << "classes: " << r.classes << '\n'
      << "repeats: " << r.repeats << '\n'
      << "threads: 1\n"
      << "lb_s_per_record: " << num(r.lb_per_record) << '\n';
  for (const auto& [n, t] : r.mc_per_record) {
    out << "mc" << n << "_s_per_record: " << num(t) << '\n';
  }
  for (const auto& [n, t] : r.mc_per_record) {
    out << "speedup_mc" << n << "_over_lb: " << num(t / r.lb_per_record) << '\n';
  }
}

void write_fig2_csv(std::ostream& out, const std::vector<std::pair<double, double>>& shapes,
                    int grid) {
  out << "a,b,x,beta_density,laplace_density,laplace_status,bridge_density\n";
  for (const auto& [a, b] : shapes) {
    const BetaBridgeCurves c = beta_bridge_curves(ShapePair(a, b), grid);
    for (Index i = 0; i < c.x.size(); ++i) {
      out << num(a) << ',' << num(b) << ',' << num(c.x[i]) << ',' << num(c.beta[i]) << ',';
      if (c.laplace) {
        out << num((*c.laplace)[i]) << ",ok,";
      } else {
        out << ",absent,";
      }
      out << num(c.bridge[i]) << '\n';
    }
  }
}

std::vector<std::pair<double, double>> default_fig2_shapes() {
  return {{0.8, 0.9}, {4.0, 2.0}, {2.0, 7.0}};
}

}  // namespace lbridge
