// lbridge: command-line harness for the Laplace Bridge library.
//
// Exit codes: 0 success, 2 input or configuration error, 3 domain error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/experiments.hpp"
#include "laplace_bridge/records.hpp"

namespace {

using namespace lbridge;

constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

// Writes to the named file, or to `fallback` when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file '" + path + "'");
  return in;
}

std::pair<double, double> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("shape pair must look like a,b: '" + text + "'");
  try {
    std::size_t used_a = 0;
    std::size_t used_b = 0;
    const std::string sa = text.substr(0, comma);
    const std::string sb = text.substr(comma + 1);
    const double a = std::stod(sa, &used_a);
    const double b = std::stod(sb, &used_b);
    if (used_a != sa.size() || used_b != sb.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("shape pair must look like a,b: '" + text + "'");
  }
}

struct Options {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string input;
  std::string ood;
  std::string output;
  std::string method = "lb";
  std::string direction;
  std::string cov = "full";
  std::size_t samples = 0;
  int bins = 50;
  double threshold = 0.05;
  std::size_t k_max = 10;
  int repeats = 3;
  std::size_t batch = 10000;
  long classes = 10;
  int grid = 512;
  std::vector<std::string> pairs;

  std::uint64_t resolved_seed() const { return seed ? *seed : default_seed(); }
};

int run_bridge(const Options& o) {
  std::ifstream in = open_input(o.input);
  Sink out(o.output, std::cout);
  std::size_t n = 0;
  if (o.direction == "forward") {
    n = bridge_forward(in, out.stream(), o.cov == "diag" ? CovOutput::Diagonal : CovOutput::Full);
  } else {
    n = bridge_inverse(in, out.stream());
  }
  std::cerr << "bridge " << o.direction << ": " << n << " records\n";
  return 0;
}

int run_kl(const Options& o) {
  KlConfig config;
  config.seed = o.resolved_seed();
  config.bins = o.bins;
  if (o.samples > 0) config.truth_samples = o.samples;
  config.threads = o.threads;
  const auto sets = default_kl_sets();
  const auto rows = kl_experiment(sets, config);
  Sink csv(o.output, std::cout);
  write_kl_csv(csv.stream(), rows);
  std::ostream& report = o.output.empty() ? std::cerr : std::cout;
  report << "seed: " << config.seed << '\n'
         << "bins_per_axis: " << config.bins << '\n'
         << "truth_samples: " << config.truth_samples << '\n';
  for (const auto& set : sets) {
    const auto cross = kl_crossover(rows, set.name);
    report << "crossover_" << set.name << ": " << (cross ? std::to_string(*cross) : "none")
           << '\n';
  }
  return 0;
}

int run_ood(const Options& o) {
  const auto in_dist = read_logit_file(o.input);
  const auto ood = read_logit_file(o.ood);
  PredictConfig config;
  config.seed = o.resolved_seed();
  config.samples = o.samples > 0 ? o.samples : 1000;
  config.threads = o.threads;
  const OodReport r = ood_eval(in_dist, ood, parse_method(o.method), config);
  Sink out(o.output, std::cout);
  write_report(out.stream(), r);
  return 0;
}

int run_topk(const Options& o) {
  const auto records = read_logit_file(o.input);
  TopkConfig config;
  config.threshold = o.threshold;
  config.k_max = o.k_max;
  config.threads = o.threads;
  const TopkReport r = topk_eval(records, config);
  write_report(std::cout, r);
  if (!o.output.empty()) {
    Sink csv(o.output, std::cout);
    write_histogram_csv(csv.stream(), r);
  } else {
    write_histogram_csv(std::cout, r);
  }
  return 0;
}

int run_bench(const Options& o) {
  BenchConfig config;
  config.seed = o.resolved_seed();
  config.batch = o.batch;
  config.classes = static_cast<Index>(o.classes);
  config.repeats = o.repeats;
  const BenchReport r = bench(config);
  Sink out(o.output, std::cout);
  write_report(out.stream(), r);
  return 0;
}

int run_fig2(const Options& o) {
  std::vector<std::pair<double, double>> shapes;
  for (const auto& p : o.pairs) shapes.push_back(parse_pair(p));
  if (shapes.empty()) shapes = default_fig2_shapes();
  // Validate every pair before writing anything.
  for (const auto& [a, b] : shapes) ShapePair(a, b);
  if (o.grid < 16) throw ConfigError("grid must have at least 16 points");
  std::ostringstream buffer;
  write_fig2_csv(buffer, shapes, o.grid);
  Sink out(o.output, std::cout);
  out.stream() << buffer.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplace Bridge numerics harness"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&o](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "RNG seed (default: $LB_SEED or 1234)");
  };
  auto add_threads = [&o](CLI::App* cmd) {
    cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
  };

  auto* bridge = app.add_subcommand("bridge", "Map Dirichlet records to Gaussians or back");
  bridge->add_option("direction", o.direction, "forward or inverse")
      ->required()
      ->check(CLI::IsMember({"forward", "inverse"}));
  bridge->add_option("--input", o.input, "Input JSONL file")->required();
  bridge->add_option("--output", o.output, "Output JSONL file (default: stdout)");
  bridge->add_option("--cov", o.cov, "Covariance written by forward: full or diag")
      ->check(CLI::IsMember({"full", "diag"}));

  auto* kl = app.add_subcommand("kl", "KL of sample histograms and of the bridge vs ground truth");
  kl->add_option("--output", o.output, "CSV file (default: stdout)");
  kl->add_option("--samples", o.samples, "Ground-truth sample count (default 100000)");
  kl->add_option("--bins", o.bins, "Histogram bins per axis")->check(CLI::PositiveNumber);
  add_seed(kl);
  add_threads(kl);

  auto* ood = app.add_subcommand("ood", "MMC and AUROC for in-distribution vs OOD records");
  ood->add_option("--input", o.input, "In-distribution JSONL file")->required();
  ood->add_option("--ood", o.ood, "Out-of-distribution JSONL file")->required();
  ood->add_option("--method", o.method, "lb, mc, mackay or sodpp")
      ->check(CLI::IsMember({"lb", "mc", "mackay", "sodpp"}));
  ood->add_option("--samples", o.samples, "MC samples per record (default 1000)");
  ood->add_option("--output", o.output, "Report file (default: stdout)");
  add_seed(ood);
  add_threads(ood);

  auto* topk = app.add_subcommand("topk", "Uncertainty-aware top-k over labelled records");
  topk->add_option("--input", o.input, "Labelled JSONL file")->required();
  topk->add_option("--threshold", o.threshold, "Overlap threshold T in (0, 1)");
  topk->add_option("--k-max", o.k_max, "Largest prediction set size")->check(CLI::PositiveNumber);
  topk->add_option("--output", o.output, "Histogram CSV file (default: stdout)");
  add_threads(topk);

  auto* bench = app.add_subcommand("bench", "Per-record timing of the bridge vs MC");
  bench->add_option("--batch", o.batch, "Number of Gaussians")->check(CLI::PositiveNumber);
  bench->add_option("--classes", o.classes, "Classes K")->check(CLI::Range(2L, 100000L));
  bench->add_option("--repeats", o.repeats, "Timing repeats (median is reported)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--output", o.output, "Report file (default: stdout)");
  add_seed(bench);

  auto* fig2 = app.add_subcommand("fig2", "Beta, Laplace and bridge curves for Beta shapes");
  fig2->add_option("--pair", o.pairs, "Shape pair a,b (repeatable)");
  fig2->add_option("--grid", o.grid, "Grid points on (0, 1)");
  fig2->add_option("--output", o.output, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*bridge) return run_bridge(o);
    if (*kl) return run_kl(o);
    if (*ood) return run_ood(o);
    if (*topk) return run_topk(o);
    if (*bench) return run_bench(o);
    if (*fig2) return run_fig2(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DecompositionError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ConvergenceError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitInput;
}
