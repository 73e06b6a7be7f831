#include "laplace_bridge/dist.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "laplace_bridge/errors.hpp"

namespace lbridge {

namespace {

void check_index(const DirichletParams& params, Index k) {
  if (k < 0 || k >= params.size()) {
    throw IndexError("class index " + std::to_string(k) + " out of range for K=" +
                     std::to_string(params.size()));
  }
}

Vector log_softmax(const Vector& z) {
  return z.array() - log_sum_exp(z);
}

}  // namespace

DirichletParams::DirichletParams(Vector alpha) : alpha_(std::move(alpha)), total_(0.0) {
  if (alpha_.size() < 2) {
    throw DomainError("a Dirichlet needs at least two classes, got " +
                      std::to_string(alpha_.size()));
  }
  for (Index k = 0; k < alpha_.size(); ++k) {
    if (!(alpha_[k] > 0.0) || !std::isfinite(alpha_[k])) {
      throw DomainError("concentration alpha[" + std::to_string(k) +
                        "] must be positive and finite, got " + std::to_string(alpha_[k]));
    }
  }
  total_ = alpha_.sum();
}

SimplexPoint::SimplexPoint(Vector pi, double tolerance) : pi_(std::move(pi)) {
  if (pi_.size() < 2) throw DomainError("a simplex point needs at least two components");
  for (Index k = 0; k < pi_.size(); ++k) {
    if (!(pi_[k] >= 0.0 && pi_[k] <= 1.0)) {
      throw DomainError("simplex component " + std::to_string(k) + " outside [0, 1]: " +
                        std::to_string(pi_[k]));
    }
  }
  const double sum = pi_.sum();
  if (!(std::abs(sum - 1.0) <= tolerance)) {
    throw DomainError("simplex components sum to " + std::to_string(sum) + ", not 1");
  }
}

Index SimplexPoint::argmax() const {
  Index best = 0;
  for (Index k = 1; k < pi_.size(); ++k) {
    if (pi_[k] > pi_[best]) best = k;
  }
  return best;
}

void check_symmetric_psd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + " must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw DecompositionError(std::string(what) + " has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw DecompositionError(std::string(what) + " is not symmetric (max asymmetry " +
                             std::to_string(asym) + ")");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -1e-9 * largest) {
    throw DecompositionError(std::string(what) + " is not positive semi-definite (eigenvalue " +
                             std::to_string(ev.minCoeff()) + ")");
  }
}

LogitGaussian::LogitGaussian(Vector mean, Covariance cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const Index k = mean_.size();
  if (k < 1) throw DimensionError("logit Gaussian needs a non-empty mean");
  if (!mean_.allFinite()) throw DomainError("logit mean has non-finite entries");
  std::visit(
      [k](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCovariance>) {
          if (c.matrix.rows() != k || c.matrix.cols() != k) {
            throw DimensionError("full covariance must be " + std::to_string(k) + "x" +
                                 std::to_string(k));
          }
          check_symmetric_psd(c.matrix, "full covariance");
        } else if constexpr (std::is_same_v<T, DiagonalCovariance>) {
          if (c.variances.size() != k) {
            throw DimensionError("diagonal covariance must have " + std::to_string(k) +
                                 " entries");
          }
          for (Index i = 0; i < k; ++i) {
            if (!(c.variances[i] >= 0.0) || !std::isfinite(c.variances[i])) {
              throw DecompositionError("diagonal variance " + std::to_string(i) +
                                       " must be non-negative and finite");
            }
          }
        } else {
          if (!(c.scale >= 0.0) || !std::isfinite(c.scale)) {
            throw DecompositionError("Kronecker scale must be non-negative and finite");
          }
          if (c.factor.rows() != k || c.factor.cols() != k) {
            throw DimensionError("Kronecker factor must be " + std::to_string(k) + "x" +
                                 std::to_string(k));
          }
          check_symmetric_psd(c.factor, "Kronecker factor");
        }
      },
      cov_);
}

Vector LogitGaussian::variances() const {
  return std::visit(
      [](const auto& c) -> Vector {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCovariance>) {
          return c.matrix.diagonal();
        } else if constexpr (std::is_same_v<T, DiagonalCovariance>) {
          return c.variances;
        } else {
          return c.scale * c.factor.diagonal();
        }
      },
      cov_);
}

Matrix LogitGaussian::dense_covariance() const {
  return std::visit(
      [](const auto& c) -> Matrix {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCovariance>) {
          return c.matrix;
        } else if constexpr (std::is_same_v<T, DiagonalCovariance>) {
          return c.variances.asDiagonal();
        } else {
          return c.scale * c.factor;
        }
      },
      cov_);
}

double log_sum_exp(const Vector& z) {
  const double m = z.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((z.array() - m).exp().sum());
}

Vector softmax(const Vector& z) {
  Vector e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

double dirichlet_log_density(const DirichletParams& params, const SimplexPoint& x) {
  if (x.size() != params.size()) {
    throw DimensionError("simplex point has " + std::to_string(x.size()) +
                         " components, Dirichlet has " + std::to_string(params.size()));
  }
  double result = log_gamma(params.total());
  for (Index k = 0; k < params.size(); ++k) {
    if (!(x[k] > 0.0)) {
      throw DomainError("Dirichlet density needs x_k > 0; component " + std::to_string(k) +
                        " is " + std::to_string(x[k]));
    }
    result += (params[k] - 1.0) * std::log(x[k]) - log_gamma(params[k]);
  }
  return result;
}

double dirichlet_log_density_softmax_basis(const DirichletParams& params, const Vector& z) {
  if (z.size() != params.size()) {
    throw DimensionError("logit vector has " + std::to_string(z.size()) +
                         " entries, Dirichlet has " + std::to_string(params.size()));
  }
  if (!z.allFinite()) throw DomainError("logits must be finite");
  const Vector lp = log_softmax(z);
  double result = log_gamma(params.total());
  for (Index k = 0; k < params.size(); ++k) {
    result += params[k] * lp[k] - log_gamma(params[k]);
  }
  return result;
}

SimplexPoint dirichlet_mean(const DirichletParams& params) {
  return SimplexPoint(params.alpha() / params.total(), 1e-12 * params.size());
}

SimplexPoint dirichlet_mode(const DirichletParams& params) {
  for (Index k = 0; k < params.size(); ++k) {
    if (!(params[k] > 1.0)) {
      throw DomainError("Dirichlet mode is interior only when every alpha_k > 1; alpha[" +
                        std::to_string(k) + "] = " + std::to_string(params[k]));
    }
  }
  const Vector shifted = params.alpha().array() - 1.0;
  return SimplexPoint(shifted / shifted.sum(), 1e-12 * params.size());
}

double dirichlet_component_variance(const DirichletParams& params, Index k) {
  check_index(params, k);
  const double a0 = params.total();
  const double rest = a0 - params[k];
  return params[k] * rest / (a0 * a0 * (a0 + 1.0));
}

Matrix dirichlet_covariance(const DirichletParams& params) {
  const double a0 = params.total();
  const Vector m = params.alpha() / a0;
  Matrix cov = -(m * m.transpose()) / (a0 + 1.0);
  cov.diagonal() += m / (a0 + 1.0);
  return cov;
}

DirichletParams dirichlet_marginal(const DirichletParams& params,
                                   const std::vector<std::vector<Index>>& groups) {
  if (groups.size() < 2) throw PartitionError("a marginal needs at least two groups");
  std::vector<bool> seen(static_cast<std::size_t>(params.size()), false);
  Vector merged(static_cast<Index>(groups.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw PartitionError("group " + std::to_string(g) + " is empty");
    double sum = 0.0;
    for (Index k : groups[g]) {
      if (k < 0 || k >= params.size()) {
        throw PartitionError("index " + std::to_string(k) + " outside 0.." +
                             std::to_string(params.size() - 1));
      }
      if (seen[static_cast<std::size_t>(k)]) {
        throw PartitionError("index " + std::to_string(k) + " appears in more than one group");
      }
      seen[static_cast<std::size_t>(k)] = true;
      sum += params[k];
    }
    merged[static_cast<Index>(g)] = sum;
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) throw PartitionError("index " + std::to_string(k) + " is not in any group");
  }
  return DirichletParams(std::move(merged));
}

ShapePair beta_marginal(const DirichletParams& params, Index k) {
  check_index(params, k);
  // Summing the rest directly keeps b exact when alpha_k dominates alpha_0.
  double rest = 0.0;
  for (Index l = 0; l < params.size(); ++l) {
    if (l != k) rest += params[l];
  }
  return ShapePair(params[k], rest);
}

LogitSampler::LogitSampler(const LogitGaussian& g) : mean_(g.mean()), diagonal_(false) {
  const Index k = g.size();
  if (const auto* diag = std::get_if<DiagonalCovariance>(&g.covariance())) {
    diagonal_ = true;
    scale_ = diag->variances.cwiseSqrt();
    return;
  }
  double scale = 1.0;
  Matrix sym;
  if (const auto* full = std::get_if<FullCovariance>(&g.covariance())) {
    sym = 0.5 * (full->matrix + full->matrix.transpose());
  } else {
    const auto& kron = std::get<ScaledKronCovariance>(g.covariance());
    sym = 0.5 * (kron.factor + kron.factor.transpose());
    scale = kron.scale;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw DecompositionError("eigendecomposition of the logit covariance failed");
  }
  Vector ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -1e-9 * largest) {
    throw DecompositionError("logit covariance is not positive semi-definite");
  }
  const double floor = static_cast<double>(k) * DBL_EPSILON * largest;
  for (Index i = 0; i < k; ++i) ev[i] = ev[i] <= floor ? 0.0 : std::sqrt(scale * ev[i]);
  factor_ = eig.eigenvectors() * ev.asDiagonal();
}

void LogitSampler::draw(Engine& engine, Vector& out) const {
  const Index k = mean_.size();
  std::normal_distribution<double> normal;
  Vector eps(k);
  for (Index i = 0; i < k; ++i) eps[i] = normal(engine);
  if (diagonal_) {
    out = mean_ + scale_.cwiseProduct(eps);
  } else {
    out.noalias() = factor_ * eps;
    out += mean_;
  }
}

Matrix sample_logit_gaussian(const LogitGaussian& g, std::size_t n, std::uint64_t seed,
                             unsigned threads) {
  if (n == 0) throw DomainError("sample count must be at least 1");
  const LogitSampler sampler(g);
  Matrix out(static_cast<Index>(n), g.size());
  const std::size_t shards = (n + kShardSize - 1) / kShardSize;
  parallel_for(shards, threads, [&](std::size_t shard) {
    Engine engine = make_engine(seed, shard);
    Vector z;
    const std::size_t end = std::min(n, (shard + 1) * kShardSize);
    for (std::size_t i = shard * kShardSize; i < end; ++i) {
      sampler.draw(engine, z);
      out.row(static_cast<Index>(i)) = z.transpose();
    }
  });
  return out;
}

Matrix sample_dirichlet(const DirichletParams& params, std::size_t n, std::uint64_t seed,
                        unsigned threads) {
  if (n == 0) throw DomainError("sample count must be at least 1");
  const Index k = params.size();
  Matrix out(static_cast<Index>(n), k);
  const std::size_t shards = (n + kShardSize - 1) / kShardSize;
  parallel_for(shards, threads, [&](std::size_t shard) {
    Engine engine = make_engine(seed, shard);
    Vector logs(k);
    const std::size_t end = std::min(n, (shard + 1) * kShardSize);
    for (std::size_t i = shard * kShardSize; i < end; ++i) {
      for (Index c = 0; c < k; ++c) logs[c] = log_gamma_variate(params[c], engine);
      out.row(static_cast<Index>(i)) = softmax(logs).transpose();
    }
  });
  return out;
}

}  // namespace lbridge
