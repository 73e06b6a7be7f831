#pragma once

#include <cmath>
#include <random>

#include "laplace_bridge/dist.hpp"
#include "laplace_bridge/specfun.hpp"

namespace testsupport {

using lbridge::Index;
using lbridge::Matrix;
using lbridge::Vector;

// Plain bisection on the Beta CDF, used as an independent quantile oracle.
inline double bisect_quantile(double p, const lbridge::ShapePair& s) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lbridge::reg_inc_beta(mid, s) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double total_variation(const Vector& a, const Vector& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline Vector random_alpha(std::mt19937_64& rng, Index k, double lo, double hi) {
  Vector a(k);
  for (Index i = 0; i < k; ++i) a[i] = log_uniform(rng, lo, hi);
  return a;
}

inline Vector random_normal(std::mt19937_64& rng, Index k, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = n(rng);
  return v;
}

inline Matrix random_spd(std::mt19937_64& rng, Index k, double scale = 1.0) {
  std::normal_distribution<double> n;
  Matrix a(k, k);
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < k; ++r) a(r, c) = n(rng);
  }
  Matrix m = scale * a * a.transpose() / static_cast<double>(k);
  return 0.5 * (m + m.transpose());
}

}  // namespace testsupport
