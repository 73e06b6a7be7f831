#pragma once

// Scalar special functions: log-gamma, the regularized incomplete beta
// function and its inverse. All functions are pure and reentrant.

namespace lbridge {

/// Shape pair (a, b) of a Beta distribution. Both shapes are positive.
class ShapePair {
 public:
  /// Throws DomainError unless a > 0 and b > 0 (and both finite).
  ShapePair(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  /// Shapes swapped: Beta(b, a), the law of 1 - X when X ~ Beta(a, b).
  ShapePair swapped() const noexcept { return ShapePair(b_, a_, Unchecked{}); }

  friend bool operator==(const ShapePair&, const ShapePair&) = default;

 private:
  struct Unchecked {};
  ShapePair(double a, double b, Unchecked) noexcept : a_(a), b_(b) {}

  double a_;
  double b_;
};

/// ln Gamma(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// ln B(a, b), accurate when one or both shapes are large.
double log_beta(const ShapePair& s);

/// Regularized incomplete beta function I_x(a, b), i.e. the Beta CDF.
///
/// Evaluated by the continued fraction for I_x(a, b) when
/// x < (a + 1) / (a + b + 2) and through 1 - I_{1-x}(b, a) otherwise.
/// Throws DomainError for x outside [0, 1] and ConvergenceError if the
/// continued fraction does not settle within its iteration budget.
double reg_inc_beta(double x, const ShapePair& s);

/// Upper tail 1 - I_x(a, b), computed without cancellation.
double reg_inc_beta_complement(double x, const ShapePair& s);

/// Log of the Beta(a, b) density at x in (0, 1). Returns -inf at the
/// endpoints when the density vanishes there and +inf where it diverges.
double beta_log_pdf(double x, const ShapePair& s);

/// Beta quantile: the x in [0, 1] with I_x(a, b) = p.
///
/// Newton iteration safeguarded by a shrinking bracket, falling back to
/// bisection whenever a Newton step leaves the bracket. If the quantile is
/// not representable the closest double is returned, which can be 0 or 1.
/// Throws DomainError for p outside (0, 1) and ConvergenceError after 200
/// iterations.
double beta_quantile(double p, const ShapePair& s);

}  // namespace lbridge
