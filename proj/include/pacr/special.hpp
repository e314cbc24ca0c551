#pragma once

// Special functions behind the Rician detection analysis.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pacr/error.hpp"

namespace pacr {

/// Modified Bessel function of the first kind, order zero.
inline double bessel_i0(double x) {
  detail::require(x >= 0.0, "bessel_i0: argument must be non-negative");
  return std::cyl_bessel_i(0.0, x);
}

/// Exponentially scaled I0: I0(x) * exp(-x). Finite for all x >= 0.
inline double bessel_i0e(double x) {
  detail::require(x >= 0.0, "bessel_i0e: argument must be non-negative");
  if (x < 500.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
  // Hankel expansion; the terms decay fast enough at this range.
  const double inv8x = 1.0 / (8.0 * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd * inv8x / k;
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

namespace detail {

// Poisson pmf table iterator: recursion for moderate means, log space for
// large means where exp(-mean) underflows.
class PoissonPmf {
 public:
  explicit PoissonPmf(double mean)
      : mean_(mean), log_space_(mean > 600.0), log_mean_(mean > 0.0 ? std::log(mean) : 0.0), p_(std::exp(-mean)) {}

  /// pmf at k; must be called with k = 0, 1, 2, ... in order.
  double next(int k) {
    if (log_space_) return std::exp(-mean_ + k * log_mean_ - std::lgamma(k + 1.0));
    if (k > 0) p_ *= mean_ / k;
    return p_;
  }

 private:
  double mean_;
  bool log_space_;
  double log_mean_;
  double p_;
};

inline int poisson_upper_index(double mean) {
  return static_cast<int>(std::ceil(mean + 15.0 * std::sqrt(mean + 1.0) + 40.0));
}

}  // namespace detail

/// First-order Marcum Q function Q1(a, b).
///
/// Uses the identity Q1(a, b) = Pr[J <= K] with K ~ Poisson(a^2/2) and
/// J ~ Poisson(b^2/2) independent. Both that sum and its complement have
/// only non-negative terms; the smaller one is summed directly so the
/// result keeps absolute accuracy near 0 and near 1.
inline double marcum_q1(double a, double b) {
  detail::require(a >= 0.0 && b >= 0.0, "marcum_q1: arguments must be non-negative");
  if (b == 0.0) return 1.0;
  const double lambda = 0.5 * a * a;
  const double mu = 0.5 * b * b;
  if (a < b) {
    // Q = sum_k P[K = k] * P[J <= k]
    detail::PoissonPmf pk(lambda);
    detail::PoissonPmf pj(mu);
    const int hi = detail::poisson_upper_index(lambda);
    double cdf_j = 0.0;
    double q = 0.0;
    for (int k = 0; k <= hi; ++k) {
      cdf_j += pj.next(k);
      q += pk.next(k) * cdf_j;
    }
    return std::clamp(q, 0.0, 1.0);
  }
  // 1 - Q = sum_j P[J = j] * P[K <= j - 1]
  detail::PoissonPmf pk(lambda);
  detail::PoissonPmf pj(mu);
  const int hi = detail::poisson_upper_index(mu);
  double cdf_k = 0.0;
  double comp = 0.0;
  pj.next(0);
  for (int j = 1; j <= hi; ++j) {
    cdf_k += pk.next(j - 1);
    comp += pj.next(j) * cdf_k;
  }
  return std::clamp(1.0 - comp, 0.0, 1.0);
}

struct RicianParams {
  double nu = 0.0;
  double sigma = 1.0;

  void validate() const {
    detail::require(nu >= 0.0, "RicianParams: nu must be non-negative");
    detail::require(sigma > 0.0, "RicianParams: sigma must be positive");
  }
};

inline double rician_pdf(double g, const RicianParams& p) {
  p.validate();
  detail::require(g >= 0.0, "rician_pdf: g must be non-negative");
  const double s2 = p.sigma * p.sigma;
  const double d = g - p.nu;
  return (g / s2) * bessel_i0e(g * p.nu / s2) * std::exp(-d * d / (2.0 * s2));
}

/// Pr[G >= g] for G ~ Rice(nu, sigma).
inline double rician_tail(double g, const RicianParams& p) {
  p.validate();
  return marcum_q1(p.nu / p.sigma, g / p.sigma);
}

}  // namespace pacr
