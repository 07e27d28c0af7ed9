#pragma once

// Exact PG(1, c) draws by the alternating-series accept/reject scheme on the
// Jacobi distribution J*(1, c/2), with PG(1, c) = J*(1, c/2) / 4.

#include <cmath>
#include <numbers>

#include "bridged/random.hpp"
#include "bridged/stats.hpp"

namespace bridged {

namespace detail {

inline constexpr double kPgTrunc = 0.64;

// n-th coefficient of the series for the J*(1, 0) density at x.
inline double pg_series_coef(int n, double x) {
  constexpr double pi = std::numbers::pi;
  const double k = (n + 0.5) * pi;
  if (x > kPgTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double h = n + 0.5;
  return std::exp(std::log(pi) + std::log(h) + 1.5 * std::log(2.0 / (pi * x)) - 2.0 * h * h / x);
}

// P(left piece) = p / (p + q) for the mixture proposal.
inline double pg_left_mass(double z) {
  constexpr double pi = std::numbers::pi;
  const double t = kPgTrunc;
  const double fz = pi * pi / 8.0 + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + std::log(stats::normal_cdf(b));
  const double xa = x0 + z + std::log(stats::normal_cdf(a));
  const double q_over_p = 4.0 / pi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse-Gaussian(mu = 1/z, shape 1) truncated to (0, t).
inline double truncated_inverse_gaussian(double z, Rng& rng) {
  const double t = kPgTrunc;
  const double mu = z > 0.0 ? 1.0 / z : INFINITY;
  double x = t + 1.0;
  if (mu > t) {
    double alpha = 0.0;
    while (uniform01(rng) > alpha) {
      double e1, e2;
      do {
        e1 = std_exponential(rng);
        e2 = std_exponential(rng);
      } while (e1 * e1 > 2.0 * e2 / t);
      x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    while (x > t) {
      const double y0 = std_normal(rng);
      const double y = y0 * y0;
      x = mu + 0.5 * mu * mu * y - 0.5 * mu * std::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
      if (uniform01(rng) > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace detail

/// One exact draw from PG(1, c).
inline double polya_gamma_sample(double c, Rng& rng) {
  const double z = 0.5 * std::abs(c);
  const double fz = std::numbers::pi * std::numbers::pi / 8.0 + 0.5 * z * z;
  const double left = detail::pg_left_mass(z);
  for (;;) {
    double x;
    if (uniform01(rng) < left)
      x = detail::kPgTrunc + std_exponential(rng) / fz;
    else
      x = detail::truncated_inverse_gaussian(z, rng);

    double s = detail::pg_series_coef(0, x);
    const double y = uniform01(rng) * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= detail::pg_series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += detail::pg_series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

}  // namespace bridged
