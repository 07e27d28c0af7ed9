#pragma once

// Log densities of the priors used by the models, plus a few distribution
// functions shared by samplers and diagnostics.

#include <cmath>
#include <limits>
#include <numbers>

namespace bridged::stats {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

inline double normal_log_pdf(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  return -0.5 * u * u - std::log(sd) - kLogSqrt2Pi;
}

/// N+(0, sd^2) restricted to x > 0.
inline double half_normal_log_pdf(double x, double sd) {
  if (!(x > 0.0)) return kNegInf;
  return std::log(2.0) + normal_log_pdf(x, 0.0, sd);
}

/// Inverse-Gamma(shape, scale): density ∝ x^{-shape-1} exp(-scale/x).
inline double inverse_gamma_log_pdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

/// Gamma(shape, rate).
inline double gamma_log_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

/// Exponential(rate).
inline double exponential_log_pdf(double x, double rate) {
  if (x < 0.0) return kNegInf;
  return std::log(rate) - rate * x;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double log1p_exp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Bernoulli KL(p || q) given q through its logit; zero iff p == sigmoid(logit_q).
inline double bernoulli_kl_logit(double p, double logit_q) {
  // p log p + (1-p) log(1-p) - p log q - (1-p) log(1-q), with log q = -log1p_exp(-l).
  double kl = p * log_sigmoid(logit_q) * -1.0 + (1.0 - p) * log_sigmoid(-logit_q) * -1.0;
  if (p > 0.0) kl += p * std::log(p);
  if (p < 1.0) kl += (1.0 - p) * std::log1p(-p);
  return kl > 0.0 ? kl : 0.0;
}

}  // namespace bridged::stats
