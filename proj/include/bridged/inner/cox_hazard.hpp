#pragma once

// Profiled piecewise-constant baseline hazard for proportional-hazards data
// without censoring. With rates r_j on intervals (e_j, e_{j+1}],
//   log L = Σ_i [λ x_i + log r_{j(i)} − e^{λ x_i} Σ_j r_j E_ij],
// maximized at r̂_j = d_j / Σ_i e^{λ x_i} E_ij.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/inner/solution.hpp"
#include "bridged/numerics/linalg.hpp"
#include "bridged/stats.hpp"

namespace bridged {

/// Event times, covariates and interval edges. Precomputes exposure E_ij and
/// per-interval event counts d_j once.
class CoxDesign {
 public:
  /// `edges` has K+1 increasing entries starting at 0; the last may be +inf.
  CoxDesign(VectorXd times, VectorXd covariates, std::vector<double> edges)
      : times_(std::move(times)), x_(std::move(covariates)), edges_(std::move(edges)) {
    const Index n = times_.size();
    if (n < 1) throw InvalidInput("cox: empty data");
    if (x_.size() != n) throw InvalidInput("cox: times and covariates differ in length");
    if (edges_.size() < 2 || edges_.front() != 0.0) throw InvalidInput("cox: edges must start at 0 with at least one interval");
    for (std::size_t k = 1; k < edges_.size(); ++k)
      if (!(edges_[k] > edges_[k - 1])) throw InvalidInput("cox: edges must increase");
    const Index k = static_cast<Index>(edges_.size()) - 1;
    exposure_ = MatrixXd::Zero(n, k);
    events_ = VectorXd::Zero(k);
    for (Index i = 0; i < n; ++i) {
      const double t = times_(i);
      if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("cox: times must be finite and positive");
      if (!std::isfinite(x_(i))) throw InvalidInput("cox: covariates must be finite");
      if (!(t < edges_.back())) throw InvalidInput("cox: edges do not cover the data");
      for (Index j = 0; j < k; ++j) {
        const double lo = edges_[static_cast<std::size_t>(j)], hi = edges_[static_cast<std::size_t>(j + 1)];
        if (t <= lo) break;
        exposure_(i, j) = std::min(t, hi) - lo;
        if (t <= hi) events_(j) += 1.0;
      }
    }
  }

  Index size() const noexcept { return times_.size(); }
  Index intervals() const noexcept { return events_.size(); }
  const VectorXd& times() const noexcept { return times_; }
  const VectorXd& covariates() const noexcept { return x_; }
  const std::vector<double>& edges() const noexcept { return edges_; }
  const MatrixXd& exposure() const noexcept { return exposure_; }
  const VectorXd& events() const noexcept { return events_; }

  /// S_j(λ) = Σ_i e^{λ x_i} E_ij.
  VectorXd weighted_exposure(double lambda) const {
    const VectorXd w = (lambda * x_).array().exp().matrix();
    return exposure_.transpose() * w;
  }

  /// log S_j(λ), computed with the largest λx_i factored out; −inf for an
  /// interval without exposure.
  VectorXd log_weighted_exposure(double lambda) const {
    const double m = (lambda * x_).maxCoeff();
    const VectorXd w = (lambda * x_.array() - m).exp().matrix();
    const VectorXd s = exposure_.transpose() * w;
    return (s.array().log() + m).matrix();
  }

  /// Full log-likelihood at arbitrary rates.
  double log_likelihood(double lambda, const VectorXd& rates) const {
    const VectorXd s = weighted_exposure(lambda);
    double v = lambda * x_.sum();
    for (Index j = 0; j < intervals(); ++j) {
      if (events_(j) > 0.0) {
        if (!(rates(j) > 0.0)) return stats::kNegInf;
        v += events_(j) * std::log(rates(j));
      }
      v -= rates(j) * s(j);
    }
    return v;
  }

  /// Interval edges at 0, the empirical quantiles k/K of the times, and +inf.
  static std::vector<double> quantile_edges(const VectorXd& times, int k) {
    if (k < 1) throw InvalidInput("cox: need at least one interval");
    std::vector<double> t(times.data(), times.data() + times.size());
    std::sort(t.begin(), t.end());
    std::vector<double> e{0.0};
    for (int j = 1; j < k; ++j) {
      const double q = t[static_cast<std::size_t>(std::floor(static_cast<double>(j) / k * (t.size() - 1)))];
      if (q > e.back()) e.push_back(q);
    }
    e.push_back(std::numeric_limits<double>::infinity());
    return e;
  }

 private:
  VectorXd times_;
  VectorXd x_;
  std::vector<double> edges_;
  MatrixXd exposure_;
  VectorXd events_;
};

struct CoxProfile : InnerSolution<VectorXd> {  // z = r̂
  bool zero_exposure = false;  // some interval had no exposure; its rate is 0
};

/// r̂(λ) and the profile log-likelihood (returned as `objective`).
inline CoxProfile cox_profile_hazard(const CoxDesign& data, double lambda) {
  if (!std::isfinite(lambda)) throw InvalidInput("cox: lambda must be finite");
  const VectorXd ls = data.log_weighted_exposure(lambda);
  const VectorXd& d = data.events();
  CoxProfile out;
  out.z.resize(data.intervals());
  double v = lambda * data.covariates().sum();
  for (Index j = 0; j < data.intervals(); ++j) {
    if (!std::isfinite(ls(j))) {
      out.zero_exposure = true;
      out.z(j) = 0.0;
      if (d(j) > 0.0) v = stats::kNegInf;
      continue;
    }
    out.z(j) = std::exp(std::log(d(j)) - ls(j));
    if (d(j) > 0.0) v += d(j) * (std::log(d(j)) - ls(j) - 1.0);
  }
  out.objective = v;
  out.iterations = 0;
  out.residual = 0.0;
  return out;
}

inline CoxProfile cox_profile_hazard(const VectorXd& times, const VectorXd& covariates, double lambda,
                                     const std::vector<double>& edges) {
  return cox_profile_hazard(CoxDesign(times, covariates, edges), lambda);
}

}  // namespace bridged
