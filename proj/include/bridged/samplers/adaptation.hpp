#pragma once

// Random-walk step adaptation. The proposal half-width in raw coordinate j is
// s_j = exp(ℓ) · shape_j. ℓ follows a Robbins–Monro recursion toward the
// target acceptance. shape starts at the initial step and is recalibrated from
// the chain's standard deviation at a quarter and at half of the window, each
// time from moments collected since the previous checkpoint so the transient
// from the initial value drops out; ℓ and its gain schedule restart there.
// Everything freezes when the window ends.

#include <algorithm>
#include <cmath>

#include "bridged/error.hpp"
#include "bridged/numerics/linalg.hpp"

namespace bridged {

struct AdaptationConfig {
  double target = 0.30;
  double window_fraction = 0.20;  // of all iterations; clamped to the burn-in
  double decay = 0.7;
  VectorXd initial_step;          // raw scale; empty → 0.1 per coordinate

  int window(int iters, int burn_in) const {
    return std::min(burn_in, static_cast<int>(std::floor(window_fraction * iters)));
  }
};

class StepAdapter {
 public:
  StepAdapter(Index dim, const AdaptationConfig& cfg, int window)
      : cfg_(cfg), window_(window), shape_(cfg.initial_step.size() ? cfg.initial_step : VectorXd::Constant(dim, 0.1)),
        mean_(VectorXd::Zero(dim)), m2_(VectorXd::Zero(dim)) {
    if (shape_.size() != dim) throw InvalidInput("adaptation: initial step has wrong length");
    if ((shape_.array() <= 0.0).any()) throw InvalidInput("adaptation: steps must be positive");
    if (!(cfg.target > 0.0 && cfg.target < 1.0)) throw InvalidInput("adaptation: target must lie in (0, 1)");
    step_ = shape_;
  }

  const VectorXd& step() const noexcept { return step_; }
  int window() const noexcept { return window_; }
  bool adapting(int t) const noexcept { return t < window_; }

  /// Iteration count at which the shape is recalibrated (fraction 1/k of the window).
  int checkpoint(int k) const noexcept { return std::max(25 * (4 / k), window_ / k); }

  /// Called after iteration t with the Metropolis acceptance probability and
  /// the current raw state.
  void update(int t, double accept_prob, const VectorXd& raw) {
    if (!adapting(t)) return;
    ++count_;
    const VectorXd delta = raw - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(raw - mean_);
    log_scale_ += std::pow(static_cast<double>(t + 1 - since_), -cfg_.decay) * (accept_prob - cfg_.target);
    if ((t + 1 == checkpoint(4) || t + 1 == checkpoint(2)) && count_ > 1) {
      // Uniform half-width √3 · 2.4/√d · sd matches the usual Gaussian scaling.
      const double mult = std::sqrt(3.0) * 2.4 / std::sqrt(static_cast<double>(shape_.size()));
      const VectorXd sd = (m2_ / static_cast<double>(count_ - 1)).cwiseSqrt();
      // Keep the old shape where the chain has not moved yet.
      for (Index j = 0; j < sd.size(); ++j)
        if (sd(j) > 1e-3 * shape_(j)) shape_(j) = mult * sd(j);
      log_scale_ = 0.0;
      since_ = t + 1;
      count_ = 0;
      mean_.setZero();
      m2_.setZero();
    }
    step_ = std::exp(log_scale_) * shape_;
  }

 private:
  AdaptationConfig cfg_;
  int window_;
  VectorXd shape_;
  VectorXd mean_, m2_;
  long count_ = 0;
  double log_scale_ = 0.0;
  int since_ = 0;
  VectorXd step_;
};

}  // namespace bridged
