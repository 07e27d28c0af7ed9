#pragma once

// Weak-duality envelope for the latent quadratic exponential model: for any
// feasible α̃, g†(α̃) ≤ min_ζ g, so exp{−g†(α̃)} dominates the likelihood and
// α̃ᵀQα̃ ≤ ‖α̃‖² n τ bounds its λ-dependence.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bridged/models/lqe.hpp"

namespace bridged {

/// α̃_i = −1/n if y_i = 1, +1/n if y_i = 0.
inline VectorXd default_dual_envelope(const VectorXd& y) {
  const double n = static_cast<double>(y.size());
  return ((1.0 - 2.0 * y.array()) / n).matrix();
}

struct ProprietyPoint {
  double tau = 0.0, b = 0.0;
  double log_envelope = 0.0;   // −g†(α̃) + log prior
  double log_kernel = 0.0;     // −min g + log prior
  double quad_form = 0.0;      // α̃ᵀQα̃
  double quad_bound = 0.0;     // ‖α̃‖² · n τ
  bool holds = false;
};

struct ProprietyReport {
  std::vector<ProprietyPoint> points;
  int violations = 0;
  double min_margin = 0.0;  // min over the grid of log_envelope − log_kernel
};

inline ProprietyReport propriety_dual_bound_check(const LqeModel& model, const VectorXd& alpha_tilde,
                                                  const std::vector<VectorXd>& lambda_grid, double slack = 0.0) {
  const VectorXd& y = model.data().y;
  if (alpha_tilde.size() != y.size()) throw InvalidInput("propriety check: α̃ has wrong length");
  for (Index i = 0; i < y.size(); ++i) {
    const double p = alpha_tilde(i) + y(i);
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("propriety check: α̃ is not strictly feasible");
  }
  const double n = static_cast<double>(y.size());
  ProprietyReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const VectorXd& lam : lambda_grid) {
    const SymMatrix q = model.covariance(lam);
    const LqeSolution sol = model.solve(lam, nullptr);
    const double lp = model.log_prior(lam);
    ProprietyPoint pt;
    pt.tau = lam(0);
    pt.b = lam(1);
    pt.log_envelope = -lqe_dual_objective(alpha_tilde, y, q) + lp;
    pt.log_kernel = -sol.objective + lp;
    pt.quad_form = alpha_tilde.dot(q.matrix() * alpha_tilde);
    pt.quad_bound = alpha_tilde.squaredNorm() * n * lam(0);
    // Floating-point slack: both sides are sums of O(n) terms.
    const double fp = 1e-12 * (1.0 + std::abs(pt.log_kernel));
    pt.holds = pt.log_envelope >= pt.log_kernel - slack - fp && pt.quad_form <= pt.quad_bound * (1.0 + 1e-12);
    if (!pt.holds) ++rep.violations;
    rep.min_margin = std::min(rep.min_margin, pt.log_envelope - pt.log_kernel);
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace bridged
