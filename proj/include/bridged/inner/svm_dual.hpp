#pragma once

// Soft-margin linear SVM in the parameterization
//   min_{w,b} ½ λ ‖w‖² + Σ max(0, 1 − y_i (wᵀx_i + b)),
// solved through its box-constrained dual (0 ≤ α ≤ 1/λ, Σ α_i y_i = 0) by
// two-coordinate updates with second-order working-set selection.

#include <algorithm>
#include <cmath>
#include <limits>

#include "bridged/error.hpp"
#include "bridged/inner/solution.hpp"
#include "bridged/numerics/linalg.hpp"

namespace bridged {

struct SvmOptions {
  double tol = 1e-8;  // maximal KKT violation m(α) − M(α)
  int max_iter = 100000;
};

struct SvmSolution : InnerSolution<VectorXd> {  // z = (w, b)
  VectorXd w;
  double b = 0.0;
  double hinge_sum = 0.0;
  double dual_value = 0.0;  // λ (Σα − ½‖w‖²), equal to the objective at the optimum
};

inline double svm_primal_objective(const MatrixXd& x, const VectorXd& y, double lambda, const VectorXd& w, double b) {
  double s = 0.5 * lambda * w.squaredNorm();
  const VectorXd f = x * w;
  for (Index i = 0; i < y.size(); ++i) s += std::max(0.0, 1.0 - y(i) * (f(i) + b));
  return s;
}

/// Feature matrix with its Gram matrix cached, for repeated solves with
/// changing labels and λ.
class SvmProblem {
 public:
  explicit SvmProblem(MatrixXd x) : x_(std::move(x)) {
    if (x_.rows() < 2) throw InvalidInput("svm: need at least two points");
    if (!x_.allFinite()) throw InvalidInput("svm: non-finite features");
    gram_ = x_ * x_.transpose();
  }

  const MatrixXd& features() const noexcept { return x_; }
  Index size() const noexcept { return x_.rows(); }

  SvmSolution solve(const VectorXd& y, double lambda, const SvmOptions& opt = {}, const VectorXd* warm = nullptr) const {
    const Index n = x_.rows();
    if (y.size() != n) throw InvalidInput("svm: label vector has wrong length");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("svm: lambda must be finite and positive");
    bool has_pos = false, has_neg = false;
    for (Index i = 0; i < n; ++i) {
      if (y(i) == 1.0) has_pos = true;
      else if (y(i) == -1.0) has_neg = true;
      else throw InvalidInput("svm: labels must be -1 or +1");
    }
    const double c = 1.0 / lambda;

    VectorXd alpha = VectorXd::Zero(n);
    if (warm && has_pos && has_neg) {
      if (warm->size() != n) throw InvalidInput("svm: warm start has wrong length");
      alpha = warm->cwiseMax(0.0).cwiseMin(c);
      repair_equality(alpha, y);
    }

    // G_i = (Qα)_i − 1 with Q_ij = y_i y_j x_iᵀx_j.
    VectorXd ya = y.cwiseProduct(alpha);
    VectorXd grad = y.cwiseProduct(gram_ * ya).array() - 1.0;

    auto upper = [&](Index t) { return alpha(t) >= c; };
    auto lower = [&](Index t) { return alpha(t) <= 0.0; };
    auto in_up = [&](Index t) { return (y(t) > 0.0 && !upper(t)) || (y(t) < 0.0 && !lower(t)); };
    auto in_low = [&](Index t) { return (y(t) < 0.0 && !upper(t)) || (y(t) > 0.0 && !lower(t)); };

    int it = 0;
    double gap = 0.0;
    for (;; ++it) {
      // Second-order working-set selection: i maximizes the violation, j the
      // guaranteed decrease b²/a of the two-variable subproblem.
      Index i = -1, j = -1;
      double gmax = -std::numeric_limits<double>::infinity();
      double gmin = std::numeric_limits<double>::infinity();
      for (Index t = 0; t < n; ++t) {
        const double v = -y(t) * grad(t);
        if (in_up(t) && v > gmax) {
          gmax = v;
          i = t;
        }
        if (in_low(t) && v < gmin) gmin = v;
      }
      gap = (i < 0 || !std::isfinite(gmin)) ? 0.0 : gmax - gmin;
      if (gap <= opt.tol) break;
      if (it >= opt.max_iter) throw ConvergenceFailure("svm_dual_solve: iteration cap reached", gap, it);
      double best = -std::numeric_limits<double>::infinity();
      for (Index t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        const double b = gmax + y(t) * grad(t);
        if (b <= 0.0) continue;
        double a = gram_(i, i) + gram_(t, t) - 2.0 * gram_(i, t);
        if (a <= 0.0) a = 1e-12;
        if (b * b / a > best) {
          best = b * b / a;
          j = t;
        }
      }

      const double kii = gram_(i, i), kjj = gram_(j, j), kij = gram_(i, j);
      const double ai = alpha(i), aj = alpha(j);
      double quad = kii + kjj - 2.0 * kij;  // ‖x_i − x_j‖²
      if (quad <= 0.0) quad = 1e-12;
      if (y(i) != y(j)) {
        const double delta = (-grad(i) - grad(j)) / quad;
        const double diff = alpha(i) - alpha(j);
        alpha(i) += delta;
        alpha(j) += delta;
        if (diff > 0.0) {
          if (alpha(j) < 0.0) {
            alpha(j) = 0.0;
            alpha(i) = diff;
          }
        } else if (alpha(i) < 0.0) {
          alpha(i) = 0.0;
          alpha(j) = -diff;
        }
        if (diff > 0.0) {
          if (alpha(i) > c) {
            alpha(i) = c;
            alpha(j) = c - diff;
          }
        } else if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = c + diff;
        }
      } else {
        const double delta = (grad(i) - grad(j)) / quad;
        const double sum = alpha(i) + alpha(j);
        alpha(i) -= delta;
        alpha(j) += delta;
        if (sum > c) {
          if (alpha(i) > c) {
            alpha(i) = c;
            alpha(j) = sum - c;
          }
          if (alpha(j) > c) {
            alpha(j) = c;
            alpha(i) = sum - c;
          }
        } else {
          if (alpha(j) < 0.0) {
            alpha(j) = 0.0;
            alpha(i) = sum;
          }
          if (alpha(i) < 0.0) {
            alpha(i) = 0.0;
            alpha(j) = sum;
          }
        }
      }
      const double dai = alpha(i) - ai, daj = alpha(j) - aj;
      for (Index t = 0; t < n; ++t)
        grad(t) += y(t) * (y(i) * gram_(t, i) * dai + y(j) * gram_(t, j) * daj);
    }

    // Bias from the free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    int nfree = 0;
    for (Index t = 0; t < n; ++t) {
      const double yg = y(t) * grad(t);
      if (upper(t)) {
        if (y(t) < 0.0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (y(t) > 0.0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++nfree;
        sum_free += yg;
      }
    }
    double rho;
    if (nfree > 0) rho = sum_free / nfree;
    else if (std::isfinite(ub) && std::isfinite(lb)) rho = 0.5 * (ub + lb);
    else rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);

    SvmSolution sol;
    sol.w = x_.transpose() * y.cwiseProduct(alpha);
    sol.b = -rho;
    sol.z.resize(sol.w.size() + 1);
    sol.z << sol.w, sol.b;
    const VectorXd f = x_ * sol.w;
    double hinge = 0.0;
    for (Index t = 0; t < n; ++t) hinge += std::max(0.0, 1.0 - y(t) * (f(t) + sol.b));
    sol.hinge_sum = hinge;
    sol.objective = 0.5 * lambda * sol.w.squaredNorm() + hinge;
    sol.dual_value = lambda * (alpha.sum() - 0.5 * sol.w.squaredNorm());
    sol.dual = alpha;
    sol.iterations = it;
    sol.residual = gap;
    return sol;
  }

 private:
  // Restores Σ α_i y_i = 0 by lowering entries of the heavier class in index order.
  static void repair_equality(VectorXd& alpha, const VectorXd& y) {
    double s = y.dot(alpha);
    const double sign = s > 0.0 ? 1.0 : -1.0;
    for (Index i = 0; i < alpha.size() && s * sign > 0.0; ++i) {
      if (y(i) != sign) continue;
      const double take = std::min(alpha(i), s * sign);
      alpha(i) -= take;
      s -= sign * take;
    }
  }

  MatrixXd x_;
  MatrixXd gram_;
};

inline SvmSolution svm_dual_solve(const MatrixXd& x, const VectorXd& y, double lambda, const SvmOptions& opt = {},
                                  const VectorXd* warm = nullptr) {
  return SvmProblem(x).solve(y, lambda, opt, warm);
}

}  // namespace bridged
