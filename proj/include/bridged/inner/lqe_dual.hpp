#pragma once

// Dual ascent for the latent quadratic exponential model. The primal is
//   g(ζ) = ½ ζᵀQ⁻¹ζ + Σ [log(1 + e^{ζ_i}) − y_i ζ_i]
// and the dual, over p = α + y ∈ (0,1)^n,
//   g†(α) = −½ αᵀQα − Σ [p_i log p_i + (1 − p_i) log(1 − p_i)].
// The maximizer gives ẑ = −Qα̂ and ẑᵀQ⁻¹ẑ = α̂ᵀQα̂, so Q is never inverted.

#include <algorithm>
#include <cmath>
#include <limits>

#include "bridged/error.hpp"
#include "bridged/inner/solution.hpp"
#include "bridged/numerics/linalg.hpp"
#include "bridged/stats.hpp"

namespace bridged {

struct LqeOptions {
  double tol = 1e-8;       // on ‖∇g†‖∞
  int max_iter = 10000;
  double margin = 1e-10;   // p stays inside [margin, 1 − margin]
  double rank_tol = 1e-10; // pivoted-Cholesky cutoff, relative to max diag(Q)
  bool factor_kernel = true;  // models: factor Q column by column instead of forming it when n > 64
};

struct LqeSolution : InnerSolution<VectorXd> {
  double quad_form = 0.0;   // α̂ᵀQα̂ = ẑᵀQ⁻¹ẑ
  double dual_value = 0.0;  // g†(α̂)
  double gap = 0.0;         // g(ẑ) − g†(α̂) ≥ 0
};

namespace detail {

inline double neg_entropy(double p) {
  double s = 0.0;
  if (p > 0.0) s += p * std::log(p);
  if (p < 1.0) s += (1.0 - p) * std::log1p(-p);
  return s;
}

inline void check_binary(const VectorXd& y) {
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0) throw InvalidInput("labels must be 0 or 1");
}

}  // namespace detail

/// g†(α); −∞ outside the feasible box.
inline double lqe_dual_objective(const VectorXd& alpha, const VectorXd& y, const SymMatrix& q) {
  double s = -0.5 * alpha.dot(q.matrix() * alpha);
  for (Index i = 0; i < y.size(); ++i) {
    const double p = alpha(i) + y(i);
    if (!(p > 0.0 && p < 1.0)) return stats::kNegInf;
    s -= detail::neg_entropy(p);
  }
  return s;
}

inline double lqe_loss(const VectorXd& z, const VectorXd& y) {
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) s += stats::log1p_exp(z(i)) - y(i) * z(i);
  return s;
}

/// g(ζ) with an explicit solve against Q; Q must be positive definite.
inline double lqe_primal_objective(const VectorXd& zeta, const VectorXd& y, const SymMatrix& q) {
  return 0.5 * zeta.dot(cholesky_solve(q, zeta)) + lqe_loss(zeta, y);
}

namespace detail {

// Projected Newton on p = α + y. `apply(v)` is Qv and `newton(curv, g)` solves
// (Q + diag curv) d = g.
template <class Apply, class Newton>
LqeSolution lqe_newton(const VectorXd& y, Apply&& apply, Newton&& newton, const LqeOptions& opt, const VectorXd* warm) {
  const Index n = y.size();
  VectorXd p(n);
  if (warm) {
    if (warm->size() != n) throw InvalidInput("dual_ascent_lqe: warm start has wrong length");
    p = *warm + y;
    for (Index i = 0; i < n; ++i)
      if (!(p(i) > 0.0 && p(i) < 1.0)) throw InvalidInput("dual_ascent_lqe: warm start is not strictly feasible");
    p = p.cwiseMax(opt.margin).cwiseMin(1.0 - opt.margin);
  } else {
    p.setConstant(0.5);
  }
  VectorXd alpha = p - y;

  auto dual_value = [&](const VectorXd& pp, double quad) {
    double s = -0.5 * quad;
    for (Index i = 0; i < n; ++i) s -= neg_entropy(pp(i));
    return s;
  };

  VectorXd qa = apply(alpha);
  double quad = alpha.dot(qa);
  double fval = dual_value(p, quad);
  VectorXd grad(n), d(n);
  double gnorm = 0.0;
  int it = 0;
  for (;; ++it) {
    for (Index i = 0; i < n; ++i) grad(i) = -qa(i) - std::log(p(i) / (1.0 - p(i)));
    gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= opt.tol) break;
    if (it >= opt.max_iter) throw ConvergenceFailure("dual_ascent_lqe: iteration cap reached", gnorm, it);

    const VectorXd curv = (p.array() * (1.0 - p.array())).inverse().matrix();
    d = newton(curv, grad);

    double tmax = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (d(i) > 0.0) tmax = std::min(tmax, (1.0 - opt.margin - p(i)) / d(i));
      else if (d(i) < 0.0) tmax = std::min(tmax, (opt.margin - p(i)) / d(i));
    }
    double t = std::min(1.0, 0.995 * tmax);
    const VectorXd qd = apply(d);
    const double slope = grad.dot(d);
    const double da = d.dot(qa), dd = d.dot(qd);
    const double slack = 1e-15 * (1.0 + std::abs(fval));
    VectorXd pn(n);
    double fn = fval;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const VectorXd raw = p + t * d;
      pn = raw.cwiseMax(opt.margin).cwiseMin(1.0 - opt.margin);
      // Clipping moves α off the ray, so recompute the quadratic when it bites.
      double qn;
      if ((pn.array() != raw.array()).any()) {
        const VectorXd an = pn - y;
        qn = an.dot(apply(an));
      } else {
        qn = quad + 2.0 * t * da + t * t * dd;
      }
      fn = dual_value(pn, qn);
      if (fn >= fval + 1e-4 * t * slope - slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) throw ConvergenceFailure("dual_ascent_lqe: line search failed", gnorm, it);
    p = pn;
    alpha = p - y;
    qa = apply(alpha);
    quad = alpha.dot(qa);
    fval = dual_value(p, quad);
  }

  LqeSolution sol;
  sol.z = -qa;
  sol.dual = alpha;
  sol.quad_form = quad;
  sol.dual_value = fval;
  sol.objective = 0.5 * quad + lqe_loss(sol.z, y);
  double gap = 0.0;
  for (Index i = 0; i < n; ++i) gap += stats::bernoulli_kl_logit(p(i), sol.z(i));
  sol.gap = gap;
  sol.iterations = it;
  sol.residual = gnorm;
  return sol;
}

}  // namespace detail

inline LqeSolution dual_ascent_lqe(const VectorXd& y, const SymMatrix& q, const LqeOptions& opt = {},
                                   const VectorXd* warm = nullptr) {
  const Index n = y.size();
  if (n < 1) throw InvalidInput("dual_ascent_lqe: empty data");
  if (q.size() != n) throw InvalidInput("dual_ascent_lqe: dimension mismatch");
  detail::check_binary(y);
  const MatrixXd& qm = q.matrix();

  // Low-rank factor for the Newton system, or dense when Q is not low rank.
  const double qmax = qm.diagonal().maxCoeff();
  MatrixXd f;
  bool low_rank = false;
  if (n > 64 && qmax > 0.0) {
    f = pivoted_cholesky(qm, opt.rank_tol * qmax, n / 3);
    low_rank = f.cols() < n / 3 || (qm.diagonal() - f.rowwise().squaredNorm()).maxCoeff() <= opt.rank_tol * qmax;
  }
  auto apply = [&](const VectorXd& v) { return VectorXd(qm * v); };
  auto newton = [&](const VectorXd& curv, const VectorXd& g) -> VectorXd {
    if (low_rank) return DiagPlusLowRank(curv, f).solve(g);
    MatrixXd h = qm;
    h.diagonal() += curv;
    return cholesky_solve_factored(cholesky_factor(h), g);
  };
  return detail::lqe_newton(y, apply, newton, opt, warm);
}

/// Same solve with Q = FFᵀ given only through F; every step is O(n r).
inline LqeSolution dual_ascent_lqe_factored(const VectorXd& y, const MatrixXd& f, const LqeOptions& opt = {},
                                            const VectorXd* warm = nullptr) {
  if (y.size() < 1) throw InvalidInput("dual_ascent_lqe: empty data");
  if (f.rows() != y.size()) throw InvalidInput("dual_ascent_lqe: dimension mismatch");
  detail::check_binary(y);
  auto apply = [&](const VectorXd& v) { return VectorXd(f * (f.transpose() * v)); };
  auto newton = [&](const VectorXd& curv, const VectorXd& g) { return DiagPlusLowRank(curv, f).solve(g); };
  return detail::lqe_newton(y, apply, newton, opt, warm);
}

}  // namespace bridged
