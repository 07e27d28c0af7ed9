#pragma once

// Nuclear-norm penalized projection onto graph Laplacians,
//   min_ζ ½‖L − ζ‖_F² + λ̃ ‖ζ‖_*,  ζ symmetric, zero row sums, ζ_ij ≤ 0 (i ≠ j),
// by ADMM with a log barrier on the off-diagonals. The free variables are the
// strictly lower entries θ_e = ζ_ij (i > j); the diagonal is minus the row sums.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/inner/solution.hpp"
#include "bridged/numerics/linalg.hpp"
#include "bridged/numerics/spd.hpp"

namespace bridged {

struct AdmmOptions {
  double eta = 1.0;             // augmented-Lagrangian penalty
  double barrier = 1e-2;        // initial barrier weight ρ
  double barrier_min = 1e-8;
  int barrier_halving = 50;     // ρ halves every this many iterations
  int iters = 1500;
  double tol = 1e-5;            // on max(primal, dual) residual, relative to max(1, ‖L‖_F)
  int newton_steps = 30;
};

struct LaplacianProjection : InnerSolution<MatrixXd> {
  MatrixXd low_rank;  // singular-value-thresholded copy Z
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// Checks symmetry, zero row sums and nonpositive off-diagonals to `tol`.
inline bool is_graph_laplacian(const MatrixXd& l, double tol = 1e-10) {
  if (l.rows() != l.cols() || !l.allFinite()) return false;
  const Index r = l.rows();
  for (Index i = 0; i < r; ++i) {
    if (std::abs(l.row(i).sum()) > tol * std::max(1.0, l.row(i).cwiseAbs().sum())) return false;
    for (Index j = 0; j < i; ++j) {
      if (l(i, j) != l(j, i)) return false;
      if (l(i, j) > tol) return false;
    }
  }
  return true;
}

/// Laplacian D − A of a symmetric nonnegative adjacency matrix (diagonal ignored).
inline MatrixXd laplacian_from_adjacency(const MatrixXd& a) {
  const Index r = a.rows();
  MatrixXd l = MatrixXd::Zero(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < i; ++j) {
      const double w = 0.5 * (a(i, j) + a(j, i));
      l(i, j) = l(j, i) = -w;
      l(i, i) += w;
      l(j, j) += w;
    }
  return l;
}

namespace detail {

class EdgeIndex {
 public:
  explicit EdgeIndex(Index r) : r_(r) {
    for (Index i = 1; i < r; ++i)
      for (Index j = 0; j < i; ++j) edges_.emplace_back(i, j);
  }
  Index nodes() const noexcept { return r_; }
  Index size() const noexcept { return static_cast<Index>(edges_.size()); }
  const std::pair<Index, Index>& operator[](Index e) const { return edges_[static_cast<std::size_t>(e)]; }

  MatrixXd assemble(const VectorXd& theta) const {
    MatrixXd z = MatrixXd::Zero(r_, r_);
    for (Index e = 0; e < size(); ++e) {
      const auto [i, j] = (*this)[e];
      z(i, j) = z(j, i) = theta(e);
      z(i, i) -= theta(e);
      z(j, j) -= theta(e);
    }
    return z;
  }

  // ⟨A, B_e⟩ with B_e = e_i e_jᵀ + e_j e_iᵀ − e_i e_iᵀ − e_j e_jᵀ.
  VectorXd project(const MatrixXd& a) const {
    VectorXd v(size());
    for (Index e = 0; e < size(); ++e) {
      const auto [i, j] = (*this)[e];
      v(e) = a(i, j) + a(j, i) - a(i, i) - a(j, j);
    }
    return v;
  }

 private:
  Index r_;
  std::vector<std::pair<Index, Index>> edges_;
};

// Minimizes φ(θ) = (κ/2)‖ζ(θ) − C‖² − 2ρ Σ log(−θ_e) by damped Newton. The
// Hessian κ(2I + NᵀN) + diag(2ρ/θ²), N the unsigned incidence matrix, is
// inverted through an R×R capacitance system.
inline void barrier_newton(const EdgeIndex& edges, const MatrixXd& c, double kappa, double rho, VectorXd& theta,
                           int max_steps) {
  const Index m = edges.size(), r = edges.nodes();
  auto value = [&](const VectorXd& th) {
    double s = 0.5 * kappa * (edges.assemble(th) - c).squaredNorm();
    for (Index e = 0; e < m; ++e) s -= 2.0 * rho * std::log(-th(e));
    return s;
  };
  double f = value(theta);
  for (int step = 0; step < max_steps; ++step) {
    const MatrixXd resid = edges.assemble(theta) - c;
    VectorXd g = kappa * edges.project(resid);
    VectorXd dinv(m);
    for (Index e = 0; e < m; ++e) {
      g(e) -= 2.0 * rho / theta(e);
      dinv(e) = 1.0 / (2.0 * kappa + 2.0 * rho / (theta(e) * theta(e)));
    }
    MatrixXd cap = MatrixXd::Identity(r, r);
    VectorXd ut(VectorXd::Zero(r));
    for (Index e = 0; e < m; ++e) {
      const auto [i, j] = edges[e];
      const double w = kappa * dinv(e);
      cap(i, i) += w;
      cap(j, j) += w;
      cap(i, j) += w;
      cap(j, i) += w;
      ut(i) += dinv(e) * g(e);
      ut(j) += dinv(e) * g(e);
    }
    const VectorXd sol = cholesky_solve_factored(cholesky_factor(cap), ut);
    VectorXd d(m);
    for (Index e = 0; e < m; ++e) {
      const auto [i, j] = edges[e];
      d(e) = -dinv(e) * (g(e) - kappa * (sol(i) + sol(j)));
    }
    const double decrement = -g.dot(d);
    if (decrement <= 1e-14 * (1.0 + std::abs(f))) break;

    double t = 1.0;
    for (Index e = 0; e < m; ++e)
      if (d(e) > 0.0) t = std::min(t, -0.99 * theta(e) / d(e));
    VectorXd tn(m);
    double fn = f;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      tn = theta + t * d;
      fn = value(tn);
      if (fn <= f - 1e-4 * t * decrement) {
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) break;
    theta = tn;
    f = fn;
  }
}

}  // namespace detail

inline LaplacianProjection laplacian_projection_admm(const MatrixXd& l, double lambda_tilde, const AdmmOptions& opt = {}) {
  if (!is_graph_laplacian(l, 1e-8)) throw InvalidInput("laplacian_projection_admm: input is not a graph Laplacian");
  if (!(lambda_tilde > 0.0)) throw InvalidInput("laplacian_projection_admm: lambda_tilde must be positive");
  if (!(opt.eta > 0.0) || !(opt.barrier > 0.0) || opt.iters < 1)
    throw InvalidInput("laplacian_projection_admm: invalid options");
  const Index r = l.rows();
  if (r < 2) throw InvalidInput("laplacian_projection_admm: need at least two nodes");

  const detail::EdgeIndex edges(r);
  const Index m = edges.size();
  double offmax = 0.0;
  for (Index e = 0; e < m; ++e) offmax = std::max(offmax, -l(edges[e].first, edges[e].second));
  const double floor = -1e-3 * (offmax > 0.0 ? offmax : 1.0);
  VectorXd theta(m);
  for (Index e = 0; e < m; ++e) theta(e) = std::min(l(edges[e].first, edges[e].second), floor);

  const double eta = opt.eta, kappa = 1.0 + eta;
  MatrixXd zeta = edges.assemble(theta);
  MatrixXd zlow = zeta, w = MatrixXd::Zero(r, r);
  const double scale = std::max(1.0, l.norm());
  double rp = 0.0, rd = 0.0, prev = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int k = 0; k < opt.iters; ++k) {
    const double rho = std::max(opt.barrier * std::pow(0.5, k / opt.barrier_halving), opt.barrier_min);
    const MatrixXd c = (l + eta * (zlow - w)) / kappa;
    detail::barrier_newton(edges, c, kappa, rho, theta, opt.newton_steps);
    zeta = edges.assemble(theta);
    MatrixXd znew = sym_soft_threshold(zeta + w, lambda_tilde / eta);
    rd = eta * (znew - zlow).norm();
    zlow = std::move(znew);
    w += zeta - zlow;
    rp = (zeta - zlow).norm();
    const double res = std::max(rp, rd);
    if (!std::isfinite(res)) throw ConvergenceFailure("laplacian_projection_admm: non-finite iterate", res, k + 1);
    growth = res > prev ? growth + 1 : 0;
    if (growth >= 100) throw ConvergenceFailure("laplacian_projection_admm: residuals diverging", res, k + 1);
    prev = res;
  }

  LaplacianProjection out;
  out.z = zeta;
  out.low_rank = zlow;
  out.primal_residual = rp;
  out.dual_residual = rd;
  out.residual = std::max(rp, rd);
  out.iterations = opt.iters;
  out.dual = Eigen::Map<const VectorXd>(w.data(), w.size());
  out.objective = 0.5 * (l - zeta).squaredNorm() + lambda_tilde * nuclear_norm(zeta);
  if (out.residual > opt.tol * scale)
    throw ConvergenceFailure("laplacian_projection_admm: residual above tolerance", out.residual, opt.iters);
  return out;
}

}  // namespace bridged
