#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "bridged/error.hpp"

namespace bridged {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense symmetric matrix. Every write goes to both triangles, so
/// `(i, j) == (j, i)` holds bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : m_(MatrixXd::Zero(n, n)) {}

  /// Takes the upper triangle of `a` and mirrors it.
  static SymMatrix from_upper(const MatrixXd& a) {
    if (a.rows() != a.cols()) throw InvalidInput("SymMatrix: matrix is not square");
    SymMatrix s;
    s.m_ = a.triangularView<Eigen::Upper>();
    s.m_.triangularView<Eigen::StrictlyLower>() = s.m_.transpose().triangularView<Eigen::StrictlyLower>();
    return s;
  }

  /// Averages `a` with its transpose.
  static SymMatrix symmetrized(const MatrixXd& a) {
    if (a.rows() != a.cols()) throw InvalidInput("SymMatrix: matrix is not square");
    return from_upper(0.5 * (a + a.transpose()));
  }

  static SymMatrix identity(Index n) {
    SymMatrix s;
    s.m_ = MatrixXd::Identity(n, n);
    return s;
  }

  Index size() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const MatrixXd& matrix() const noexcept { return m_; }

 private:
  MatrixXd m_;
};

/// Lower Cholesky factor. Throws DecompositionError with the failing pivot.
inline MatrixXd cholesky_factor(const MatrixXd& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw InvalidInput("cholesky_factor: matrix is not square");
  MatrixXd l = MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) throw DecompositionError("matrix is not positive definite", j);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    if (j + 1 < n) {
      l.col(j).tail(n - j - 1) =
          (a.col(j).tail(n - j - 1) - l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose()) / ljj;
    }
  }
  return l;
}

/// Solves A x = rhs given the lower factor of A.
inline VectorXd cholesky_solve_factored(const MatrixXd& l, const VectorXd& rhs) {
  VectorXd y = l.triangularView<Eigen::Lower>().solve(rhs);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

inline MatrixXd cholesky_solve_factored(const MatrixXd& l, const MatrixXd& rhs) {
  MatrixXd y = l.triangularView<Eigen::Lower>().solve(rhs);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

inline VectorXd cholesky_solve(const SymMatrix& a, const VectorXd& rhs) {
  if (rhs.size() != a.size()) throw InvalidInput("cholesky_solve: dimension mismatch");
  return cholesky_solve_factored(cholesky_factor(a.matrix()), rhs);
}

inline double log_det_from_factor(const MatrixXd& l) { return 2.0 * l.diagonal().array().log().sum(); }

/// A ≈ F Fᵀ from diagonal-pivoted Cholesky. Pivots are taken greedily on
/// the largest remaining diagonal, lowest index on ties, and the
/// factorization stops once every remaining diagonal is ≤ tol. Only the
/// diagonal and the pivot columns of A are touched: `column(j)` returns A e_j.
template <class ColumnFn>
MatrixXd pivoted_cholesky_lazy(const VectorXd& diag, ColumnFn&& column, double tol, Index max_rank = -1) {
  const Index n = diag.size();
  if (max_rank < 0 || max_rank > n) max_rank = n;
  VectorXd d = diag;
  MatrixXd f(n, max_rank);
  Eigen::Array<bool, Eigen::Dynamic, 1> used = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
  Index rank = 0;
  while (rank < max_rank) {
    Index piv = -1;
    double best = tol;
    for (Index i = 0; i < n; ++i) {
      if (!used(i) && d(i) > best) {
        best = d(i);
        piv = i;
      }
    }
    if (piv < 0) break;
    used(piv) = true;
    const double s = std::sqrt(d(piv));
    VectorXd col = column(piv);
    if (rank > 0) col.noalias() -= f.leftCols(rank) * f.row(piv).head(rank).transpose();
    col /= s;
    // Rows pivoted earlier are fully represented already.
    for (Index i = 0; i < n; ++i) {
      if (used(i)) col(i) = (i == piv) ? s : 0.0;
    }
    f.col(rank) = col;
    d -= col.cwiseAbs2();
    d(piv) = 0.0;
    ++rank;
  }
  return f.leftCols(rank);
}

inline MatrixXd pivoted_cholesky(const MatrixXd& a, double tol, Index max_rank = -1) {
  return pivoted_cholesky_lazy(VectorXd(a.diagonal()), [&](Index j) { return VectorXd(a.col(j)); }, tol, max_rank);
}

/// Operator D + U Uᵀ with D diagonal positive, solved through the Woodbury
/// identity in O(n r²).
class DiagPlusLowRank {
 public:
  DiagPlusLowRank(VectorXd diag, MatrixXd u) : d_(std::move(diag)), u_(std::move(u)) {
    if (d_.size() != u_.rows()) throw InvalidInput("DiagPlusLowRank: dimension mismatch");
    if ((d_.array() <= 0.0).any()) throw InvalidInput("DiagPlusLowRank: diagonal must be positive");
    dinv_ = d_.cwiseInverse();
    const Index r = u_.cols();
    dinv_u_ = dinv_.asDiagonal() * u_;
    MatrixXd cap = MatrixXd::Identity(r, r);
    if (r > 0) cap.noalias() += u_.transpose() * dinv_u_;
    cap_l_ = cholesky_factor(cap);
  }

  Index size() const noexcept { return d_.size(); }

  VectorXd solve(const VectorXd& v) const {
    VectorXd out = dinv_.cwiseProduct(v);
    if (u_.cols() > 0) out.noalias() -= dinv_u_ * cholesky_solve_factored(cap_l_, VectorXd(dinv_u_.transpose() * v));
    return out;
  }

  VectorXd apply(const VectorXd& v) const {
    VectorXd out = d_.cwiseProduct(v);
    if (u_.cols() > 0) out.noalias() += u_ * (u_.transpose() * v);
    return out;
  }

  /// log det(D + U Uᵀ) = log det D + log det(I + Uᵀ D⁻¹ U).
  double log_det() const { return d_.array().log().sum() + (u_.cols() > 0 ? log_det_from_factor(cap_l_) : 0.0); }

 private:
  VectorXd d_;
  MatrixXd u_;
  VectorXd dinv_;
  MatrixXd dinv_u_;
  MatrixXd cap_l_;
};

}  // namespace bridged
