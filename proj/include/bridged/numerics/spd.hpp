#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "bridged/numerics/linalg.hpp"

namespace bridged {

/// Regularization added to both arguments of the geodesic distance.
inline constexpr double kDefaultGeodesicEta = 1e-6;

/// Cholesky factor of X + ηI, reusable across many distance evaluations.
class ShiftedFactor {
 public:
  ShiftedFactor(const MatrixXd& x, double eta) : eta_(eta) {
    if (!(eta > 0.0)) throw InvalidInput("geodesic_distance: eta must be positive");
    if (x.rows() != x.cols()) throw InvalidInput("geodesic_distance: matrix is not square");
    shifted_ = x;
    shifted_.diagonal().array() += eta;
    l_ = cholesky_factor(shifted_);
  }

  Index size() const noexcept { return l_.rows(); }
  double eta() const noexcept { return eta_; }
  const MatrixXd& factor() const noexcept { return l_; }
  const MatrixXd& shifted() const noexcept { return shifted_; }

 private:
  double eta_;
  MatrixXd shifted_;
  MatrixXd l_;
};

/// Affine-invariant distance between (X+ηI) and (Y+ηI): the generalized
/// eigenvalues come from the symmetric reduction L⁻¹ (Y+ηI) L⁻ᵀ with
/// X+ηI = L Lᵀ, so no explicit inverse is formed.
inline double geodesic_distance(const ShiftedFactor& x, const ShiftedFactor& y) {
  if (x.size() != y.size()) throw InvalidInput("geodesic_distance: size mismatch");
  const auto& l = x.factor();
  const MatrixXd half = l.triangularView<Eigen::Lower>().solve(y.shifted());
  MatrixXd c = l.triangularView<Eigen::Lower>().solve(half.transpose());
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(c, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index j = 0; j < es.eigenvalues().size(); ++j) {
    const double lg = std::log(es.eigenvalues()(j));
    s += lg * lg;
  }
  return std::sqrt(s);
}

inline double geodesic_distance(const MatrixXd& x, const MatrixXd& y, double eta = kDefaultGeodesicEta) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw InvalidInput("geodesic_distance: size mismatch");
  return geodesic_distance(ShiftedFactor(x, eta), ShiftedFactor(y, eta));
}

/// Singular-value soft thresholding: Σ (σ_i − t)_+ u_i v_iᵀ.
inline MatrixXd svd_soft_threshold(const MatrixXd& x, double t) {
  if (!(t >= 0.0)) throw InvalidInput("svd_soft_threshold: threshold must be nonnegative");
  if (!x.allFinite()) throw InvalidInput("svd_soft_threshold: non-finite input");
  Eigen::JacobiSVD<MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd s = (svd.singularValues().array() - t).max(0.0).matrix();
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

/// Same operator for a symmetric argument, through its eigendecomposition:
/// singular values are |eigenvalues|, and the sign is kept.
inline MatrixXd sym_soft_threshold(const MatrixXd& x, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (x + x.transpose()));
  VectorXd e = es.eigenvalues();
  for (Index i = 0; i < e.size(); ++i) {
    const double a = std::abs(e(i)) - t;
    e(i) = a > 0.0 ? std::copysign(a, e(i)) : 0.0;
  }
  MatrixXd out = es.eigenvectors() * e.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

inline double nuclear_norm(const MatrixXd& x) {
  Eigen::JacobiSVD<MatrixXd> svd(x);
  return svd.singularValues().sum();
}

}  // namespace bridged
