#pragma once

#include <cmath>

#include "bridged/error.hpp"
#include "bridged/numerics/linalg.hpp"

namespace bridged {

/// n points in d-dimensional space, one per row.
using Locations = MatrixXd;

struct CovKernelParams {
  double tau = 1.0;  // scale
  double b = 1.0;    // bandwidth

  void validate() const {
    if (!(tau > 0.0) || !(b > 0.0) || !std::isfinite(tau) || !std::isfinite(b))
      throw InvalidInput("kernel parameters must be finite and positive");
  }
};

/// Pairwise squared Euclidean distances between rows of `x`.
inline MatrixXd squared_distances(const Locations& x) {
  if (!x.allFinite()) throw InvalidInput("locations must be finite");
  const Index n = x.rows();
  MatrixXd d2(n, n);
  for (Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Index i = 0; i < j; ++i) {
      const double v = (x.row(i) - x.row(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

/// Q_ij = tau * exp(-d2_ij / (2 b)) from precomputed squared distances.
inline SymMatrix squared_exp_kernel_from_sqdist(const MatrixXd& d2, const CovKernelParams& p) {
  p.validate();
  const Index n = d2.rows();
  SymMatrix q(n);
  const double inv = -0.5 / p.b;
  for (Index j = 0; j < n; ++j) {
    q.set(j, j, p.tau);
    for (Index i = 0; i < j; ++i) q.set(i, j, p.tau * std::exp(inv * d2(i, j)));
  }
  return q;
}

inline SymMatrix squared_exp_kernel(const Locations& x, const CovKernelParams& p) {
  if (x.rows() < 1) throw InvalidInput("squared_exp_kernel: need at least one location");
  return squared_exp_kernel_from_sqdist(squared_distances(x), p);
}

}  // namespace bridged
