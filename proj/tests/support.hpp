#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bridged/random.hpp"

namespace bridged::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = std_normal(rng);
  return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng) { return random_matrix(n, 1, rng).col(0); }

inline Eigen::MatrixXd random_spd(Eigen::Index n, Rng& rng, double ridge = 0.1) {
  const Eigen::MatrixXd a = random_matrix(n, n, rng);
  Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(n);
  s.diagonal().array() += ridge;
  return s;
}

inline Eigen::MatrixXd random_psd_rank(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  const Eigen::MatrixXd a = random_matrix(n, rank, rng);
  return a * a.transpose();
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace bridged::testing

namespace bridged::testing {

/// Monte Carlo standard error of the mean by non-overlapping batch means.
inline double batch_mean_se(const Eigen::VectorXd& x, int batches = 40) {
  const Eigen::Index m = x.size() / batches;
  Eigen::VectorXd b(batches);
  for (int k = 0; k < batches; ++k) b(k) = x.segment(k * m, m).mean();
  const double mu = b.mean();
  return std::sqrt((b.array() - mu).square().sum() / (batches - 1) / batches);
}

}  // namespace bridged::testing
