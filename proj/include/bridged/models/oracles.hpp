#pragma once

// Two profile-likelihood models whose marginal kernel in y is known in
// closed form: regression with an inverse-gamma-regularized variance (a
// multivariate t) and a Gaussian factor model (a multivariate normal).

#include <cmath>
#include <string>
#include <utility>

#include "bridged/inner/solution.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/numerics/linalg.hpp"

namespace bridged {

struct OracleKernels {
  double profile = 0.0;      // log L(y, ẑ; λ)
  double closed_form = 0.0;  // marginal log kernel in y
  VectorXd zhat;
};

/// ẑ = (v + RSS)/(v + n + 2); closed form −((n+v+2)/2) log(1 + RSS/v).
inline OracleKernels t_regression_oracle(const VectorXd& lam, const VectorXd& y, const MatrixXd& x, double v) {
  if (!(v > 0.0)) throw InvalidInput("t_regression_oracle: v must be positive");
  if (x.rows() != y.size() || x.cols() != lam.size()) throw InvalidInput("t_regression_oracle: dimension mismatch");
  const double n = static_cast<double>(y.size());
  const double rss = (y - x * lam).squaredNorm();
  const double z = (v + rss) / (v + n + 2.0);
  OracleKernels k;
  k.zhat = VectorXd::Constant(1, z);
  k.profile = -0.5 * (n + v + 2.0) * std::log(z) - 0.5 * (v + rss) / z;
  k.closed_form = -0.5 * (n + v + 2.0) * std::log1p(rss / v);
  return k;
}

/// ẑ = (CᵀC/σ² + G⁻¹)⁻¹ Cᵀy/σ²; closed form −½ yᵀ(σ²I + CGCᵀ)⁻¹y.
inline OracleKernels factor_model_oracle(const MatrixXd& g, double sigma2, const VectorXd& y, const MatrixXd& c) {
  if (!(sigma2 > 0.0)) throw InvalidInput("factor_model_oracle: sigma2 must be positive");
  if (c.rows() != y.size() || c.cols() != g.rows() || g.rows() != g.cols())
    throw InvalidInput("factor_model_oracle: dimension mismatch");
  MatrixXd gl;
  try {
    gl = cholesky_factor(0.5 * (g + g.transpose()));
  } catch (const DecompositionError&) {
    throw InvalidInput("factor_model_oracle: G is not positive definite");
  }
  const Index p = g.rows();
  const MatrixXd ginv = cholesky_solve_factored(gl, MatrixXd(MatrixXd::Identity(p, p)));
  MatrixXd prec = c.transpose() * c / sigma2 + ginv;
  const VectorXd z = cholesky_solve_factored(cholesky_factor(0.5 * (prec + prec.transpose())), VectorXd(c.transpose() * y / sigma2));
  MatrixXd sigma = c * g * c.transpose();
  sigma.diagonal().array() += sigma2;
  OracleKernels k;
  k.zhat = z;
  k.profile = -0.5 * (y - c * z).squaredNorm() / sigma2 - 0.5 * z.dot(ginv * z);
  k.closed_form = -0.5 * y.dot(cholesky_solve_factored(cholesky_factor(sigma), y));
  return k;
}

/// Example-1 regression as a bridged model; λ are coefficients with
/// independent N(0, prior_sd²) priors.
class TRegressionModel {
 public:
  using Solution = InnerSolution<VectorXd>;
  using Input = VectorXd;  // one design row

  TRegressionModel(VectorXd y, MatrixXd x, double v, double prior_sd = 10.0)
      : y_(std::move(y)), x_(std::move(x)), v_(v), prior_sd_(prior_sd) {
    if (x_.rows() != y_.size() || x_.rows() < 1) throw InvalidInput("t-regression: dimension mismatch");
    if (!(v_ > 0.0)) throw InvalidInput("t-regression: v must be positive");
  }

  const VectorXd& y() const noexcept { return y_; }
  const MatrixXd& x() const noexcept { return x_; }
  double v() const noexcept { return v_; }

  ParamSpec param_spec() const {
    ParamSpec s;
    for (Index j = 0; j < x_.cols(); ++j) {
      s.names.push_back("beta" + std::to_string(j));
      s.transforms.push_back(Transform::identity);
    }
    return s;
  }

  double log_prior(const VectorXd& lam) const {
    double s = 0.0;
    for (Index j = 0; j < lam.size(); ++j) s += stats::normal_log_pdf(lam(j), 0.0, prior_sd_);
    return s;
  }
  VectorXd log_prior_gradient(const VectorXd& lam) const { return -lam / (prior_sd_ * prior_sd_); }

  Solution solve(const VectorXd& lam, const Solution*) const {
    const double n = static_cast<double>(y_.size());
    const double rss = (y_ - x_ * lam).squaredNorm();
    Solution s;
    s.z = VectorXd::Constant(1, (v_ + rss) / (v_ + n + 2.0));
    s.objective = -log_likelihood(lam, s);
    return s;
  }

  double log_likelihood(const VectorXd& lam, const Solution& sol) const {
    const double n = static_cast<double>(y_.size());
    const double z = sol.z(0);
    return -0.5 * (n + v_ + 2.0) * std::log(z) - 0.5 * (v_ + (y_ - x_ * lam).squaredNorm()) / z;
  }

  VectorXd log_likelihood_gradient(const VectorXd& lam, const Solution& sol) const {
    return x_.transpose() * (y_ - x_ * lam) / sol.z(0);
  }

  static constexpr bool kDiscreteResponse = false;

  TRegressionModel extended(const Input& row, double y_new) const {
    VectorXd y = y_;
    MatrixXd x = x_;
    y.conservativeResize(y.size() + 1);
    y(y.size() - 1) = y_new;
    x.conservativeResize(x.rows() + 1, Eigen::NoChange);
    x.row(x.rows() - 1) = row.transpose();
    return TRegressionModel(std::move(y), std::move(x), v_, prior_sd_);
  }
  Solution extend_solution(const Solution& sol, double) const { return sol; }

  /// Center and scale for the rejection envelope of the next response.
  std::pair<double, double> predictive_guess(const VectorXd& lam, const Solution& sol, const Input& row) const {
    return {row.dot(lam), std::sqrt(sol.z(0))};
  }

 private:
  VectorXd y_;
  MatrixXd x_;
  double v_;
  double prior_sd_;
};

/// Example-2 factor model with diagonal G; λ = (σ², g_1, …, g_p), each with
/// an Inverse-Gamma(2, 1) prior.
class FactorModel {
 public:
  using Solution = InnerSolution<VectorXd>;
  using Input = VectorXd;  // one new row of C

  FactorModel(VectorXd y, MatrixXd c) : y_(std::move(y)), c_(std::move(c)) {
    if (c_.rows() != y_.size()) throw InvalidInput("factor model: dimension mismatch");
  }

  const VectorXd& y() const noexcept { return y_; }
  const MatrixXd& loadings() const noexcept { return c_; }

  ParamSpec param_spec() const {
    ParamSpec s{{"sigma2"}, {Transform::softplus}};
    for (Index k = 0; k < c_.cols(); ++k) {
      s.names.push_back("g" + std::to_string(k));
      s.transforms.push_back(Transform::softplus);
    }
    return s;
  }

  double log_prior(const VectorXd& lam) const {
    double s = 0.0;
    for (Index k = 0; k < lam.size(); ++k) s += stats::inverse_gamma_log_pdf(lam(k), 2.0, 1.0);
    return s;
  }
  VectorXd log_prior_gradient(const VectorXd& lam) const {
    return (-3.0 * lam.cwiseInverse().array() + lam.cwiseInverse().array().square()).matrix();
  }

  Solution solve(const VectorXd& lam, const Solution*) const {
    const double s2 = lam(0);
    const VectorXd g = lam.tail(c_.cols());
    MatrixXd prec = c_.transpose() * c_ / s2;
    prec.diagonal() += g.cwiseInverse();
    Solution s;
    s.z = cholesky_solve_factored(cholesky_factor(prec), VectorXd(c_.transpose() * y_ / s2));
    s.objective = -log_likelihood(lam, s);
    return s;
  }

  double log_likelihood(const VectorXd& lam, const Solution& sol) const {
    const VectorXd g = lam.tail(c_.cols());
    return -0.5 * (y_ - c_ * sol.z).squaredNorm() / lam(0) - 0.5 * sol.z.cwiseAbs2().dot(g.cwiseInverse());
  }

  VectorXd log_likelihood_gradient(const VectorXd& lam, const Solution& sol) const {
    VectorXd gr(lam.size());
    gr(0) = 0.5 * (y_ - c_ * sol.z).squaredNorm() / (lam(0) * lam(0));
    for (Index k = 0; k < c_.cols(); ++k) gr(k + 1) = 0.5 * sol.z(k) * sol.z(k) / (lam(k + 1) * lam(k + 1));
    return gr;
  }

  static constexpr bool kDiscreteResponse = false;

  FactorModel extended(const Input& row, double y_new) const {
    VectorXd y = y_;
    MatrixXd c = c_;
    y.conservativeResize(y.size() + 1);
    y(y.size() - 1) = y_new;
    c.conservativeResize(c.rows() + 1, Eigen::NoChange);
    c.row(c.rows() - 1) = row.transpose();
    return FactorModel(std::move(y), std::move(c));
  }
  Solution extend_solution(const Solution& sol, double) const { return sol; }

  std::pair<double, double> predictive_guess(const VectorXd& lam, const Solution& sol, const Input& row) const {
    const VectorXd g = lam.tail(c_.cols());
    return {row.dot(sol.z), std::sqrt(lam(0) + row.cwiseAbs2().dot(g))};
  }

 private:
  VectorXd y_;
  MatrixXd c_;
};

static_assert(EnvelopeModel<TRegressionModel>);
static_assert(EnvelopeModel<FactorModel>);

}  // namespace bridged
