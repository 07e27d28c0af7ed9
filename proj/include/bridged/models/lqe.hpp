#pragma once

// Latent quadratic exponential model: binary y, latent z pinned to the
// minimizer of ½ζᵀQ⁻¹ζ + Σ[log(1+e^{ζ_i}) − y_i ζ_i] with a squared-exponential
// Q(τ, b). Priors τ ~ N₊(0, 1), b ~ Inverse-Gamma(2, 5).

#include <array>
#include <cmath>

#include "bridged/inner/lqe_dual.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/numerics/kernels.hpp"

namespace bridged {

struct LqeData {
  Locations x;
  VectorXd y;

  void validate() const {
    if (x.rows() < 1 || x.rows() != y.size()) throw InvalidInput("lqe data: locations and labels differ in length");
    if (!x.allFinite()) throw InvalidInput("lqe data: non-finite locations");
    detail::check_binary(y);
  }
};

struct LqePriors {
  double tau_sd = 1.0;
  double b_shape = 2.0;
  double b_scale = 5.0;
};

/// Shared prior for the bridged model and the latent-normal baseline.
inline double lqe_log_prior(const VectorXd& lam, const LqePriors& p) {
  return stats::half_normal_log_pdf(lam(0), p.tau_sd) + stats::inverse_gamma_log_pdf(lam(1), p.b_shape, p.b_scale);
}

inline VectorXd lqe_log_prior_gradient(const VectorXd& lam, const LqePriors& p) {
  VectorXd g(2);
  g(0) = -lam(0) / (p.tau_sd * p.tau_sd);
  g(1) = -(p.b_shape + 1.0) / lam(1) + p.b_scale / (lam(1) * lam(1));
  return g;
}

class LqeModel {
 public:
  using Solution = LqeSolution;
  using Input = VectorXd;  // one location

  explicit LqeModel(LqeData data, LqePriors priors = {}, LqeOptions opt = {})
      : data_(std::move(data)), priors_(priors), opt_(opt) {
    data_.validate();
    d2_ = squared_distances(data_.x);
  }

  const LqeData& data() const noexcept { return data_; }
  const LqeOptions& options() const noexcept { return opt_; }

  ParamSpec param_spec() const { return {{"tau", "b"}, {Transform::softplus, Transform::softplus}}; }

  double log_prior(const VectorXd& lam) const { return lqe_log_prior(lam, priors_); }
  VectorXd log_prior_gradient(const VectorXd& lam) const { return lqe_log_prior_gradient(lam, priors_); }

  SymMatrix covariance(const VectorXd& lam) const {
    return squared_exp_kernel_from_sqdist(d2_, {lam(0), lam(1)});
  }

  Solution solve(const VectorXd& lam, const Solution* warm) const {
    const VectorXd* w = warm ? &warm->dual : nullptr;
    const Index n = data_.y.size();
    if (opt_.factor_kernel && n > 64) {
      // Kernel columns on demand; only a numerically low-rank Q is used this way.
      const double tau = lam(0), inv = -0.5 / lam(1);
      const MatrixXd f = pivoted_cholesky_lazy(
          VectorXd::Constant(n, tau), [&](Index j) { return VectorXd(tau * (inv * d2_.col(j).array()).exp()); },
          opt_.rank_tol * tau, n / 3);
      if (f.cols() < n / 3) return dual_ascent_lqe_factored(data_.y, f, opt_, w);
    }
    return dual_ascent_lqe(data_.y, covariance(lam), opt_, w);
  }

  /// −g(ẑ) = −½ α̂ᵀQα̂ − Σ [log(1+e^{ẑ_i}) − y_i ẑ_i].
  double log_likelihood(const VectorXd&, const Solution& sol) const { return -sol.objective; }

  /// ½ α̂ᵀ(∂Q/∂λ)α̂ for λ = (τ, b).
  VectorXd log_likelihood_gradient(const VectorXd& lam, const Solution& sol) const {
    const double tau = lam(0), b = lam(1);
    const VectorXd& a = sol.dual;
    const Index n = a.size();
    double gb = 0.0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i) {
        const double d2 = d2_(i, j);
        gb += a(i) * a(j) * std::exp(-0.5 * d2 / b) * d2;
      }
    VectorXd g(2);
    g(0) = 0.5 * sol.quad_form / tau;
    g(1) = tau * gb / (2.0 * b * b);  // the ½ cancels against summing i < j only
    return g;
  }

  // Predictive support: binary responses, one new location at a time.
  static constexpr bool kDiscreteResponse = true;
  static std::array<double, 2> response_support() { return {0.0, 1.0}; }

  LqeModel extended(const Input& x_new, double y_new) const {
    LqeData d = data_;
    d.x.conservativeResize(d.x.rows() + 1, Eigen::NoChange);
    d.x.row(d.x.rows() - 1) = x_new.transpose();
    d.y.conservativeResize(d.y.size() + 1);
    d.y(d.y.size() - 1) = y_new;
    return LqeModel(std::move(d), priors_, opt_);
  }

  /// Warm start for the extended problem: previous α̂ with p = ½ for the new point.
  Solution extend_solution(const Solution& sol, double y_new) const {
    Solution w = sol;
    w.dual.conservativeResize(sol.dual.size() + 1);
    w.dual(w.dual.size() - 1) = 0.5 - y_new;
    return w;
  }

 private:
  LqeData data_;
  LqePriors priors_;
  LqeOptions opt_;
  MatrixXd d2_;
};

static_assert(EnvelopeModel<LqeModel>);

}  // namespace bridged
