#pragma once

// Pólya-Gamma data-augmentation Gibbs sampler for the logistic latent normal
// model y_i ~ Bernoulli(σ(ζ_i)), ζ ~ N(0, τ(K_b + δI)). K_b is replaced by a
// pivoted-Cholesky factor L Lᵀ so every step costs O(n r²):
//   (i)   η_i | ζ ~ PG(1, ζ_i);
//   (ii)  ζ | η, τ, b ~ N((Q̃⁻¹ + diag η)⁻¹κ, (Q̃⁻¹ + diag η)⁻¹), κ = y − ½,
//         drawn by conditioning a prior draw (Matheron's rule);
//   (iii) (τ, b) | ζ by one adaptive random-walk step in softplus coordinates.

#include <cmath>
#include <memory>
#include <string>

#include "bridged/models/lqe.hpp"
#include "bridged/numerics/polya_gamma.hpp"
#include "bridged/samplers/adaptation.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

struct LatentNormalOptions {
  int iters = 10000;
  int burn_in = 2000;
  double nugget = 1e-2;     // δ, relative to τ
  double rank_tol = 1e-8;   // pivoted-Cholesky cutoff on K_b (unit diagonal)
  Index max_rank = -1;      // −1: n
  AdaptationConfig adapt;
  VectorXd init;            // (τ, b); empty → (1, 5)
  bool record_latent = false;
};

/// Low-rank-plus-nugget prior covariance τ(LLᵀ + δI) for fixed (τ, b).
class LatentCovariance {
 public:
  LatentCovariance(const MatrixXd& d2, double tau, double b, double nugget, double rank_tol, Index max_rank)
      : tau_(tau), nugget_(nugget) {
    if (!(tau > 0.0) || !(b > 0.0) || !(nugget > 0.0)) throw InvalidInput("latent covariance: parameters must be positive");
    const double inv = -0.5 / b;
    const Index n = d2.rows();
    l_ = pivoted_cholesky_lazy(
        VectorXd::Ones(n), [&](Index j) { return VectorXd((inv * d2.col(j).array()).exp()); }, rank_tol, max_rank);
    prior_ = std::make_unique<DiagPlusLowRank>(VectorXd::Constant(n, tau * nugget), std::sqrt(tau) * l_);
  }

  Index size() const noexcept { return l_.rows(); }
  Index rank() const noexcept { return l_.cols(); }
  const MatrixXd& factor() const noexcept { return l_; }
  double tau() const noexcept { return tau_; }
  double nugget() const noexcept { return nugget_; }

  /// log N(ζ; 0, τ(LLᵀ + δI)) up to −(n/2) log 2π.
  double log_density(const VectorXd& zeta) const {
    return -0.5 * prior_->log_det() - 0.5 * zeta.dot(prior_->solve(zeta));
  }

  VectorXd apply(const VectorXd& v) const { return prior_->apply(v); }

  VectorXd draw(Rng& rng) const {
    VectorXd e(l_.cols()), f(l_.rows());
    for (Index k = 0; k < e.size(); ++k) e(k) = std_normal(rng);
    for (Index i = 0; i < f.size(); ++i) f(i) = std_normal(rng);
    return std::sqrt(tau_) * (l_ * e) + std::sqrt(tau_ * nugget_) * f;
  }

 private:
  double tau_, nugget_;
  MatrixXd l_;
  std::unique_ptr<DiagPlusLowRank> prior_;
};

/// Mean of ζ | η: Q̃(Q̃ + H⁻¹)⁻¹ H⁻¹κ with H = diag η.
inline VectorXd latent_conditional_mean(const LatentCovariance& q, const VectorXd& eta, const VectorXd& kappa) {
  const VectorXd hinv = eta.cwiseInverse();
  DiagPlusLowRank a(hinv.array() + q.tau() * q.nugget(), std::sqrt(q.tau()) * q.factor());
  return q.apply(a.solve(hinv.cwiseProduct(kappa)));
}

/// One exact draw of ζ | η by conditioning a prior draw on pseudo-data
/// u = H⁻¹κ observed with noise N(0, H⁻¹).
inline VectorXd latent_conditional_draw(const LatentCovariance& q, const VectorXd& eta, const VectorXd& kappa,
                                        Rng& rng) {
  const Index n = eta.size();
  const VectorXd hinv = eta.cwiseInverse();
  const VectorXd f = q.draw(rng);
  VectorXd e(n);
  for (Index i = 0; i < n; ++i) e(i) = std::sqrt(hinv(i)) * std_normal(rng);
  DiagPlusLowRank a(hinv.array() + q.tau() * q.nugget(), std::sqrt(q.tau()) * q.factor());
  return f + q.apply(a.solve(hinv.cwiseProduct(kappa) - f - e));
}

inline Trace gibbs_latent_normal(const LqeData& data, const LqePriors& priors, const LatentNormalOptions& opt,
                                 Rng& rng) {
  data.validate();
  detail::check_iterations(opt.iters, opt.burn_in);
  const Index n = data.y.size();
  const MatrixXd d2 = squared_distances(data.x);
  const VectorXd kappa = data.y.array() - 0.5;
  const ParamSpec spec{{"tau", "b"}, {Transform::softplus, Transform::softplus}};

  VectorXd lam = opt.init.size() ? opt.init : (VectorXd(2) << 1.0, 5.0).finished();
  auto make_cov = [&](const VectorXd& l) {
    return std::make_unique<LatentCovariance>(d2, l(0), l(1), opt.nugget, opt.rank_tol, opt.max_rank);
  };
  auto cov = make_cov(lam);
  VectorXd raw = spec.to_raw(lam);
  VectorXd zeta = VectorXd::Zero(n);
  auto log_target = [&](const LatentCovariance& c, const VectorXd& r, const VectorXd& l) {
    return c.log_density(zeta) + lqe_log_prior(l, priors) + spec.log_jacobian(r);
  };

  StepAdapter adapter(2, opt.adapt, opt.adapt.window(opt.iters, opt.burn_in));
  Trace tr;
  tr.names = spec.names;
  tr.adaptation_window = adapter.window();
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, 2);
  if (opt.record_latent) {
    for (Index i = 0; i < n; ++i) tr.aux_names.push_back("zeta" + std::to_string(i));
    tr.aux.resize(kept, n);
  }
  long post_accepts = 0, post_total = 0;
  detail::BlockTimer timer(tr);
  VectorXd eta(n);

  for (int t = 0; t < opt.iters; ++t) {
    for (Index i = 0; i < n; ++i) eta(i) = polya_gamma_sample(zeta(i), rng);
    zeta = latent_conditional_draw(*cov, eta, kappa, rng);

    const double cur = log_target(*cov, raw, lam);
    const VectorXd& s = adapter.step();
    VectorXd r = raw;
    for (Index j = 0; j < 2; ++j) r(j) += s(j) * (2.0 * uniform01(rng) - 1.0);
    const double u = uniform_open01(rng);
    const VectorXd l = spec.to_native(r);
    bool accept = false;
    double a = 0.0;
    if (l(0) > 0.0 && l(1) > 0.0) {
      auto prop = make_cov(l);
      const double diff = log_target(*prop, r, l) - cur;
      a = diff >= 0.0 ? 1.0 : std::exp(diff);
      if (std::log(u) < diff) {
        accept = true;
        raw = r;
        lam = l;
        cov = std::move(prop);
      }
    }
    adapter.update(t, a, raw);
    if (!adapter.adapting(t)) {
      ++post_total;
      post_accepts += accept;
    }
    if (t >= opt.burn_in) {
      tr.samples.row(t - opt.burn_in) = lam.transpose();
      tr.accepted.push_back(accept);
      tr.inner_iterations.push_back(static_cast<int>(cov->rank()));
      if (opt.record_latent) tr.aux.row(t - opt.burn_in) = zeta.transpose();
    }
    timer.tick(t);
  }
  timer.finish();
  tr.acceptance = post_total ? static_cast<double>(post_accepts) / static_cast<double>(post_total) : 0.0;
  tr.step = adapter.step();
  return tr;
}

}  // namespace bridged
