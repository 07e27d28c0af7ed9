#pragma once

// Proportional hazards with a piecewise-constant baseline hazard profiled out;
// λ is the log hazard ratio with a N(0, 5²) prior.

#include "bridged/inner/cox_hazard.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/stats.hpp"

namespace bridged {

class CoxModel {
 public:
  using Solution = CoxProfile;

  explicit CoxModel(CoxDesign design, double prior_sd = 5.0) : design_(std::move(design)), prior_sd_(prior_sd) {}

  const CoxDesign& design() const noexcept { return design_; }
  double prior_sd() const noexcept { return prior_sd_; }

  ParamSpec param_spec() const { return {{"lambda"}, {Transform::identity}}; }

  double log_prior(const VectorXd& lam) const { return stats::normal_log_pdf(lam(0), 0.0, prior_sd_); }
  VectorXd log_prior_gradient(const VectorXd& lam) const {
    return VectorXd::Constant(1, -lam(0) / (prior_sd_ * prior_sd_));
  }

  Solution solve(const VectorXd& lam, const Solution*) const { return cox_profile_hazard(design_, lam(0)); }

  double log_likelihood(const VectorXd&, const Solution& sol) const { return sol.objective; }

  /// Σ x_i − Σ_j r̂_j Σ_i x_i e^{λx_i} E_ij at fixed r̂. Each interval's term is
  /// d_j times an exposure-weighted mean of x, which avoids forming r̂ when it
  /// over- or underflows; both forms agree when r̂ is the profile maximizer.
  VectorXd log_likelihood_gradient(const VectorXd& lam, const Solution&) const {
    const VectorXd& x = design_.covariates();
    const double m = (lam(0) * x).maxCoeff();
    const VectorXd w = (lam(0) * x.array() - m).exp().matrix();
    const VectorXd s = design_.exposure().transpose() * w;
    const VectorXd sx = design_.exposure().transpose() * x.cwiseProduct(w);
    double g = x.sum();
    for (Index j = 0; j < s.size(); ++j)
      if (s(j) > 0.0) g -= design_.events()(j) * sx(j) / s(j);
    return VectorXd::Constant(1, g);
  }

 private:
  CoxDesign design_;
  double prior_sd_;
};

static_assert(EnvelopeModel<CoxModel>);

}  // namespace bridged
