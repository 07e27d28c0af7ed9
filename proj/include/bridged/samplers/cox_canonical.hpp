#pragma once

// Canonical (integrated) posterior for the piecewise-constant hazard model:
// Gamma(1, 1) priors on the interval rates, which are drawn from their
// conjugate conditionals r_j ~ Gamma(1 + d_j, 1 + S_j(λ)); λ moves by an
// adaptive random walk given the rates.

#include <cmath>

#include "bridged/models/cox.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/adaptation.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

struct CoxCanonicalOptions {
  int iters = 10000;
  int burn_in = 2000;
  double rate_shape = 1.0, rate_rate = 1.0;
  double prior_sd = 5.0;
  AdaptationConfig adapt;
  double init_lambda = 0.0;
};

inline Trace cox_canonical_sampler(const CoxDesign& design, const CoxCanonicalOptions& opt, Rng& rng) {
  detail::check_iterations(opt.iters, opt.burn_in);
  const Index k = design.intervals();
  const VectorXd& d = design.events();
  const double sx = design.covariates().sum();

  // log p(λ | r) up to a constant, with r_j S_j(λ) formed in log space.
  auto log_target = [&](double lambda, const VectorXd& log_r) {
    const VectorXd ls = design.log_weighted_exposure(lambda);
    double v = lambda * sx + stats::normal_log_pdf(lambda, 0.0, opt.prior_sd);
    for (Index j = 0; j < k; ++j)
      if (std::isfinite(ls(j))) v -= std::exp(log_r(j) + ls(j));
    return v;
  };

  double lambda = opt.init_lambda;
  VectorXd log_r(k);
  AdaptationConfig adapt = opt.adapt;
  if (!adapt.initial_step.size()) adapt.initial_step = VectorXd::Constant(1, 0.1);
  StepAdapter adapter(1, adapt, adapt.window(opt.iters, opt.burn_in));

  Trace tr;
  tr.names = {"lambda"};
  for (Index j = 0; j < k; ++j) tr.aux_names.push_back("r" + std::to_string(j));
  tr.adaptation_window = adapter.window();
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, 1);
  tr.aux.resize(kept, k);
  long post_accepts = 0, post_total = 0;
  detail::BlockTimer timer(tr);

  for (int t = 0; t < opt.iters; ++t) {
    const VectorXd s = design.weighted_exposure(lambda);
    for (Index j = 0; j < k; ++j) log_r(j) = std::log(gamma_draw(opt.rate_shape + d(j), opt.rate_rate + s(j), rng));

    const double cur = log_target(lambda, log_r);
    const double prop = lambda + adapter.step()(0) * (2.0 * uniform01(rng) - 1.0);
    const double u = uniform_open01(rng);
    const double diff = log_target(prop, log_r) - cur;
    const double a = diff >= 0.0 ? 1.0 : std::exp(diff);
    const bool accept = std::log(u) < diff;
    if (accept) lambda = prop;
    adapter.update(t, a, VectorXd::Constant(1, lambda));
    if (!adapter.adapting(t)) {
      ++post_total;
      post_accepts += accept;
    }
    if (t >= opt.burn_in) {
      tr.samples(t - opt.burn_in, 0) = lambda;
      tr.aux.row(t - opt.burn_in) = log_r.array().exp().matrix().transpose();
      tr.accepted.push_back(accept);
      tr.inner_iterations.push_back(0);
    }
    timer.tick(t);
  }
  timer.finish();
  tr.acceptance = post_total ? static_cast<double>(post_accepts) / static_cast<double>(post_total) : 0.0;
  tr.step = adapter.step();
  return tr;
}

}  // namespace bridged
