#pragma once

// Gibbs posterior with hinge loss, the comparison model for the max-margin
// classifier. The hyperplane (w, b) is sampled directly:
//   exp{−½λ‖w‖² − Σ_labeled hinge_i} N(w; 0, σ²I) N(b; 0, σ²) Gamma(λ; 3, 2),
// by adaptive random-walk Metropolis in (w, b, softplus⁻¹ λ). Each kept
// iteration also predicts every unlabeled point from p(y | w, b) ∝ e^{−hinge}.

#include <cmath>
#include <string>
#include <vector>

#include "bridged/models/bmmc.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/adaptation.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

struct GibbsHingeOptions {
  int iters = 1500;
  int burn_in = 500;
  double coef_sd = 3.0;
  BmmcPriors lambda_prior;
  AdaptationConfig adapt;
};

inline double hinge(double y, double f) { return std::max(0.0, 1.0 - y * f); }

inline Trace gibbs_hinge_sampler(const BmmcData& data, const GibbsHingeOptions& opt, Rng& rng) {
  data.validate();
  detail::check_iterations(opt.iters, opt.burn_in);
  const Index p = data.x.cols(), total = data.y.size();
  std::vector<Index> unl = data.unlabeled;
  std::sort(unl.begin(), unl.end());
  std::vector<Index> lab;
  for (Index i = 0, u = 0; i < total; ++i) {
    if (u < static_cast<Index>(unl.size()) && unl[static_cast<std::size_t>(u)] == i) {
      ++u;
      continue;
    }
    lab.push_back(i);
  }
  const Index d = p + 2;

  auto log_target = [&](const VectorXd& r) {
    const double lambda = softplus(r(d - 1));
    if (!(lambda > 0.0)) return stats::kNegInf;
    const auto w = r.head(p);
    const double b = r(p);
    double v = -0.5 * lambda * w.squaredNorm();
    for (Index i : lab) v -= hinge(data.y(i), data.x.row(i).dot(w) + b);
    for (Index j = 0; j <= p; ++j) v += stats::normal_log_pdf(r(j), 0.0, opt.coef_sd);
    return v + stats::gamma_log_pdf(lambda, opt.lambda_prior.shape, opt.lambda_prior.rate) + stats::log_sigmoid(r(d - 1));
  };

  VectorXd raw = VectorXd::Zero(d);
  raw(d - 1) = softplus_inverse(1.0);
  double cur = log_target(raw);
  AdaptationConfig adapt = opt.adapt;
  if (!adapt.initial_step.size()) adapt.initial_step = VectorXd::Constant(d, 0.1);
  StepAdapter adapter(d, adapt, adapt.window(opt.iters, opt.burn_in));

  Trace tr;
  for (Index j = 0; j < p; ++j) tr.names.push_back("w" + std::to_string(j));
  tr.names.push_back("b");
  tr.names.push_back("lambda");
  for (Index i : unl) tr.aux_names.push_back("y" + std::to_string(i));
  tr.adaptation_window = adapter.window();
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, d);
  tr.aux.resize(kept, static_cast<Index>(unl.size()));
  long post_accepts = 0, post_total = 0;
  detail::BlockTimer timer(tr);

  for (int t = 0; t < opt.iters; ++t) {
    VectorXd r = raw;
    for (Index j = 0; j < d; ++j) r(j) += adapter.step()(j) * (2.0 * uniform01(rng) - 1.0);
    const double u = uniform_open01(rng);
    const double pt = log_target(r);
    const double diff = pt - cur;
    const double a = diff >= 0.0 ? 1.0 : std::exp(diff);
    const bool accept = std::log(u) < diff;
    if (accept) {
      raw = r;
      cur = pt;
    }
    adapter.update(t, a, raw);
    if (!adapter.adapting(t)) {
      ++post_total;
      post_accepts += accept;
    }
    if (t >= opt.burn_in) {
      const int row = t - opt.burn_in;
      tr.samples.row(row) = raw.transpose();
      tr.samples(row, d - 1) = softplus(raw(d - 1));
      for (std::size_t j = 0; j < unl.size(); ++j) {
        const double f = data.x.row(unl[j]).dot(raw.head(p)) + raw(p);
        // P(y = +1) = e^{−h₊} / (e^{−h₊} + e^{−h₋})
        const double p_plus = stats::sigmoid(hinge(-1.0, f) - hinge(1.0, f));
        tr.aux(row, static_cast<Index>(j)) = uniform01(rng) < p_plus ? 1.0 : -1.0;
      }
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
