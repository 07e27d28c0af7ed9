#pragma once

// Sampler for the maximum-margin classifier: each iteration makes one
// random-walk move on λ with the labels fixed, then a systematic 2-way Gibbs
// sweep over the imputed labels. Every kernel evaluation is an SVM solve
// warm-started from the current dual.

#include <cmath>
#include <string>
#include <vector>

#include "bridged/models/bmmc.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/adaptation.hpp"
#include "bridged/samplers/discrete_gibbs.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

struct BmmcSamplerOptions {
  int iters = 1500;
  int burn_in = 500;
  AdaptationConfig adapt;
  double init_lambda = 1.0;
  VectorXd init_labels;  // ±1 per unlabeled point; empty → SVM fitted to the labeled points
};

/// Labels for the unlabeled points from an SVM fitted to the labeled ones.
inline VectorXd bmmc_initial_labels(const BmmcModel& model, double lambda) {
  const auto& d = model.data();
  const Index k = model.unlabeled_count();
  const Index n = d.y.size() - k;
  VectorXd out = VectorXd::Ones(k);
  if (n < 2) return out;
  MatrixXd x(n, d.x.cols());
  VectorXd y(n);
  for (Index i = 0, r = 0, u = 0; i < d.y.size(); ++i) {
    if (u < k && d.unlabeled[static_cast<std::size_t>(u)] == i) {
      ++u;
      continue;
    }
    x.row(r) = d.x.row(i);
    y(r++) = d.y(i);
  }
  if ((y.array() > 0).all() || (y.array() < 0).all()) return out * y(0);
  const SvmSolution s = svm_dual_solve(x, y, lambda);
  for (Index j = 0; j < k; ++j) {
    const double f = d.x.row(d.unlabeled[static_cast<std::size_t>(j)]).dot(s.w) + s.b;
    out(j) = f >= 0.0 ? 1.0 : -1.0;
  }
  return out;
}

inline Trace bmmc_sampler(const BmmcModel& model, const BmmcSamplerOptions& opt, Rng& rng) {
  detail::check_iterations(opt.iters, opt.burn_in);
  const Index k = model.unlabeled_count();
  const ParamSpec spec = model.param_spec();
  VectorXd imputed = opt.init_labels.size() ? opt.init_labels : bmmc_initial_labels(model, opt.init_lambda);
  VectorXd labels = model.full_labels(imputed);
  for (Index j = 0; j < k; ++j)
    if (imputed(j) != 1.0 && imputed(j) != -1.0) throw InvalidInput("bmmc sampler: initial labels must be ±1");

  double lambda = opt.init_lambda;
  double raw = softplus_inverse(lambda);
  SvmSolution sol = model.solve(lambda, labels, nullptr);
  auto target = [&](double r, double l, const SvmSolution& s) { return -s.objective + model.log_prior(l) + stats::log_sigmoid(r); };
  double cur = target(raw, lambda, sol);

  AdaptationConfig adapt = opt.adapt;
  if (!adapt.initial_step.size()) adapt.initial_step = VectorXd::Constant(1, 0.5);
  StepAdapter adapter(1, adapt, adapt.window(opt.iters, opt.burn_in));
  Trace tr;
  tr.names = spec.names;
  tr.adaptation_window = adapter.window();
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, 1);
  for (Index j = 0; j < k; ++j) tr.aux_names.push_back("y" + std::to_string(model.data().unlabeled[static_cast<std::size_t>(j)]));
  tr.aux.resize(kept, k);
  long post_accepts = 0, post_total = 0;
  detail::BlockTimer timer(tr);

  for (int t = 0; t < opt.iters; ++t) {
    // λ | labels
    const double r = raw + adapter.step()(0) * (2.0 * uniform01(rng) - 1.0);
    const double u = uniform_open01(rng);
    const double l = softplus(r);
    bool accept = false;
    double a = 0.0;
    int inner = 0;
    if (l > 0.0) {
      try {
        SvmSolution ps = model.solve(l, labels, &sol);
        inner = ps.iterations;
        const double pt = target(r, l, ps);
        const double diff = pt - cur;
        a = diff >= 0.0 ? 1.0 : std::exp(diff);
        if (std::log(u) < diff) {
          accept = true;
          raw = r;
          lambda = l;
          sol = std::move(ps);
          cur = pt;
        }
      } catch (const ConvergenceFailure&) {
        ++tr.solver_failures;
      }
    }
    adapter.update(t, a, VectorXd::Constant(1, raw));
    if (!adapter.adapting(t)) {
      ++post_total;
      post_accepts += accept;
    }

    // labels | λ
    for (Index j = 0; j < k; ++j) {
      const Index i = model.data().unlabeled[static_cast<std::size_t>(j)];
      const double now = labels(i);
      labels(i) = -now;
      try {
        SvmSolution fs = model.solve(lambda, labels, &sol);
        const double k_flip = -fs.objective, k_now = -sol.objective;
        const int pick = categorical_from_logs({k_now, k_flip}, rng);
        if (pick == 1) {
          sol = std::move(fs);
          imputed(j) = -now;
        } else {
          labels(i) = now;
        }
      } catch (const ConvergenceFailure&) {
        labels(i) = now;
        ++tr.solver_failures;
      }
    }
    cur = target(raw, lambda, sol);

    if (t >= opt.burn_in) {
      tr.samples(t - opt.burn_in, 0) = lambda;
      tr.aux.row(t - opt.burn_in) = imputed.transpose();
      tr.accepted.push_back(accept);
      tr.inner_iterations.push_back(inner);
    }
    timer.tick(t);
  }
  timer.finish();
  tr.acceptance = post_total ? static_cast<double>(post_accepts) / static_cast<double>(post_total) : 0.0;
  tr.step = adapter.step();
  return tr;
}

}  // namespace bridged
