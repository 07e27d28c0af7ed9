#pragma once

// Preconditioned Metropolis-adjusted Langevin on raw λ. The drift uses the
// envelope-theorem gradient of the log kernel at the cached inner solution:
//   λ* ~ N(λ + τM∇, 2τM).

#include <cmath>

#include "bridged/samplers/rw_metropolis.hpp"

namespace bridged {

struct MalaOptions {
  int iters = 10000;
  int burn_in = 2000;
  double tau = 0.1;
  MatrixXd preconditioner;  // raw scale; empty → identity
  bool warm_start = true;
};

namespace detail {

template <EnvelopeModel M>
VectorXd raw_log_gradient(const M& model, const ParamSpec& spec, const ChainState<M>& s) {
  return spec.raw_gradient(s.raw, envelope_subgradient(model, s.native, s.solution));
}

// log N(x; mean, 2τM) up to a constant shared by forward and reverse moves.
inline double langevin_log_density(const VectorXd& x, const VectorXd& mean, double tau, const MatrixXd& m_l) {
  const VectorXd w = m_l.triangularView<Eigen::Lower>().solve(x - mean);
  return -w.squaredNorm() / (4.0 * tau);
}

}  // namespace detail

template <EnvelopeModel M>
Trace mala(const M& model, const VectorXd& init_native, const MalaOptions& opt, Rng& rng) {
  detail::check_iterations(opt.iters, opt.burn_in);
  if (!(opt.tau > 0.0)) throw InvalidInput("mala: step must be positive");
  const ParamSpec spec = model.param_spec();
  const Index d = spec.dim();
  const MatrixXd m = opt.preconditioner.size() ? opt.preconditioner : MatrixXd(MatrixXd::Identity(d, d));
  if (m.rows() != d || m.cols() != d) throw InvalidInput("mala: preconditioner has wrong size");
  MatrixXd m_l;
  try {
    m_l = cholesky_factor(0.5 * (m + m.transpose()));
  } catch (const DecompositionError&) {
    throw InvalidInput("mala: preconditioner is not positive definite");
  }

  ChainState<M> cur, prop;
  if (!detail::evaluate(model, spec, spec.to_raw(init_native), nullptr, cur) || !std::isfinite(cur.log_target))
    throw InvalidInput("mala: initial value has zero posterior density or the inner solve failed");
  VectorXd g_cur = detail::raw_log_gradient(model, spec, cur);

  Trace tr;
  tr.names = spec.names;
  tr.step = VectorXd::Constant(1, opt.tau);
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, d);
  long accepts = 0;
  detail::BlockTimer timer(tr);
  const double sd = std::sqrt(2.0 * opt.tau);

  for (int t = 0; t < opt.iters; ++t) {
    const VectorXd mean_fwd = cur.raw + opt.tau * (m * g_cur);
    VectorXd eps(d);
    for (Index j = 0; j < d; ++j) eps(j) = std_normal(rng);
    const VectorXd r = mean_fwd + sd * (m_l * eps);
    const double u = uniform_open01(rng);
    bool accept = false;
    int inner = 0;
    VectorXd g_prop;
    if (!detail::evaluate(model, spec, r, opt.warm_start ? &cur.solution : nullptr, prop)) {
      ++tr.solver_failures;
    } else if (std::isfinite(prop.log_target)) {
      inner = detail::iterations_of(prop.solution);
      g_prop = detail::raw_log_gradient(model, spec, prop);
      const VectorXd mean_rev = prop.raw + opt.tau * (m * g_prop);
      const double log_ratio = prop.log_target - cur.log_target +
                               detail::langevin_log_density(cur.raw, mean_rev, opt.tau, m_l) -
                               detail::langevin_log_density(prop.raw, mean_fwd, opt.tau, m_l);
      accept = std::log(u) < log_ratio;
    }
    if (accept) {
      std::swap(cur, prop);
      g_cur = g_prop;
      ++accepts;
    }
    if (t >= opt.burn_in) {
      tr.samples.row(t - opt.burn_in) = cur.native.transpose();
      tr.accepted.push_back(accept);
      tr.inner_iterations.push_back(inner);
    }
    timer.tick(t);
  }
  timer.finish();
  tr.acceptance = static_cast<double>(accepts) / static_cast<double>(opt.iters);
  return tr;
}

}  // namespace bridged
