#pragma once

// Random-walk Metropolis on λ with the inner problem re-solved at every
// proposal. Proposals are Uniform(r − s, r + s) in raw coordinates; the
// target there includes the softplus log-Jacobian.

#include <cmath>

#include "bridged/error.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/adaptation.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

struct RwOptions {
  int iters = 10000;
  int burn_in = 2000;
  AdaptationConfig adapt;
  bool warm_start = true;
};

/// Chain state: raw λ with its cached kernel and inner solution.
template <BridgedModel M>
struct ChainState {
  VectorXd raw;
  VectorXd native;
  double log_target = 0.0;  // log kernel + log Jacobian
  typename M::Solution solution;
};

namespace detail {

/// Evaluates the raw-scale target. Returns false if the inner solver failed.
template <BridgedModel M>
bool evaluate(const M& model, const ParamSpec& spec, const VectorXd& raw, const typename M::Solution* warm,
              ChainState<M>& out) {
  out.raw = raw;
  out.native = spec.to_native(raw);
  for (Index j = 0; j < raw.size(); ++j)
    if (spec.transforms[static_cast<std::size_t>(j)] == Transform::softplus && !(out.native(j) > 0.0)) {
      out.log_target = stats::kNegInf;  // softplus underflow: outside the support
      return true;
    }
  try {
    auto k = log_kernel(model, out.native, warm);
    out.log_target = k.log_kernel + spec.log_jacobian(raw);
    out.solution = std::move(k.solution);
  } catch (const ConvergenceFailure&) {
    return false;
  } catch (const DecompositionError&) {
    return false;
  }
  return !std::isnan(out.log_target);
}

template <class S>
int iterations_of(const S& s) {
  if constexpr (requires { s.iterations; }) return s.iterations;
  else return 0;
}

}  // namespace detail

template <BridgedModel M>
Trace rw_metropolis(const M& model, const VectorXd& init_native, const RwOptions& opt, Rng& rng) {
  detail::check_iterations(opt.iters, opt.burn_in);
  const ParamSpec spec = model.param_spec();
  const Index d = spec.dim();
  ChainState<M> cur, prop;
  if (!detail::evaluate(model, spec, spec.to_raw(init_native), nullptr, cur) || !std::isfinite(cur.log_target))
    throw InvalidInput("rw_metropolis: initial value has zero posterior density or the inner solve failed");

  StepAdapter adapter(d, opt.adapt, opt.adapt.window(opt.iters, opt.burn_in));
  Trace tr;
  tr.names = spec.names;
  tr.adaptation_window = adapter.window();
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, d);
  tr.accepted.reserve(static_cast<std::size_t>(kept));
  tr.inner_iterations.reserve(static_cast<std::size_t>(kept));
  long post_accepts = 0, post_total = 0;
  detail::BlockTimer timer(tr);

  for (int t = 0; t < opt.iters; ++t) {
    const VectorXd& s = adapter.step();
    VectorXd r = cur.raw;
    for (Index j = 0; j < d; ++j) r(j) += s(j) * (2.0 * uniform01(rng) - 1.0);
    const double u = uniform_open01(rng);
    bool accept = false;
    double a = 0.0;
    int inner = 0;
    if (detail::evaluate(model, spec, r, opt.warm_start ? &cur.solution : nullptr, prop)) {
      inner = detail::iterations_of(prop.solution);
      const double diff = prop.log_target - cur.log_target;
      a = diff >= 0.0 ? 1.0 : std::exp(diff);
      accept = std::log(u) < diff;
    } else {
      ++tr.solver_failures;
    }
    if (accept) std::swap(cur, prop);
    adapter.update(t, a, cur.raw);
    if (!adapter.adapting(t)) {
      ++post_total;
      post_accepts += accept;
    }
    if (t >= opt.burn_in) {
      tr.samples.row(t - opt.burn_in) = cur.native.transpose();
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
