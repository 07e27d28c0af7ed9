#pragma once

#include <concepts>

#include "bridged/error.hpp"
#include "bridged/models/param.hpp"

namespace bridged {

/// A bridged model: prior on λ, the inner problem z = argmin g(·, y; λ), and
/// the joint log-likelihood evaluated at that z. All λ arguments are native.
template <class M>
concept BridgedModel = requires(const M& m, const VectorXd& lam, const typename M::Solution* warm,
                                const typename M::Solution& sol) {
  typename M::Solution;
  { m.param_spec() } -> std::convertible_to<ParamSpec>;
  { m.log_prior(lam) } -> std::convertible_to<double>;
  { m.solve(lam, warm) } -> std::same_as<typename M::Solution>;
  { m.log_likelihood(lam, sol) } -> std::convertible_to<double>;
};

/// Models that can differentiate the joint log-likelihood in λ at fixed z.
template <class M>
concept EnvelopeModel = BridgedModel<M> && requires(const M& m, const VectorXd& lam, const typename M::Solution& sol) {
  { m.log_likelihood_gradient(lam, sol) } -> std::convertible_to<VectorXd>;
  { m.log_prior_gradient(lam) } -> std::convertible_to<VectorXd>;
};

template <BridgedModel M>
struct KernelValue {
  typename M::Solution solution;
  double log_kernel = 0.0;  // log likelihood + log prior, native scale
};

template <BridgedModel M>
KernelValue<M> log_kernel(const M& model, const VectorXd& lam, const typename M::Solution* warm = nullptr) {
  KernelValue<M> out;
  const double lp = model.log_prior(lam);
  if (!std::isfinite(lp)) {
    out.log_kernel = lp;
    return out;
  }
  out.solution = model.solve(lam, warm);
  out.log_kernel = lp + model.log_likelihood(lam, out.solution);
  return out;
}

/// Gradient of the log kernel in λ (native scale). By the envelope theorem the
/// derivative of the profiled term equals ∂/∂λ at the fixed minimizer.
template <BridgedModel M>
VectorXd envelope_subgradient(const M& model, const VectorXd& lam, const typename M::Solution& sol) {
  if constexpr (EnvelopeModel<M>) {
    return model.log_likelihood_gradient(lam, sol) + model.log_prior_gradient(lam);
  } else {
    throw NotImplemented("envelope_subgradient: model does not provide dℓ/dλ at fixed z");
  }
}

template <BridgedModel M>
VectorXd envelope_subgradient(const M& model, const VectorXd& lam, const typename M::Solution* warm = nullptr) {
  if constexpr (EnvelopeModel<M>) {
    return envelope_subgradient(model, lam, model.solve(lam, warm));
  } else {
    throw NotImplemented("envelope_subgradient: model does not provide dℓ/dλ at fixed z");
  }
}

}  // namespace bridged
