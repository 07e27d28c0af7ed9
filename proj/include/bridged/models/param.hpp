#pragma once

// Unconstrained parameterization. Each coordinate is either used as is or
// mapped to (0, ∞) by softplus; priors are always stated on the native scale.

#include <cmath>
#include <string>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/numerics/linalg.hpp"
#include "bridged/stats.hpp"

namespace bridged {

enum class Transform { identity, softplus };

inline double softplus(double r) { return stats::log1p_exp(r); }

/// Inverse of softplus on (0, ∞): x + log(1 − e^{−x}).
inline double softplus_inverse(double x) {
  if (!(x > 0.0)) throw InvalidInput("softplus_inverse: argument must be positive");
  return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

struct ParamSpec {
  std::vector<std::string> names;
  std::vector<Transform> transforms;

  Index dim() const noexcept { return static_cast<Index>(names.size()); }

  VectorXd to_native(const VectorXd& raw) const {
    check(raw);
    VectorXd out(raw.size());
    for (Index i = 0; i < raw.size(); ++i)
      out(i) = transforms[static_cast<std::size_t>(i)] == Transform::softplus ? softplus(raw(i)) : raw(i);
    return out;
  }

  VectorXd to_raw(const VectorXd& native) const {
    check(native);
    VectorXd out(native.size());
    for (Index i = 0; i < native.size(); ++i)
      out(i) = transforms[static_cast<std::size_t>(i)] == Transform::softplus ? softplus_inverse(native(i)) : native(i);
    return out;
  }

  /// log |d native / d raw|; softplus' = sigmoid.
  double log_jacobian(const VectorXd& raw) const {
    double s = 0.0;
    for (Index i = 0; i < raw.size(); ++i)
      if (transforms[static_cast<std::size_t>(i)] == Transform::softplus) s += stats::log_sigmoid(raw(i));
    return s;
  }

  /// Maps a native-scale gradient to the raw scale, including the log-Jacobian term.
  VectorXd raw_gradient(const VectorXd& raw, const VectorXd& native_grad) const {
    VectorXd g = native_grad;
    for (Index i = 0; i < raw.size(); ++i) {
      if (transforms[static_cast<std::size_t>(i)] != Transform::softplus) continue;
      const double s = stats::sigmoid(raw(i));
      g(i) = native_grad(i) * s + (1.0 - s);
    }
    return g;
  }

 private:
  void check(const VectorXd& v) const {
    if (v.size() != dim() || transforms.size() != names.size()) throw InvalidInput("parameter vector has wrong length");
  }
};

}  // namespace bridged
