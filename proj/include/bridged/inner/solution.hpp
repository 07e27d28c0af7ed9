#pragma once

#include <Eigen/Dense>

namespace bridged {

/// Result of an inner optimization. `Z` is the latent type (vector or matrix).
template <class Z>
struct InnerSolution {
  Z z;
  double objective = 0.0;   // primal value at z
  Eigen::VectorXd dual;     // empty when the solver has no dual
  int iterations = 0;
  double residual = 0.0;
};

}  // namespace bridged
