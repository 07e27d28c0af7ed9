#pragma once

// Edge flows on a network whose capacities on E* are unknown. Replicate flow
// observations are Gaussian around the max-flow solution z(λ):
//   log L = −(n|E|/2) log σ² − Σ_e [W_e + n(ȳ_e − z_e)²] / (2σ²),
// with W_e the within-edge sum of squares. Priors: Exp(ρ) on each capacity in
// E*, Inverse-Gamma(2, 5) on σ².

#include <cmath>
#include <string>

#include "bridged/inner/max_flow.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/stats.hpp"

namespace bridged {

struct FlowData {
  FlowNetwork network;
  MatrixXd observations;  // n replicates × |E|, columns in edge order

  void validate() const {
    network.validate();
    if (network.uncertain.empty()) throw InvalidInput("flow data: no uncertain edges");
    if (observations.rows() < 1 || observations.cols() != static_cast<Index>(network.edges.size()))
      throw InvalidInput("flow data: observation matrix does not match the edge list");
    if (!observations.allFinite()) throw InvalidInput("flow data: non-finite observations");
  }
};

struct FlowPriors {
  double capacity_rate = 0.2;
  double sigma2_shape = 2.0;
  double sigma2_scale = 5.0;
};

class FlowModel {
 public:
  using Solution = InnerSolution<VectorXd>;

  explicit FlowModel(FlowData data, FlowPriors priors = {}) : data_(std::move(data)), priors_(priors) {
    data_.validate();
    const auto n = static_cast<double>(data_.observations.rows());
    mean_ = data_.observations.colwise().mean().transpose();
    within_ = (data_.observations.rowwise() - mean_.transpose()).colwise().squaredNorm().transpose();
    count_ = n;
  }

  const FlowData& data() const noexcept { return data_; }
  Index uncertain_count() const noexcept { return static_cast<Index>(data_.network.uncertain.size()); }

  /// λ = (capacities on E*, σ²).
  ParamSpec param_spec() const {
    ParamSpec s;
    for (int k : data_.network.uncertain) {
      s.names.push_back("cap" + std::to_string(k));
      s.transforms.push_back(Transform::softplus);
    }
    s.names.emplace_back("sigma2");
    s.transforms.push_back(Transform::softplus);
    return s;
  }

  double log_prior(const VectorXd& lam) const {
    const Index m = uncertain_count();
    double s = 0.0;
    for (Index k = 0; k < m; ++k) s += stats::exponential_log_pdf(lam(k), priors_.capacity_rate);
    return s + stats::inverse_gamma_log_pdf(lam(m), priors_.sigma2_shape, priors_.sigma2_scale);
  }

  Solution solve(const VectorXd& lam, const Solution*) const {
    return max_flow_solve(data_.network, lam.head(uncertain_count()));
  }

  /// SS = Σ_e [W_e + n(ȳ_e − z_e)²].
  double sum_of_squares(const VectorXd& flows) const {
    return within_.sum() + count_ * (mean_ - flows).squaredNorm();
  }

  double log_likelihood(const VectorXd& lam, const Solution& sol) const {
    const double s2 = lam(uncertain_count());
    const double ne = count_ * static_cast<double>(mean_.size());
    return -0.5 * ne * std::log(s2) - sum_of_squares(sol.z) / (2.0 * s2);
  }

 private:
  FlowData data_;
  FlowPriors priors_;
  VectorXd mean_, within_;
  double count_ = 0.0;
};

static_assert(BridgedModel<FlowModel>);

}  // namespace bridged
