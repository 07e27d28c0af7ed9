#pragma once

// Bayesian maximum-margin classifier. Labels are ±1; the unlabeled entries of
// the label vector carry the current imputation. The kernel over (λ, labels)
// is exp{−min_{w,b} [½λ‖w‖² + Σ_i hinge_i]} times a Gamma(3, rate 2) prior.

#include <algorithm>
#include <vector>

#include "bridged/inner/svm_dual.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/stats.hpp"

namespace bridged {

struct BmmcData {
  MatrixXd x;                    // (n + k) × p features
  VectorXd y;                    // ±1; values at unlabeled indices are ignored
  std::vector<Index> unlabeled;  // sorted, distinct

  void validate() const {
    if (x.rows() != y.size()) throw InvalidInput("bmmc data: features and labels differ in length");
    std::vector<Index> u = unlabeled;
    std::sort(u.begin(), u.end());
    if (std::adjacent_find(u.begin(), u.end()) != u.end()) throw InvalidInput("bmmc data: repeated unlabeled index");
    for (Index i : u)
      if (i < 0 || i >= y.size()) throw InvalidInput("bmmc data: unlabeled index out of range");
    for (Index i = 0; i < y.size(); ++i) {
      if (std::binary_search(u.begin(), u.end(), i)) continue;
      if (y(i) != 1.0 && y(i) != -1.0) throw InvalidInput("bmmc data: observed labels must be -1 or +1");
    }
  }
};

struct BmmcPriors {
  double shape = 3.0;
  double rate = 2.0;
};

class BmmcModel {
 public:
  using Solution = SvmSolution;

  explicit BmmcModel(BmmcData data, BmmcPriors priors = {}, SvmOptions opt = {})
      : data_(std::move(data)), priors_(priors), opt_(opt), problem_(data_.x) {
    data_.validate();
    std::sort(data_.unlabeled.begin(), data_.unlabeled.end());
  }

  const BmmcData& data() const noexcept { return data_; }
  const SvmProblem& problem() const noexcept { return problem_; }
  Index unlabeled_count() const noexcept { return static_cast<Index>(data_.unlabeled.size()); }

  ParamSpec param_spec() const { return {{"lambda"}, {Transform::softplus}}; }

  double log_prior(double lambda) const { return stats::gamma_log_pdf(lambda, priors_.shape, priors_.rate); }
  double log_prior_derivative(double lambda) const { return (priors_.shape - 1.0) / lambda - priors_.rate; }

  /// Observed labels with `imputed` (one ±1 per unlabeled index) filled in.
  VectorXd full_labels(const VectorXd& imputed) const {
    if (imputed.size() != unlabeled_count()) throw InvalidInput("bmmc: wrong number of imputed labels");
    VectorXd y = data_.y;
    for (Index k = 0; k < imputed.size(); ++k) y(data_.unlabeled[static_cast<std::size_t>(k)]) = imputed(k);
    return y;
  }

  Solution solve(double lambda, const VectorXd& labels, const Solution* warm) const {
    return problem_.solve(labels, lambda, opt_, warm ? &warm->dual : nullptr);
  }

  /// −½λ‖z_w‖² − Σ hinge + log prior, all n + k points included.
  double log_kernel(double lambda, const Solution& sol) const { return -sol.objective + log_prior(lambda); }

 private:
  BmmcData data_;
  BmmcPriors priors_;
  SvmOptions opt_;
  SvmProblem problem_;
};

/// The model with the label vector held fixed, as a bridged model in λ alone.
class BmmcConditional {
 public:
  using Solution = SvmSolution;

  BmmcConditional(const BmmcModel& model, const VectorXd& labels) : model_(model), labels_(labels) {}

  ParamSpec param_spec() const { return model_.param_spec(); }
  double log_prior(const VectorXd& lam) const { return model_.log_prior(lam(0)); }
  VectorXd log_prior_gradient(const VectorXd& lam) const {
    return VectorXd::Constant(1, model_.log_prior_derivative(lam(0)));
  }
  Solution solve(const VectorXd& lam, const Solution* warm) const { return model_.solve(lam(0), labels_, warm); }
  double log_likelihood(const VectorXd&, const Solution& sol) const { return -sol.objective; }
  VectorXd log_likelihood_gradient(const VectorXd&, const Solution& sol) const {
    return VectorXd::Constant(1, -0.5 * sol.w.squaredNorm());
  }

 private:
  const BmmcModel& model_;
  const VectorXd& labels_;
};

static_assert(EnvelopeModel<BmmcConditional>);

}  // namespace bridged
