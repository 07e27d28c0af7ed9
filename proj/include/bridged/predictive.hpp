#pragma once

// Posterior predictive simulation. For a fixed λ the next response has
// density proportional to L{y_{1:(n+j)}, ẑ(y_{1:(n+j)})} / L{y_{1:(n+j−1)}, ·};
// the denominator does not involve y_{n+j}, so each step samples from the
// extended model's profile likelihood as a function of the new response,
// re-solving ẑ warm-started from the previous step.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/discrete_gibbs.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

/// Models that can append one observation and re-solve from a warm start.
template <class M>
concept PredictiveModel = BridgedModel<M> && requires(const M& m, const typename M::Input& x,
                                                      const typename M::Solution& s, double y) {
  { m.extended(x, y) } -> std::convertible_to<M>;
  { m.extend_solution(s, y) } -> std::convertible_to<typename M::Solution>;
  { M::kDiscreteResponse } -> std::convertible_to<bool>;
};

struct PredictiveOptions {
  int thin = 10;            // use every thin-th kept λ
  double inflation = 1.2;   // envelope SD = inflation × model's predictive scale
  int max_doublings = 8;    // envelope-inflation retries per step
  long max_proposals = 1000000;
};

struct PredictiveDraw {
  VectorXd y;                   // y_{n+1}, …, y_{n+k}
  std::vector<long> rejections; // per step; zero for finite supports
  Index source = 0;             // row of the λ trace
};

namespace detail {

template <PredictiveModel M>
struct Extension {
  M model;
  typename M::Solution solution;
  double log_lik;
};

template <PredictiveModel M>
Extension<M> extend(const M& cur, const VectorXd& lam, const typename M::Solution& sol, const typename M::Input& x,
                    double y) {
  M next = cur.extended(x, y);
  const typename M::Solution warm = cur.extend_solution(sol, y);
  typename M::Solution s = next.solve(lam, &warm);
  const double ll = next.log_likelihood(lam, s);
  return {std::move(next), std::move(s), ll};
}

}  // namespace detail

/// Exact one-step predictive probabilities over a finite response support.
template <PredictiveModel M>
std::vector<double> predictive_probabilities(const M& model, const VectorXd& lam, const typename M::Solution& sol,
                                             const typename M::Input& x) {
  static_assert(M::kDiscreteResponse);
  const auto support = M::response_support();
  std::vector<double> logs;
  for (double y : support) logs.push_back(detail::extend(model, lam, sol, x, y).log_lik);
  const double m = *std::max_element(logs.begin(), logs.end());
  double z = 0.0;
  for (double& l : logs) z += (l = std::exp(l - m));
  for (double& l : logs) l /= z;
  return logs;
}

/// Sequential draws of k new responses per thinned posterior λ.
template <PredictiveModel M>
std::vector<PredictiveDraw> sequential_predict(const M& model, const Trace& trace,
                                               const std::vector<typename M::Input>& inputs,
                                               const PredictiveOptions& opt, Rng& rng) {
  if (opt.thin < 1) throw InvalidInput("predict: thinning must be at least 1");
  if (!(opt.inflation > 0.0)) throw InvalidInput("predict: envelope inflation must be positive");
  if (trace.dim() != model.param_spec().dim()) throw InvalidInput("predict: trace does not match the model");
  std::vector<PredictiveDraw> out;
  for (Index t = 0; t < trace.kept(); t += opt.thin) {
    const VectorXd lam = trace.samples.row(t).transpose();
    M cur = model;
    typename M::Solution sol = cur.solve(lam, nullptr);
    PredictiveDraw d;
    d.source = t;
    d.y.resize(static_cast<Index>(inputs.size()));
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const auto& x = inputs[j];
      if constexpr (M::kDiscreteResponse) {
        const auto support = M::response_support();
        std::vector<detail::Extension<M>> ext;
        std::vector<double> logs;
        for (double y : support) {
          ext.push_back(detail::extend(cur, lam, sol, x, y));
          logs.push_back(ext.back().log_lik);
        }
        const int k = categorical_from_logs(logs, rng);
        d.y(static_cast<Index>(j)) = support[static_cast<std::size_t>(k)];
        d.rejections.push_back(0);
        cur = std::move(ext[static_cast<std::size_t>(k)].model);
        sol = std::move(ext[static_cast<std::size_t>(k)].solution);
      } else {
        // Rejection from a Gaussian envelope N(c, (κs)²). The bound M is the
        // largest target/envelope ratio over a probe grid; a draw exceeding it
        // doubles κ and restarts the step.
        const auto [center, scale] = cur.predictive_guess(lam, sol, x);
        double kappa = opt.inflation;
        long rejected = 0;
        for (int doubling = 0;; ++doubling) {
          if (doubling > opt.max_doublings)
            throw ConvergenceFailure("predictive envelope", kappa, doubling);
          const double sd = kappa * scale;
          auto log_ratio = [&](double y, double ll) {
            const double u = (y - center) / sd;
            return ll + 0.5 * u * u;  // ll − log q(y) up to a constant
          };
          double log_m = stats::kNegInf;
          for (int p = -8; p <= 8; ++p) {
            const double y = center + 0.5 * p * sd;
            log_m = std::max(log_m, log_ratio(y, detail::extend(cur, lam, sol, x, y).log_lik));
          }
          bool violated = false;
          for (;;) {
            if (rejected >= opt.max_proposals) throw ConvergenceFailure("predictive rejection", 0.0, static_cast<int>(rejected));
            const double y = center + sd * std_normal(rng);
            const double u = uniform_open01(rng);
            auto e = detail::extend(cur, lam, sol, x, y);
            const double lr = log_ratio(y, e.log_lik);
            if (lr > log_m + 1e-12) {
              violated = true;
              break;
            }
            if (std::log(u) < lr - log_m) {
              d.y(static_cast<Index>(j)) = y;
              cur = std::move(e.model);
              sol = std::move(e.solution);
              break;
            }
            ++rejected;
          }
          if (!violated) break;
          kappa *= 2.0;
        }
        d.rejections.push_back(rejected);
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

/// P(y_j = 1 | y_{1:n}) for every unlabeled point: the mean of its imputed
/// ±1 labels mapped to {0, 1}.
inline VectorXd bmmc_predict_probs(const Trace& trace) {
  if (trace.kept() == 0) throw InvalidInput("bmmc predict: empty trace");
  return ((trace.aux.array() + 1.0) * 0.5).colwise().mean().transpose();
}

}  // namespace bridged
