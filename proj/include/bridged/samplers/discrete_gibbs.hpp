#pragma once

// Systematic-scan Gibbs over finite coordinates: each coordinate is redrawn
// from its exact full conditional, given as log weights up to a constant.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

/// Index drawn with probability ∝ exp(logs[k]).
inline int categorical_from_logs(const std::vector<double>& logs, Rng& rng) {
  const double m = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(m)) throw InvalidInput("categorical: no value has positive weight");
  std::vector<double> w(logs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) total += (w[k] = std::exp(logs[k] - m));
  double u = uniform01(rng) * total;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (u < w[k]) return static_cast<int>(k);
    u -= w[k];
  }
  // Rounding left u just above the last positive weight.
  for (std::size_t k = w.size(); k-- > 0;)
    if (w[k] > 0.0) return static_cast<int>(k);
  return 0;
}

/// One sweep. `log_conditional(c, v, state)` is the log kernel with
/// coordinate c set to v, up to terms not involving coordinate c.
template <class LogConditional>
void gibbs_sweep(std::vector<int>& state, const std::vector<int>& support, LogConditional&& log_conditional, Rng& rng) {
  std::vector<double> logs;
  for (std::size_t c = 0; c < state.size(); ++c) {
    const int k = support[c];
    if (k == 1) continue;
    logs.assign(static_cast<std::size_t>(k), 0.0);
    for (int v = 0; v < k; ++v) logs[static_cast<std::size_t>(v)] = log_conditional(static_cast<Index>(c), v, state);
    state[c] = categorical_from_logs(logs, rng);
  }
}

template <class LogConditional>
Trace discrete_gibbs(const std::vector<int>& support, std::vector<int> init, LogConditional&& log_conditional,
                     int sweeps, int burn_in, Rng& rng) {
  detail::check_iterations(sweeps, burn_in);
  if (support.size() != init.size()) throw InvalidInput("discrete_gibbs: support and state differ in length");
  for (std::size_t c = 0; c < init.size(); ++c)
    if (support[c] < 1 || init[c] < 0 || init[c] >= support[c]) throw InvalidInput("discrete_gibbs: invalid state");
  Trace tr;
  for (std::size_t c = 0; c < init.size(); ++c) tr.aux_names.push_back("c" + std::to_string(c));
  tr.aux.resize(sweeps - burn_in, static_cast<Index>(init.size()));
  tr.samples.resize(sweeps - burn_in, 0);
  detail::BlockTimer timer(tr);
  for (int t = 0; t < sweeps; ++t) {
    gibbs_sweep(init, support, log_conditional, rng);
    if (t >= burn_in)
      for (std::size_t c = 0; c < init.size(); ++c) tr.aux(t - burn_in, static_cast<Index>(c)) = init[c];
    timer.tick(t);
  }
  timer.finish();
  tr.acceptance = 1.0;
  return tr;
}

}  // namespace bridged
