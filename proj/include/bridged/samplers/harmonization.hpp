#pragma once

// Gibbs sampler for graph harmonization: a 10-way systematic scan over the
// per-subject grid indices, then conjugate draws of σ² and τ. All projections
// and distances come from a precomputed table, so a sweep costs O(S²G).

#include <string>
#include <vector>

#include "bridged/models/harmonization.hpp"
#include "bridged/samplers/discrete_gibbs.hpp"
#include "bridged/samplers/trace.hpp"

namespace bridged {

struct HarmonizationSamplerOptions {
  int iters = 10000;
  int burn_in = 2000;
  HarmonizationPriors priors;
  std::vector<int> init;  // grid index per subject; empty → middle of the grid
  double init_sigma2 = 1.0, init_tau = 1.0;
};

struct HarmonizationChain {
  Trace trace;                 // samples (sigma2, tau); aux = grid indices
  MatrixXd smoothed_distance;  // posterior mean of dist(Z_s, Z_k)
};

inline HarmonizationChain harmonization_sampler(const ProjectionTable& table, const HarmonizationSamplerOptions& opt,
                                                Rng& rng) {
  detail::check_iterations(opt.iters, opt.burn_in);
  const Index s = table.subjects();
  std::vector<int> idx = opt.init.empty() ? std::vector<int>(static_cast<std::size_t>(s), static_cast<int>(table.grid_size() / 2))
                                          : opt.init;
  table.check(idx);
  double sigma2 = opt.init_sigma2, tau = opt.init_tau;
  if (!(sigma2 > 0.0) || !(tau > 0.0)) throw InvalidInput("harmonization sampler: sigma2 and tau must be positive");

  HarmonizationChain out;
  Trace& tr = out.trace;
  tr.names = {"sigma2", "tau"};
  for (Index k = 0; k < s; ++k) tr.aux_names.push_back("g" + std::to_string(k));
  const int kept = opt.iters - opt.burn_in;
  tr.samples.resize(kept, 2);
  tr.aux.resize(kept, s);
  out.smoothed_distance = MatrixXd::Zero(s, s);
  const std::vector<int> support(static_cast<std::size_t>(s), static_cast<int>(table.grid_size()));
  detail::BlockTimer timer(tr);

  for (int t = 0; t < opt.iters; ++t) {
    gibbs_sweep(
        idx, support,
        [&](Index c, int v, const std::vector<int>& st) { return harmonization_log_conditional(c, v, st, sigma2, tau, table); },
        rng);
    sigma2 = harmonization_draw_sigma2(idx, table, opt.priors, rng);
    tau = harmonization_draw_tau(idx, table, opt.priors, rng);
    if (t >= opt.burn_in) {
      const int r = t - opt.burn_in;
      tr.samples(r, 0) = sigma2;
      tr.samples(r, 1) = tau;
      for (Index k = 0; k < s; ++k) tr.aux(r, k) = idx[static_cast<std::size_t>(k)];
      tr.accepted.push_back(1);
      tr.inner_iterations.push_back(0);
      out.smoothed_distance += table.distance_matrix(idx);
    }
    timer.tick(t);
  }
  timer.finish();
  out.smoothed_distance /= static_cast<double>(kept);
  tr.acceptance = 1.0;
  return out;
}

}  // namespace bridged
