#pragma once

// Synthetic data for the experiments. Every generator is a pure function of
// its arguments and seed.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/inner/cox_hazard.hpp"
#include "bridged/inner/laplacian_admm.hpp"
#include "bridged/models/bmmc.hpp"
#include "bridged/models/flow.hpp"
#include "bridged/models/harmonization.hpp"
#include "bridged/models/lqe.hpp"
#include "bridged/random.hpp"

namespace bridged {

/// x ~ Uniform(−6, 6), y ~ Bernoulli(σ(cos x)).
inline LqeData gen_lqe_data(Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("gen_lqe_data: n must be positive");
  Rng rng = make_rng(seed, 1);
  LqeData d;
  d.x.resize(n, 1);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.x(i, 0) = -6.0 + 12.0 * uniform01(rng);
    d.y(i) = uniform01(rng) < stats::sigmoid(std::cos(d.x(i, 0))) ? 1.0 : 0.0;
  }
  return d;
}

struct FlowStudy {
  FlowData data;
  VectorXd true_flows;       // z⁰, edge order
  VectorXd true_capacities;  // on E*, in the order of network.uncertain
  int attempts = 1;          // sub-seeds consumed
};

struct FlowGenOptions {
  int nodes = 40;
  double edge_probability = 0.48;  // per ordered pair i < j
  int uncertain = 5;
  int replicates = 500;
  double noise_sd = 1.0;
  double cap_lo = 2.0, cap_hi = 10.0;
};

/// Random DAG on nodes 0 < … < N−1 with source 0 and sink N−1: each forward
/// pair is an edge with the given probability, and every interior node gets
/// at least one incoming and one outgoing edge. E* is drawn first from edges
/// whose capacity limits the max flow (only those are identified by the
/// flows), then other saturated edges, then edges carrying flow. Graphs with
/// zero max flow are regenerated.
inline FlowStudy gen_flow_network(const FlowGenOptions& opt, std::uint64_t seed) {
  if (opt.nodes < 3 || opt.uncertain < 1 || opt.replicates < 1) throw InvalidInput("gen_flow_network: invalid options");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Rng rng = make_rng(seed, 100 + static_cast<std::uint64_t>(attempt));
    const int n = opt.nodes;
    std::vector<std::vector<bool>> has(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (uniform01(rng) < opt.edge_probability) has[i][j] = true;
    for (int v = 1; v < n - 1; ++v) {
      bool in = false, out = false;
      for (int u = 0; u < v; ++u) in = in || has[u][v];
      for (int w = v + 1; w < n; ++w) out = out || has[v][w];
      if (!in) has[static_cast<std::size_t>(std::min(v - 1, static_cast<int>(uniform01(rng) * v)))][v] = true;
      if (!out) has[v][static_cast<std::size_t>(std::min(n - 1, v + 1 + static_cast<int>(uniform01(rng) * (n - 1 - v))))] = true;
    }
    FlowNetwork net;
    net.nodes = n;
    net.source = 0;
    net.sink = n - 1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (has[i][j]) net.edges.push_back({i, j, opt.cap_lo + (opt.cap_hi - opt.cap_lo) * uniform01(rng)});
    if (static_cast<int>(net.edges.size()) < opt.uncertain) continue;
    const auto z0 = max_flow_solve(net, VectorXd());
    if (!(z0.objective > 0.0)) continue;

    // Tiers: raising the capacity raises the max flow; saturated; carrying flow.
    std::vector<int> critical, saturated, positive;
    VectorXd caps(static_cast<Index>(net.edges.size()));
    for (std::size_t k = 0; k < net.edges.size(); ++k) caps(static_cast<Index>(k)) = net.edges[k].capacity;
    for (int k = 0; k < static_cast<int>(net.edges.size()); ++k) {
      const double z = z0.z(k), c = caps(k);
      if (z >= c - 1e-9) {
        VectorXd up = caps;
        up(k) += 1.0;
        (max_flow_with_capacities(net, up).objective > z0.objective + 1e-9 ? critical : saturated).push_back(k);
      } else if (z > 0.0) {
        positive.push_back(k);
      }
    }
    std::vector<int> pick;
    for (auto* tier : {&critical, &saturated, &positive}) {
      std::shuffle(tier->begin(), tier->end(), rng);
      for (int k : *tier)
        if (static_cast<int>(pick.size()) < opt.uncertain) pick.push_back(k);
    }
    if (static_cast<int>(pick.size()) < opt.uncertain) continue;
    std::sort(pick.begin(), pick.end());
    net.uncertain = pick;

    FlowStudy s;
    s.attempts = attempt + 1;
    s.true_flows = z0.z;
    s.true_capacities.resize(opt.uncertain);
    for (int k = 0; k < opt.uncertain; ++k) s.true_capacities(k) = net.edges[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])].capacity;
    s.data.network = std::move(net);
    const Index m = z0.z.size();
    s.data.observations.resize(opt.replicates, m);
    for (Index r = 0; r < opt.replicates; ++r)
      for (Index e = 0; e < m; ++e) s.data.observations(r, e) = z0.z(e) + opt.noise_sd * std_normal(rng);
    return s;
  }
  throw InvalidInput("gen_flow_network: no usable graph after 1000 attempts");
}

struct CoxGenOptions {
  Index n = 500;
  double lambda0 = 0.8;
  std::vector<double> edges{0.0, 0.25, 0.5, 1.0, 2.0};  // start of each baseline piece; last extends to +inf
  std::vector<double> rates{1.0, 0.6, 1.2, 0.8, 0.5};
  int intervals = 5;  // for the fitted model's quantile edges
};

/// Survival time for one subject by inverting the cumulative hazard
/// e^{λx} ∫₀ᵗ ζ₀ at an Exp(1) draw.
inline double cox_inverse_hazard(double target, double mult, const std::vector<double>& edges, const std::vector<double>& rates) {
  double acc = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    const double lo = edges[j];
    const double hi = j + 1 < edges.size() ? edges[j + 1] : std::numeric_limits<double>::infinity();
    const double h = mult * rates[j];
    if (acc + h * (hi - lo) >= target) return lo + (target - acc) / h;
    acc += h * (hi - lo);
  }
  throw InvalidInput("cox generator: cumulative hazard is bounded");
}

struct CoxStudy {
  VectorXd times, covariates;
};

inline CoxStudy gen_cox_data(const CoxGenOptions& opt, std::uint64_t seed) {
  if (opt.n < 1 || opt.rates.empty() || opt.rates.size() != opt.edges.size() || opt.edges.front() != 0.0)
    throw InvalidInput("gen_cox_data: invalid baseline hazard");
  for (double r : opt.rates)
    if (!(r > 0.0)) throw InvalidInput("gen_cox_data: rates must be positive");
  Rng rng = make_rng(seed, 2);
  CoxStudy s;
  s.times.resize(opt.n);
  s.covariates.resize(opt.n);
  for (Index i = 0; i < opt.n; ++i) {
    s.covariates(i) = std_normal(rng);
    s.times(i) = cox_inverse_hazard(std_exponential(rng), std::exp(opt.lambda0 * s.covariates(i)), opt.edges, opt.rates);
  }
  return s;
}

struct HarmonizationGenOptions {
  int subjects = 20;
  int regions = 24;
  std::vector<int> communities{2, 3};  // per group
  double within_weight = 1.0;          // mean edge weight inside a community
  double noise_weight = 0.005;         // mean weight of a cross-community edge
  double noise_density = 0.3;          // probability of a cross-community edge
  double scale_sd = 0.8;               // subject-level log-scale spread
};

/// Block-diagonal generator for a group: complete graphs on `k` equal-size
/// contiguous communities with unit weights.
inline MatrixXd planted_adjacency(int regions, int k) {
  MatrixXd a = MatrixXd::Zero(regions, regions);
  for (int i = 0; i < regions; ++i)
    for (int j = 0; j < regions; ++j)
      if (i != j && (i * k) / regions == (j * k) / regions) a(i, j) = 1.0;
  return a;
}

/// Two planted groups alternating over subjects. A subject's adjacency has
/// its group's community blocks with weights within_weight·U(0.5, 1.5), sparse
/// cross-community edges of weight noise_weight·U(0, 2), and one overall
/// factor exp(scale_sd·N(0,1)).
inline HarmonizationData gen_harmonization_synthetic(const HarmonizationGenOptions& opt, std::uint64_t seed) {
  if (opt.subjects < 2 || opt.regions < 4) throw InvalidInput("gen_harmonization_synthetic: need S ≥ 2 and R ≥ 4");
  if (opt.communities.size() != 2) throw InvalidInput("gen_harmonization_synthetic: two groups expected");
  for (int k : opt.communities)
    if (k < 1 || k > opt.regions / 2) throw InvalidInput("gen_harmonization_synthetic: invalid community count");
  Rng rng = make_rng(seed, 3);
  HarmonizationData d;
  const int r = opt.regions;
  for (int s = 0; s < opt.subjects; ++s) {
    const int g = s % 2;
    const MatrixXd block = planted_adjacency(r, opt.communities[static_cast<std::size_t>(g)]);
    const double scale = std::exp(opt.scale_sd * std_normal(rng));
    MatrixXd a = MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < i; ++j) {
        double w = 0.0;
        if (block(i, j) > 0.0) w = opt.within_weight * (0.5 + uniform01(rng));
        else if (uniform01(rng) < opt.noise_density) w = opt.noise_weight * 2.0 * uniform01(rng);
        a(i, j) = a(j, i) = scale * w;
      }
    d.laplacians.push_back(laplacian_from_adjacency(a));
    d.groups.push_back(g);
  }
  return d;
}

/// Two Gaussian classes in the plane, alternating −1, +1 by row, with class
/// means ±separation on the first axis. The unlabeled rows are spread evenly.
inline BmmcData gen_bmmc_toy(Index labeled, Index unlabeled, std::uint64_t seed, double separation = 0.8) {
  if (labeled < 2 || unlabeled < 0) throw InvalidInput("gen_bmmc_toy: need at least two labeled points");
  const Index n = labeled + unlabeled;
  Rng rng = make_rng(seed, 5);
  BmmcData d;
  d.x.resize(n, 2);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double s = i % 2 ? 1.0 : -1.0;
    d.x(i, 0) = separation * s + std_normal(rng);
    d.x(i, 1) = std_normal(rng);
    d.y(i) = s;
  }
  for (Index j = 0; j < unlabeled; ++j) d.unlabeled.push_back((2 * j + 1) * n / (2 * unlabeled));
  return d;
}

/// Hides the labels of `men` randomly chosen rows with sex == 1 and `women`
/// with sex == 0. Returns sorted row indices.
inline std::vector<Index> mask_by_sex(const VectorXd& sex, int men, int women, std::uint64_t seed) {
  std::vector<Index> m, w;
  for (Index i = 0; i < sex.size(); ++i) (sex(i) == 1.0 ? m : w).push_back(i);
  if (men > static_cast<int>(m.size()) || women > static_cast<int>(w.size()))
    throw InvalidInput("mask: not enough rows of each sex");
  Rng rng = make_rng(seed, 4);
  std::shuffle(m.begin(), m.end(), rng);
  std::shuffle(w.begin(), w.end(), rng);
  std::vector<Index> out(m.begin(), m.begin() + men);
  out.insert(out.end(), w.begin(), w.begin() + women);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bridged
