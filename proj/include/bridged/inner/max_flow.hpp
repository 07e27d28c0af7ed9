#pragma once

// Shortest-augmenting-path maximum flow. Arcs are scanned in edge-index
// order, so the returned flow is a fixed function of the input.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/inner/solution.hpp"
#include "bridged/numerics/linalg.hpp"

namespace bridged {

struct FlowEdge {
  int from = 0;
  int to = 0;
  double capacity = 0.0;
};

struct FlowNetwork {
  int nodes = 0;
  std::vector<FlowEdge> edges;
  int source = 0;
  int sink = 1;
  std::vector<int> uncertain;  // indices into `edges` forming E*

  void validate() const {
    if (nodes < 2) throw InvalidInput("flow network needs at least two nodes");
    if (source < 0 || source >= nodes || sink < 0 || sink >= nodes || source == sink)
      throw InvalidInput("flow network source/sink invalid");
    for (const auto& e : edges) {
      if (e.from < 0 || e.from >= nodes || e.to < 0 || e.to >= nodes || e.from == e.to)
        throw InvalidInput("flow network edge endpoints invalid");
      if (!(e.capacity >= 0.0) || !std::isfinite(e.capacity)) throw InvalidInput("flow network capacity invalid");
    }
    std::vector<int> seen;
    for (int k : uncertain) {
      if (k < 0 || k >= static_cast<int>(edges.size())) throw InvalidInput("uncertain edge index out of range");
      if (std::find(seen.begin(), seen.end(), k) != seen.end()) throw InvalidInput("uncertain edge listed twice");
      seen.push_back(k);
    }
  }
};

/// Edge flows (z, in edge order) for the given capacities.
inline InnerSolution<VectorXd> max_flow_with_capacities(const FlowNetwork& net, const VectorXd& caps) {
  const int n = net.nodes;
  const int m = static_cast<int>(net.edges.size());
  // Arc 2k is edge k, arc 2k+1 its residual reverse.
  std::vector<int> head(2 * m);
  std::vector<double> resid(2 * m);
  for (int k = 0; k < m; ++k) {
    const auto& e = net.edges[static_cast<std::size_t>(k)];
    head[2 * k] = e.to;
    resid[2 * k] = caps(k);
    head[2 * k + 1] = e.from;
    resid[2 * k + 1] = 0.0;
  }
  // Adjacency lists in increasing arc order.
  std::vector<std::vector<int>> adj(n);
  for (int a = 0; a < 2 * m; ++a) adj[a % 2 == 0 ? net.edges[a / 2].from : net.edges[a / 2].to].push_back(a);

  double value = 0.0;
  int augmentations = 0;
  std::vector<int> pred(n);
  for (;;) {
    std::fill(pred.begin(), pred.end(), -1);
    std::queue<int> q;
    q.push(net.source);
    pred[net.source] = -2;
    while (!q.empty() && pred[net.sink] == -1) {
      const int u = q.front();
      q.pop();
      for (int a : adj[u]) {
        const int v = head[a];
        if (pred[v] == -1 && resid[a] > 0.0) {
          pred[v] = a;
          q.push(v);
        }
      }
    }
    if (pred[net.sink] == -1) break;
    double push = std::numeric_limits<double>::infinity();
    for (int v = net.sink; v != net.source; v = head[pred[v] ^ 1]) push = std::min(push, resid[pred[v]]);
    for (int v = net.sink; v != net.source; v = head[pred[v] ^ 1]) {
      resid[pred[v]] -= push;
      resid[pred[v] ^ 1] += push;
    }
    value += push;
    ++augmentations;
  }

  InnerSolution<VectorXd> sol;
  sol.z.resize(m);
  for (int k = 0; k < m; ++k) sol.z(k) = resid[2 * k + 1];
  sol.objective = value;
  sol.iterations = augmentations;
  sol.residual = 0.0;
  return sol;
}

/// Max flow with the E* capacities replaced by `lambda_caps`.
inline InnerSolution<VectorXd> max_flow_solve(const FlowNetwork& net, const VectorXd& lambda_caps) {
  net.validate();
  if (lambda_caps.size() != static_cast<Index>(net.uncertain.size()))
    throw InvalidInput("max_flow_solve: one capacity per uncertain edge required");
  VectorXd caps(static_cast<Index>(net.edges.size()));
  for (std::size_t k = 0; k < net.edges.size(); ++k) caps(static_cast<Index>(k)) = net.edges[k].capacity;
  for (std::size_t k = 0; k < net.uncertain.size(); ++k) {
    const double c = lambda_caps(static_cast<Index>(k));
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("max_flow_solve: capacities must be finite and positive");
    caps(net.uncertain[k]) = c;
  }
  return max_flow_with_capacities(net, caps);
}

}  // namespace bridged
