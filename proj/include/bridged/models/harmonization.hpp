#pragma once

// Multi-subject graph harmonization. Each observed Laplacian L_s is projected
// onto the nuclear-norm-penalized Laplacian set at a grid value λ̃_s; the
// likelihood couples subjects through pairwise geodesic distances:
//   Π_s (σ²)^{-1/2} exp{−‖L_s − Z_s‖²/(2σ²)} (λ̃_s/σ²) exp{−λ̃_s‖Z_s‖_*/σ²}
//   × Π_s τ^{-1/2} exp{−Σ_{k≠s} dist²(Z_k, Z_s)/(2τ(S−1))}.

#include <cmath>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/inner/laplacian_admm.hpp"
#include "bridged/numerics/spd.hpp"
#include "bridged/random.hpp"
#include "bridged/stats.hpp"

namespace bridged {

struct HarmonizationData {
  std::vector<MatrixXd> laplacians;
  std::vector<int> groups;  // optional; used only for evaluation

  Index subjects() const noexcept { return static_cast<Index>(laplacians.size()); }

  void validate() const {
    if (laplacians.size() < 2) throw InvalidInput("harmonization: need at least two subjects");
    const Index r = laplacians.front().rows();
    for (const auto& l : laplacians) {
      if (l.rows() != r || l.cols() != r) throw InvalidInput("harmonization: Laplacians differ in size");
      if (!is_graph_laplacian(l, 1e-8)) throw InvalidInput("harmonization: input is not a graph Laplacian");
    }
    if (!groups.empty() && groups.size() != laplacians.size()) throw InvalidInput("harmonization: group labels misaligned");
  }
};

/// Ten values equally spaced in (0, 5].
inline std::vector<double> default_harmonization_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 10; ++k) g.push_back(0.5 * k);
  return g;
}

struct HarmonizationPriors {
  double sigma2_shape = 2.0, sigma2_scale = 1.0;
  double tau_shape = 2.0, tau_scale = 1.0;
};

/// Everything the sampler needs, computed once: per (subject, grid value) the
/// projection Z, its fit ‖L − Z‖_F², its nuclear norm, and all pairwise
/// squared geodesic distances between projections.
class ProjectionTable {
 public:
  ProjectionTable(const HarmonizationData& data, std::vector<double> grid, const AdmmOptions& admm = {},
                  double geodesic_eta = kDefaultGeodesicEta)
      : grid_(std::move(grid)), s_(data.subjects()), g_(static_cast<Index>(grid_.size())) {
    data.validate();
    if (grid_.empty()) throw InvalidInput("harmonization: empty grid");
    for (double v : grid_)
      if (!(v > 0.0)) throw InvalidInput("harmonization: grid values must be positive");
    fit_.resize(s_, g_);
    nuclear_.resize(s_, g_);
    std::vector<ShiftedFactor> factors;
    factors.reserve(static_cast<std::size_t>(s_ * g_));
    for (Index s = 0; s < s_; ++s)
      for (Index g = 0; g < g_; ++g) {
        const auto& l = data.laplacians[static_cast<std::size_t>(s)];
        LaplacianProjection p = laplacian_projection_admm(l, grid_[static_cast<std::size_t>(g)], admm);
        fit_(s, g) = (l - p.low_rank).squaredNorm();
        nuclear_(s, g) = nuclear_norm(p.low_rank);
        factors.emplace_back(p.low_rank, geodesic_eta);
        projections_.push_back(std::move(p.low_rank));
      }
    const Index m = s_ * g_;
    dist2_ = MatrixXd::Zero(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < a; ++b) {
        if (a / g_ == b / g_) continue;  // same subject: never used
        const double d = geodesic_distance(factors[static_cast<std::size_t>(a)], factors[static_cast<std::size_t>(b)]);
        dist2_(a, b) = dist2_(b, a) = d * d;
      }
  }

  Index subjects() const noexcept { return s_; }
  Index grid_size() const noexcept { return g_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  double fit(Index s, Index g) const { return fit_(s, g); }
  double nuclear(Index s, Index g) const { return nuclear_(s, g); }
  const MatrixXd& projection(Index s, Index g) const { return projections_[static_cast<std::size_t>(s * g_ + g)]; }
  double dist2(Index s, Index gs, Index k, Index gk) const { return dist2_(s * g_ + gs, k * g_ + gk); }

  void check(const std::vector<int>& idx) const {
    if (static_cast<Index>(idx.size()) != s_) throw InvalidInput("harmonization: one grid index per subject required");
    for (int g : idx)
      if (g < 0 || g >= g_) throw InvalidInput("harmonization: grid index out of range");
  }

  /// Σ_{k≠s} dist²(Z_k, Z_s)/(S−1) at the given assignment.
  double mean_dist2(Index s, const std::vector<int>& idx) const {
    double t = 0.0;
    for (Index k = 0; k < s_; ++k)
      if (k != s) t += dist2(s, idx[static_cast<std::size_t>(s)], k, idx[static_cast<std::size_t>(k)]);
    return t / static_cast<double>(s_ - 1);
  }

  /// Posterior-mean-ready S×S matrix of distances at an assignment.
  MatrixXd distance_matrix(const std::vector<int>& idx) const {
    MatrixXd d = MatrixXd::Zero(s_, s_);
    for (Index a = 0; a < s_; ++a)
      for (Index b = 0; b < a; ++b)
        d(a, b) = d(b, a) = std::sqrt(dist2(a, idx[static_cast<std::size_t>(a)], b, idx[static_cast<std::size_t>(b)]));
    return d;
  }

 private:
  std::vector<double> grid_;
  Index s_, g_;
  MatrixXd fit_, nuclear_, dist2_;
  std::vector<MatrixXd> projections_;
};

/// The pairwise (second) factor of the likelihood, in logs.
inline double harmonization_pairwise_term(const std::vector<int>& idx, double tau, const ProjectionTable& t) {
  double s = 0.0;
  for (Index k = 0; k < t.subjects(); ++k) s += -0.5 * std::log(tau) - t.mean_dist2(k, idx) / (2.0 * tau);
  return s;
}

inline double harmonization_log_kernel(const std::vector<int>& idx, double sigma2, double tau, const ProjectionTable& t,
                                       const HarmonizationPriors& pr = {}) {
  t.check(idx);
  if (!(sigma2 > 0.0) || !(tau > 0.0)) throw InvalidInput("harmonization: sigma2 and tau must be positive");
  double v = 0.0;
  for (Index s = 0; s < t.subjects(); ++s) {
    const int g = idx[static_cast<std::size_t>(s)];
    const double lt = t.grid()[static_cast<std::size_t>(g)];
    v += -0.5 * std::log(sigma2) - t.fit(s, g) / (2.0 * sigma2) + std::log(lt / sigma2) - lt * t.nuclear(s, g) / sigma2;
  }
  v += harmonization_pairwise_term(idx, tau, t);
  v += stats::inverse_gamma_log_pdf(sigma2, pr.sigma2_shape, pr.sigma2_scale);
  v += stats::inverse_gamma_log_pdf(tau, pr.tau_shape, pr.tau_scale);
  return v;
}

/// Log kernel as a function of subject s's grid index alone, up to terms that
/// do not involve it. Each dist²(Z_s, Z_k) appears in both D_s and D_k.
inline double harmonization_log_conditional(Index s, int g, const std::vector<int>& idx, double sigma2, double tau,
                                            const ProjectionTable& t) {
  const double lt = t.grid()[static_cast<std::size_t>(g)];
  double pair = 0.0;
  for (Index k = 0; k < t.subjects(); ++k)
    if (k != s) pair += t.dist2(s, g, k, idx[static_cast<std::size_t>(k)]);
  return -t.fit(s, g) / (2.0 * sigma2) + std::log(lt) - lt * t.nuclear(s, g) / sigma2 -
         pair / (tau * static_cast<double>(t.subjects() - 1));
}

/// Conjugate full conditionals: σ² ~ IG(a + 3S/2, b + ΣF/2 + Σλ̃N),
/// τ ~ IG(a + S/2, b + ΣD_s/2).
inline double harmonization_draw_sigma2(const std::vector<int>& idx, const ProjectionTable& t,
                                        const HarmonizationPriors& pr, Rng& rng) {
  double rate = pr.sigma2_scale;
  for (Index s = 0; s < t.subjects(); ++s) {
    const int g = idx[static_cast<std::size_t>(s)];
    rate += 0.5 * t.fit(s, g) + t.grid()[static_cast<std::size_t>(g)] * t.nuclear(s, g);
  }
  return inverse_gamma_draw(pr.sigma2_shape + 1.5 * static_cast<double>(t.subjects()), rate, rng);
}

inline double harmonization_draw_tau(const std::vector<int>& idx, const ProjectionTable& t,
                                     const HarmonizationPriors& pr, Rng& rng) {
  double rate = pr.tau_scale;
  for (Index s = 0; s < t.subjects(); ++s) rate += 0.5 * t.mean_dist2(s, idx);
  return inverse_gamma_draw(pr.tau_shape + 0.5 * static_cast<double>(t.subjects()), rate, rng);
}

/// Number of (numerically) zero eigenvalues, i.e. connected components.
inline int community_count(const MatrixXd& laplacian, double rel_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (laplacian + laplacian.transpose()), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int c = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) <= rel_tol * scale) ++c;
  return c;
}

}  // namespace bridged
