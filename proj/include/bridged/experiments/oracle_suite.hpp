#pragma once

// Closed-form and brute-force checks of the inner solvers and model kernels.
// Each check reports the observed worst deviation next to its tolerance.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bridged/inner.hpp"
#include "bridged/models.hpp"
#include "bridged/numerics.hpp"

namespace bridged {

struct OracleCheck {
  std::string name;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct OracleFaults {
  bool dual_sign = false;  // negate ẑ = −Qα̂ before the primal is evaluated
};

namespace oracle {

inline MatrixXd gaussian_matrix(Index r, Index c, Rng& rng) {
  MatrixXd m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = std_normal(rng);
  return m;
}

inline LqeData lqe_instance(Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x0a);
  LqeData d;
  d.x.resize(n, 1);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.x(i, 0) = -6.0 + 12.0 * uniform01(rng);
    d.y(i) = uniform01(rng) < stats::sigmoid(std::cos(d.x(i, 0))) ? 1.0 : 0.0;
  }
  return d;
}

template <class M>
double envelope_fd_error(const M& m, const VectorXd& lam) {
  const VectorXd g = envelope_subgradient(m, lam);
  double err = 0.0;
  for (Index j = 0; j < lam.size(); ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(lam(j)));
    VectorXd a = lam, b = lam;
    a(j) += h;
    b(j) -= h;
    const double fd = (log_kernel(m, a).log_kernel - log_kernel(m, b).log_kernel) / (2.0 * h);
    err = std::max(err, std::abs(fd - g(j)));
  }
  return err;
}

// Profile minus closed form, max spread over 20 random λ (n = 50, d = 3).
inline double t_regression_spread() {
  Rng rng = make_rng(701);
  const Index n = 50, d = 3;
  const MatrixXd x = gaussian_matrix(n, d, rng);
  const VectorXd y = x * VectorXd::Constant(d, 0.5) + gaussian_matrix(n, 1, rng);
  const double v = 4.0;
  double lo = INFINITY, hi = -INFINITY;
  for (int r = 0; r < 20; ++r) {
    const VectorXd lam = 2.0 * gaussian_matrix(d, 1, rng);
    const auto k = t_regression_oracle(lam, y, x, v);
    lo = std::min(lo, k.profile - k.closed_form);
    hi = std::max(hi, k.profile - k.closed_form);
  }
  return hi - lo;
}

inline double factor_model_spread() {
  Rng rng = make_rng(702);
  const Index n = 50, p = 3;
  const MatrixXd c = gaussian_matrix(n, p, rng);
  const VectorXd y = gaussian_matrix(n, 1, rng);
  double lo = INFINITY, hi = -INFINITY;
  for (int r = 0; r < 20; ++r) {
    const MatrixXd a = gaussian_matrix(p, p, rng);
    MatrixXd g = a * a.transpose();
    g.diagonal().array() += 0.2;
    const double s2 = 0.2 + 2.0 * uniform01(rng);
    const auto k = factor_model_oracle(g, s2, y, c);
    lo = std::min(lo, k.profile - k.closed_form);
    hi = std::max(hi, k.profile - k.closed_form);
  }
  return hi - lo;
}

// Largest primal-dual gap g(ẑ) − g†(α̂) over n ∈ {10, 100, 500}, primal by
// an explicit solve against Q.
inline double lqe_duality_gap(const OracleFaults& f) {
  double worst = 0.0;
  std::uint64_t seed = 703;
  for (Index n : {10, 100, 500}) {
    const LqeData d = lqe_instance(n, seed++);
    const LqeModel m(d);
    VectorXd lam(2);
    lam << 1.3, 2.0;
    // Small ridge keeps the explicit Q⁻¹ solve well conditioned.
    const SymMatrix q = SymMatrix::symmetrized(m.covariance(lam).matrix() + 1e-6 * MatrixXd::Identity(n, n));
    const LqeSolution s = dual_ascent_lqe(d.y, q);
    const VectorXd z = f.dual_sign ? VectorXd(-s.z) : s.z;
    worst = std::max(worst, std::abs(lqe_primal_objective(z, d.y, q) - lqe_dual_objective(s.dual, d.y, q)));
  }
  return worst;
}

// −g(ẑ) and −g†(α̂) are two routes to the same log kernel, so their
// difference must not depend on λ.
inline double lqe_dual_constancy(const OracleFaults& f) {
  const LqeData d = lqe_instance(40, 706);
  const LqeModel m(d);
  Rng rng = make_rng(707);
  double lo = INFINITY, hi = -INFINITY;
  for (int r = 0; r < 20; ++r) {
    VectorXd lam(2);
    lam << 0.3 + 2.0 * uniform01(rng), 0.5 + 4.0 * uniform01(rng);
    const SymMatrix q = SymMatrix::symmetrized(m.covariance(lam).matrix() + 1e-6 * MatrixXd::Identity(40, 40));
    const LqeSolution s = dual_ascent_lqe(d.y, q);
    const VectorXd z = f.dual_sign ? VectorXd(-s.z) : s.z;
    const double diff = lqe_primal_objective(z, d.y, q) - lqe_dual_objective(s.dual, d.y, q);
    lo = std::min(lo, diff);
    hi = std::max(hi, diff);
  }
  return hi - lo;
}

inline std::vector<VectorXd> propriety_grid() {
  std::vector<VectorXd> grid;
  for (double tau : {0.1, 0.5, 1.0, 2.0, 5.0})
    for (double b : {0.2, 1.0, 4.0, 20.0}) {
      VectorXd l(2);
      l << tau, b;
      grid.push_back(l);
    }
  return grid;
}

inline double propriety_violations() {
  const LqeModel m(lqe_instance(100, 708));
  const auto rep = propriety_dual_bound_check(m, default_dual_envelope(m.data().y), propriety_grid());
  return rep.points.size() == 20 ? rep.violations : 20.0;
}

inline double lqe_envelope_error() {
  const LqeModel m(lqe_instance(60, 709));
  Rng rng = make_rng(710);
  double worst = 0.0;
  for (int r = 0; r < 10; ++r) {
    VectorXd lam(2);
    lam << 0.2 + 2.0 * uniform01(rng), 0.3 + 4.0 * uniform01(rng);
    worst = std::max(worst, envelope_fd_error(m, lam));
  }
  return worst;
}

inline CoxDesign cox_instance(Index n, std::uint64_t seed, double lambda0) {
  Rng rng = make_rng(seed, 0x0c);
  VectorXd t(n), x(n);
  for (Index i = 0; i < n; ++i) {
    x(i) = std_normal(rng);
    t(i) = std_exponential(rng) * std::exp(-lambda0 * x(i));
  }
  return CoxDesign(t, x, CoxDesign::quantile_edges(t, 5));
}

inline double cox_envelope_error() {
  const CoxModel m(cox_instance(200, 711, 0.8));
  Rng rng = make_rng(712);
  double worst = 0.0;
  for (int r = 0; r < 10; ++r) worst = std::max(worst, envelope_fd_error(m, VectorXd::Constant(1, -1.0 + 3.0 * uniform01(rng))));
  return worst;
}

// Single interval: ẑ = n/Σt and ℓ = n(log(n/Σt) − 1) at λ = 0.
inline double cox_closed_form_error() {
  Rng rng = make_rng(713);
  const Index n = 40;
  VectorXd t(n), x(n);
  for (Index i = 0; i < n; ++i) {
    t(i) = std_exponential(rng);
    x(i) = std_normal(rng);
  }
  const CoxProfile p = cox_profile_hazard(t, x, 0.0, {0.0, INFINITY});
  const double nd = static_cast<double>(n);
  return std::max(std::abs(p.z(0) - nd / t.sum()), std::abs(p.objective - nd * (std::log(nd / t.sum()) - 1.0)));
}

inline double svm_duality_gap() {
  Rng rng = make_rng(714);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 40;
    const MatrixXd x = gaussian_matrix(n, 3, rng);
    VectorXd y(n);
    for (Index i = 0; i < n; ++i) y(i) = x(i, 0) + 0.8 * std_normal(rng) > 0.0 ? 1.0 : -1.0;
    y(0) = 1.0;
    y(1) = -1.0;
    const double lambda = 0.2 + 2.0 * uniform01(rng);
    const SvmSolution s = svm_dual_solve(x, y, lambda);
    worst = std::max(worst, std::abs(s.objective - s.dual_value) / (1.0 + std::abs(s.objective)));
  }
  return worst;
}

// Max flow against the minimum over all 2^(n−2) source-sink cuts.
inline double max_flow_min_cut_error() {
  Rng rng = make_rng(715);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    FlowNetwork net;
    net.nodes = 7;
    net.source = 0;
    net.sink = 6;
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j)
        if (i != j && uniform01(rng) < 0.35) net.edges.push_back({i, j, std::floor(1.0 + 9.0 * uniform01(rng))});
    VectorXd caps(static_cast<Index>(net.edges.size()));
    for (std::size_t k = 0; k < net.edges.size(); ++k) caps(static_cast<Index>(k)) = net.edges[k].capacity;
    const auto s = max_flow_with_capacities(net, caps);
    double cut = INFINITY;
    for (unsigned mask = 0; mask < (1u << 7); ++mask) {
      if (!(mask & 1u) || (mask >> 6 & 1u)) continue;
      double c = 0.0;
      for (const auto& e : net.edges)
        if ((mask >> e.from & 1u) && !(mask >> e.to & 1u)) c += e.capacity;
      cut = std::min(cut, c);
    }
    VectorXd balance = VectorXd::Zero(7);
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
      balance(net.edges[k].from) -= s.z(static_cast<Index>(k));
      balance(net.edges[k].to) += s.z(static_cast<Index>(k));
    }
    worst = std::max({worst, std::abs(s.objective - cut), balance.segment(1, 5).cwiseAbs().maxCoeff()});
  }
  return worst;
}

// At a vanishing penalty the projection returns its input.
inline double admm_recovery_error() {
  Rng rng = make_rng(716);
  MatrixXd a = MatrixXd::Zero(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.2 + uniform01(rng);
  const MatrixXd l = laplacian_from_adjacency(a);
  AdmmOptions opt;
  opt.barrier = 1e-7;
  const LaplacianProjection p = laplacian_projection_admm(l, 1e-7, opt);
  return (p.z - l).norm();
}

// |mean − tanh(c/2)/(2c)| in units of the Monte Carlo standard error.
inline double polya_gamma_mean_z() {
  Rng rng = make_rng(717);
  double worst = 0.0;
  for (double c : {0.5, 2.0, 5.0}) {
    const int draws = 20000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double w = polya_gamma_sample(c, rng);
      s += w;
      s2 += w * w;
    }
    const double mean = s / draws, var = s2 / draws - mean * mean;
    worst = std::max(worst, std::abs(mean - std::tanh(0.5 * c) / (2.0 * c)) / std::sqrt(var / draws));
  }
  return worst;
}

}  // namespace oracle

inline OracleCheck run_oracle_check(const std::string& name, double tolerance, const std::function<double()>& f) {
  OracleCheck c;
  c.name = name;
  c.tolerance = tolerance;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.observed = f();
    c.pass = std::isfinite(c.observed) && c.observed <= tolerance;
  } catch (const std::exception&) {
    c.observed = INFINITY;
    c.pass = false;
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

inline std::vector<OracleCheck> run_oracle_suite(const OracleFaults& faults = {}) {
  using namespace oracle;
  return {
      run_oracle_check("t_regression_profile_constancy", 1e-8, t_regression_spread),
      run_oracle_check("factor_model_profile_constancy", 1e-8, factor_model_spread),
      run_oracle_check("lqe_primal_dual_constancy", 1e-8, [&] { return lqe_dual_constancy(faults); }),
      run_oracle_check("lqe_duality_gap", 1e-8, [&] { return lqe_duality_gap(faults); }),
      run_oracle_check("lqe_dual_envelope_violations", 0.0, propriety_violations),
      run_oracle_check("lqe_envelope_gradient_fd", 1e-4, lqe_envelope_error),
      run_oracle_check("cox_envelope_gradient_fd", 1e-4, cox_envelope_error),
      run_oracle_check("cox_single_interval_closed_form", 1e-10, cox_closed_form_error),
      run_oracle_check("svm_duality_gap", 1e-6, svm_duality_gap),
      run_oracle_check("max_flow_min_cut", 1e-12, max_flow_min_cut_error),
      run_oracle_check("admm_vanishing_penalty", 1e-3, admm_recovery_error),
      run_oracle_check("polya_gamma_mean_z", 4.0, polya_gamma_mean_z),
  };
}

}  // namespace bridged
