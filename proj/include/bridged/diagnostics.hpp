#pragma once

// Chain and experiment diagnostics: autocorrelation, effective sample size,
// Kolmogorov–Smirnov distances, ROC AUC, spectral clustering and an empirical
// Bernstein–von Mises check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/numerics/linalg.hpp"
#include "bridged/random.hpp"
#include "bridged/samplers/trace.hpp"
#include "bridged/stats.hpp"

namespace bridged {

namespace detail {

inline double centered_sum_squares(const VectorXd& x, double mean) { return (x.array() - mean).square().sum(); }

}  // namespace detail

/// Autocorrelations at lags 0..maxlag with the biased 1/N normalization.
inline VectorXd acf(const VectorXd& x, Index maxlag) {
  const Index n = x.size();
  if (maxlag < 0 || maxlag >= n) throw InvalidInput("acf: need 0 ≤ maxlag < length");
  const double m = x.mean();
  const VectorXd c = x.array() - m;
  const double c0 = c.squaredNorm();
  if (!(c0 > 0.0)) throw InvalidInput("acf: series has zero variance");
  VectorXd r(maxlag + 1);
  r(0) = 1.0;
  for (Index k = 1; k <= maxlag; ++k) r(k) = c.head(n - k).dot(c.tail(n - k)) / c0;
  return r;
}

/// Geyer's initial-positive-sequence estimate. The integrated autocorrelation
/// time is floored at 1/log10(N), which bounds the estimate for strongly
/// antithetic chains.
inline double ess(const VectorXd& x) {
  const Index n = x.size();
  if (n < 100) throw InvalidInput("ess: need at least 100 draws");
  const double m = x.mean();
  const VectorXd c = x.array() - m;
  const double c0 = c.squaredNorm();
  if (!(c0 > 0.0)) throw InvalidInput("ess: series has zero variance");
  auto rho = [&](Index k) { return c.head(n - k).dot(c.tail(n - k)) / c0; };
  double tau = -1.0;
  for (Index k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (k == 0 ? 1.0 : rho(2 * k)) + rho(2 * k + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
  return static_cast<double>(n) / tau;
}

/// sup_x |F_a(x) − F_b(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

inline double ks_two_sample(const VectorXd& a, const VectorXd& b) {
  return ks_two_sample(std::vector<double>(a.data(), a.data() + a.size()),
                       std::vector<double>(b.data(), b.data() + b.size()));
}

/// One-sample KS distance against a continuous CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> x, Cdf&& cdf) {
  if (x.empty()) throw InvalidInput("ks: sample must be nonempty");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

/// KS distance of (x − mean)/sd against the standard normal.
inline double ks_standardized_normal(const VectorXd& x) {
  const double m = x.mean();
  const double sd = std::sqrt(detail::centered_sum_squares(x, m) / static_cast<double>(x.size() - 1));
  if (!(sd > 0.0)) throw InvalidInput("ks: series has zero variance");
  std::vector<double> z(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) z[static_cast<std::size_t>(i)] = (x(i) - m) / sd;
  return ks_one_sample(std::move(z), [](double v) { return stats::normal_cdf(v); });
}

/// Mann–Whitney AUC with midranks for ties. Labels are 0/1.
inline double auc_roc(const VectorXd& scores, const VectorXd& labels) {
  const Index n = scores.size();
  if (labels.size() != n) throw InvalidInput("auc: scores and labels differ in length");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) < scores(b); });
  std::vector<double> rank(static_cast<std::size_t>(n));
  for (Index i = 0; i < n;) {
    Index j = i;
    while (j + 1 < n && scores(order[static_cast<std::size_t>(j + 1)]) == scores(order[static_cast<std::size_t>(i)])) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index k = i; k <= j; ++k) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = mid;
    i = j + 1;
  }
  double pos = 0.0, sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (labels(i) != 0.0 && labels(i) != 1.0) throw InvalidInput("auc: labels must be 0 or 1");
    if (labels(i) == 1.0) {
      pos += 1.0;
      sum += rank[static_cast<std::size_t>(i)];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw InvalidInput("auc: both classes must be present");
  return (sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

/// Lloyd's k-means with k-means++ seeding; best of `restarts` by inertia.
inline std::vector<int> kmeans(const MatrixXd& pts, int k, int restarts, Rng& rng) {
  const Index n = pts.rows();
  if (k < 1 || k > n) throw InvalidInput("kmeans: need 1 ≤ k ≤ number of points");
  std::vector<int> best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    MatrixXd centers(k, pts.cols());
    centers.row(0) = pts.row(static_cast<Index>(uniform01(rng) * static_cast<double>(n)) % n);
    VectorXd d2 = (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      double u = uniform01(rng) * d2.sum();
      Index pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        if (u < d2(i)) {
          pick = i;
          break;
        }
        u -= d2(i);
      }
      centers.row(c) = pts.row(pick);
      d2 = d2.cwiseMin((pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    std::vector<int> lab(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int it = 0; it < 300; ++it) {
      bool changed = false;
      inertia = 0.0;
      for (Index i = 0; i < n; ++i) {
        Index arg;
        inertia += (centers.rowwise() - pts.row(i)).rowwise().squaredNorm().minCoeff(&arg);
        if (lab[static_cast<std::size_t>(i)] != static_cast<int>(arg)) {
          lab[static_cast<std::size_t>(i)] = static_cast<int>(arg);
          changed = true;
        }
      }
      if (!changed) break;
      for (int c = 0; c < k; ++c) {
        Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(pts.cols());
        int cnt = 0;
        for (Index i = 0; i < n; ++i)
          if (lab[static_cast<std::size_t>(i)] == c) {
            s += pts.row(i);
            ++cnt;
          }
        if (cnt) centers.row(c) = s / cnt;
      }
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = lab;
    }
  }
  return best;
}

/// Spectral clustering of a distance matrix: Gaussian affinity with the
/// median off-diagonal distance as bandwidth, symmetric normalized Laplacian,
/// its k smallest eigenvectors, then k-means with 20 seeded restarts.
inline std::vector<int> spectral_cluster(const MatrixXd& dist, int k, std::uint64_t seed) {
  const Index n = dist.rows();
  if (dist.cols() != n || n < k) throw InvalidInput("spectral_cluster: need a square matrix with at least k rows");
  if (!dist.allFinite() || (dist.array() < 0.0).any() || (dist - dist.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + dist.cwiseAbs().maxCoeff()) ||
      dist.diagonal().cwiseAbs().maxCoeff() > 0.0)
    throw InvalidInput("spectral_cluster: distances must be symmetric, nonnegative, with zero diagonal");
  std::vector<double> off;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) off.push_back(dist(i, j));
  std::nth_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(off.size() / 2), off.end());
  double med = off[off.size() / 2];
  if (off.size() % 2 == 0) {
    const double lower = *std::max_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(off.size() / 2));
    med = 0.5 * (med + lower);
  }
  if (!(med > 0.0)) med = 1.0;
  MatrixXd w = (-dist.array().square() / (2.0 * med * med)).exp();
  w.diagonal().setZero();
  const VectorXd dinv = w.rowwise().sum().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  MatrixXd lap = -(dinv.asDiagonal() * w * dinv.asDiagonal());
  lap.diagonal().array() += 1.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (lap + lap.transpose()));
  if (es.info() != Eigen::Success) throw DecompositionError("spectral_cluster: eigendecomposition failed", -1);
  Rng rng = make_rng(seed, 0x5c);
  return kmeans(es.eigenvectors().leftCols(k), k, 20, rng);
}

/// Fraction of agreement with `truth`, maximized over relabelings (k = 2).
inline double two_cluster_accuracy(const std::vector<int>& labels, const std::vector<int>& truth) {
  if (labels.size() != truth.size() || labels.empty()) throw InvalidInput("accuracy: label vectors differ in length");
  std::size_t same = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) same += (labels[i] == truth[i]);
  const double f = static_cast<double>(same) / static_cast<double>(labels.size());
  return std::max(f, 1.0 - f);
}

struct BvmEntry {
  double n = 0.0;
  std::vector<double> ks;        // per parameter, standardized vs N(0, 1)
  std::vector<double> variance;  // per parameter
};

struct BvmReport {
  std::vector<std::string> names;
  std::vector<BvmEntry> entries;
  std::vector<double> slope;  // least-squares slope of log variance on log n
};

inline BvmReport bvm_check(const std::vector<Trace>& traces, const std::vector<double>& n_values) {
  if (traces.size() != n_values.size() || traces.size() < 2) throw InvalidInput("bvm_check: need one trace per n, at least two");
  BvmReport r;
  r.names = traces.front().names;
  const Index d = traces.front().dim();
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const Trace& t = traces[k];
    if (t.dim() != d) throw InvalidInput("bvm_check: traces differ in dimension");
    BvmEntry e;
    e.n = n_values[k];
    for (Index j = 0; j < d; ++j) {
      const VectorXd x = t.samples.col(j);
      e.ks.push_back(ks_standardized_normal(x));
      e.variance.push_back(detail::centered_sum_squares(x, x.mean()) / static_cast<double>(x.size() - 1));
    }
    r.entries.push_back(std::move(e));
  }
  for (Index j = 0; j < d; ++j) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(r.entries.size());
    for (const auto& e : r.entries) {
      const double lx = std::log(e.n), ly = std::log(e.variance[static_cast<std::size_t>(j)]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    r.slope.push_back((m * sxy - sx * sy) / (m * sxx - sx * sx));
  }
  return r;
}

struct ParameterSummary {
  std::string name;
  double mean = 0.0, variance = 0.0, ess = 0.0, ess_per_10s = 0.0;
  double ks_normal = std::numeric_limits<double>::quiet_NaN();
};

struct SummaryReport {
  std::vector<ParameterSummary> parameters;
  double acceptance = 0.0;
  double seconds = 0.0;
  int solver_failures = 0;
};

/// Per-parameter summaries. ESS is capped at the number of draws here.
inline SummaryReport summarize(const Trace& t, bool with_ks = false) {
  SummaryReport r;
  r.acceptance = t.acceptance;
  r.seconds = t.seconds;
  r.solver_failures = t.solver_failures;
  for (Index j = 0; j < t.dim(); ++j) {
    const VectorXd x = t.samples.col(j);
    ParameterSummary p;
    p.name = t.names[static_cast<std::size_t>(j)];
    p.mean = x.mean();
    p.variance = x.size() > 1 ? detail::centered_sum_squares(x, p.mean) / static_cast<double>(x.size() - 1) : 0.0;
    if (x.size() >= 100 && p.variance > 0.0) {
      p.ess = std::min(ess(x), static_cast<double>(x.size()));
      if (t.seconds > 0.0) p.ess_per_10s = 10.0 * p.ess / t.seconds;
      if (with_ks) p.ks_normal = ks_standardized_normal(x);
    }
    r.parameters.push_back(std::move(p));
  }
  return r;
}

}  // namespace bridged
