#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "bridged/models.hpp"
#include "bridged/samplers.hpp"
#include "support.hpp"

using namespace bridged;
using bridged::testing::batch_mean_se;

namespace {

// Kernel = N(0, 1) prior; no data.
struct StandardNormal {
  using Solution = InnerSolution<VectorXd>;
  ParamSpec param_spec() const { return {{"x"}, {Transform::identity}}; }
  double log_prior(const VectorXd& l) const { return -0.5 * l.squaredNorm(); }
  Solution solve(const VectorXd& l, const Solution*) const { return {l, 0.0, {}, 1, 0.0}; }
  double log_likelihood(const VectorXd&, const Solution&) const { return 0.0; }
};

// N(0, Σ) with the exact gradient as its envelope gradient.
struct Gaussian {
  using Solution = InnerSolution<VectorXd>;
  MatrixXd prec;
  ParamSpec param_spec() const { return {{"a", "b"}, {Transform::identity, Transform::identity}}; }
  double log_prior(const VectorXd& l) const { return -0.5 * l.dot(prec * l); }
  VectorXd log_prior_gradient(const VectorXd& l) const { return -prec * l; }
  Solution solve(const VectorXd& l, const Solution*) const { return {l, 0.0, {}, 0, 0.0}; }
  double log_likelihood(const VectorXd&, const Solution&) const { return 0.0; }
  VectorXd log_likelihood_gradient(const VectorXd& l, const Solution&) const { return VectorXd::Zero(l.size()); }
};

// Piecewise-constant density on three unit bins.
struct ThreeBins {
  using Solution = InnerSolution<VectorXd>;
  ParamSpec param_spec() const { return {{"x"}, {Transform::identity}}; }
  double log_prior(const VectorXd& l) const {
    const double x = l(0);
    if (x < 0.0 || x >= 3.0) return stats::kNegInf;
    return std::log(x < 1.0 ? 0.2 : x < 2.0 ? 0.5 : 0.3);
  }
  Solution solve(const VectorXd& l, const Solution*) const { return {l, 0.0, {}, 0, 0.0}; }
  double log_likelihood(const VectorXd&, const Solution&) const { return 0.0; }
};

// Inner solve fails to converge for λ > 1.
struct FailsAboveOne {
  using Solution = InnerSolution<VectorXd>;
  ParamSpec param_spec() const { return {{"x"}, {Transform::identity}}; }
  double log_prior(const VectorXd& l) const { return -0.5 * l.squaredNorm(); }
  Solution solve(const VectorXd& l, const Solution*) const {
    if (l(0) > 1.0) throw ConvergenceFailure("toy", 1.0, 10);
    return {l, 0.0, {}, 0, 0.0};
  }
  double log_likelihood(const VectorXd&, const Solution&) const { return 0.0; }
};

LqeData lqe_data(Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  LqeData d;
  d.x.resize(n, 1);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.x(i, 0) = -6.0 + 12.0 * uniform01(rng);
    d.y(i) = uniform01(rng) < stats::sigmoid(std::cos(d.x(i, 0))) ? 1.0 : 0.0;
  }
  return d;
}

VectorXd lqe_init() { return (VectorXd(2) << 1.0, 2.0).finished(); }

MatrixXd random_laplacian(Index r, double density, Rng& rng) {
  MatrixXd a = MatrixXd::Zero(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < i; ++j)
      if (uniform01(rng) < density) a(i, j) = a(j, i) = 0.5 + uniform01(rng);
  return laplacian_from_adjacency(a);
}

}  // namespace

// ---- random-walk Metropolis ------------------------------------------------

TEST(RwMetropolis, StandardNormalMoments) {
  Rng rng = make_rng(1);
  RwOptions opt;
  opt.iters = 12000;
  opt.burn_in = 2000;
  opt.adapt.initial_step = VectorXd::Constant(1, 1.0);
  const Trace tr = rw_metropolis(StandardNormal{}, VectorXd::Zero(1), opt, rng);
  ASSERT_EQ(tr.kept(), 10000);
  const VectorXd x = tr.samples.col(0);
  const VectorXd x2 = x.array().square().matrix();
  EXPECT_LT(std::abs(x.mean()), 3.0 * batch_mean_se(x));
  EXPECT_LT(std::abs(x2.mean() - 1.0), 3.0 * batch_mean_se(x2));
  EXPECT_GE(tr.acceptance, 0.0);
  EXPECT_LE(tr.acceptance, 1.0);
  EXPECT_EQ(tr.accepted.size(), 10000u);
  EXPECT_EQ(tr.inner_iterations.size(), 10000u);
}

TEST(RwMetropolis, SeedReproducibility) {
  RwOptions opt;
  opt.iters = 2000;
  opt.burn_in = 500;
  Rng a = make_rng(7), b = make_rng(7), c = make_rng(8);
  const Trace ta = rw_metropolis(StandardNormal{}, VectorXd::Zero(1), opt, a);
  const Trace tb = rw_metropolis(StandardNormal{}, VectorXd::Zero(1), opt, b);
  const Trace tc = rw_metropolis(StandardNormal{}, VectorXd::Zero(1), opt, c);
  EXPECT_TRUE(ta.samples == tb.samples);
  EXPECT_TRUE(ta.step == tb.step);
  EXPECT_FALSE(ta.samples == tc.samples);
}

TEST(RwMetropolis, DetailedBalanceOnThreeBins) {
  Rng rng = make_rng(3);
  RwOptions opt;
  opt.iters = 200000;
  opt.burn_in = 1000;
  opt.adapt.window_fraction = 0.0;
  opt.adapt.initial_step = VectorXd::Constant(1, 1.5);
  const Trace tr = rw_metropolis(ThreeBins{}, VectorXd::Constant(1, 1.5), opt, rng);
  EXPECT_EQ(tr.adaptation_window, 0);
  double n[3][3] = {};
  int occ[3] = {};
  for (Index t = 0; t + 1 < tr.kept(); ++t) {
    const int i = static_cast<int>(tr.samples(t, 0)), j = static_cast<int>(tr.samples(t + 1, 0));
    n[i][j] += 1.0;
    ++occ[i];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j) EXPECT_LE(std::abs(n[i][j] - n[j][i]), 4.0 * std::sqrt(n[i][j] + n[j][i])) << i << j;
  const double w[3] = {0.2, 0.5, 0.3};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(occ[i] / static_cast<double>(tr.kept() - 1), w[i], 0.02);
}

TEST(RwMetropolis, SolverFailuresAreRejectedAndCounted) {
  Rng rng = make_rng(4);
  RwOptions opt;
  opt.iters = 3000;
  opt.burn_in = 100;
  opt.adapt.initial_step = VectorXd::Constant(1, 1.0);
  const Trace tr = rw_metropolis(FailsAboveOne{}, VectorXd::Zero(1), opt, rng);
  EXPECT_GT(tr.solver_failures, 0);
  EXPECT_LE(tr.samples.maxCoeff(), 1.0);
  EXPECT_THROW(rw_metropolis(FailsAboveOne{}, VectorXd::Constant(1, 2.0), opt, rng), InvalidInput);
}

TEST(RwMetropolis, RejectsBadIterations) {
  Rng rng = make_rng(5);
  RwOptions opt;
  opt.iters = 100;
  opt.burn_in = 100;
  EXPECT_THROW(rw_metropolis(StandardNormal{}, VectorXd::Zero(1), opt, rng), InvalidInput);
}

TEST(StepAdapter, FrozenAfterWindow) {
  AdaptationConfig cfg;
  StepAdapter a(2, cfg, cfg.window(1000, 500));
  ASSERT_EQ(a.window(), 200);
  Rng rng = make_rng(6);
  VectorXd raw(2);
  for (int t = 0; t < 200; ++t) {
    raw << std_normal(rng), 3.0 * std_normal(rng);
    a.update(t, uniform01(rng), raw);
  }
  const VectorXd frozen = a.step();
  EXPECT_GT(frozen(1), frozen(0));  // shape follows the running SD
  for (int t = 200; t < 1000; ++t) {
    raw << std_normal(rng), std_normal(rng);
    a.update(t, uniform01(rng), raw);
    ASSERT_TRUE(a.step() == frozen);
  }
  EXPECT_EQ(cfg.window(1000, 100), 100);
}

TEST(RwMetropolis, LqeAcceptanceNearTarget) {
  const LqeModel m(lqe_data(200, 11));
  Rng rng = make_rng(12);
  RwOptions opt;
  opt.iters = 4000;
  opt.burn_in = 1000;
  const Trace tr = rw_metropolis(m, lqe_init(), opt, rng);
  EXPECT_GE(tr.acceptance, 0.25);
  EXPECT_LE(tr.acceptance, 0.35);
  EXPECT_EQ(tr.solver_failures, 0);
}

TEST(RwMetropolis, WarmAndColdSolvesAgreeAlongChain) {
  const LqeModel m(lqe_data(100, 13));
  Rng rng = make_rng(14);
  RwOptions opt;
  opt.iters = 500;
  opt.burn_in = 1;
  const Trace tr = rw_metropolis(m, lqe_init(), opt, rng);
  LqeSolution prev = m.solve(tr.samples.row(0).transpose(), nullptr);
  double worst = 0.0;
  for (Index t = 1; t < tr.kept(); ++t) {
    const VectorXd lam = tr.samples.row(t).transpose();
    const LqeSolution warm = m.solve(lam, &prev);
    const LqeSolution cold = m.solve(lam, nullptr);
    worst = std::max(worst, std::abs(warm.objective - cold.objective));
    prev = warm;
  }
  EXPECT_LE(worst, 10.0 * m.options().tol);
}

// ---- MALA ----------------------------------------------------------------------

TEST(Mala, GaussianTargetWithMatchedPreconditioner) {
  MatrixXd sigma(2, 2);
  sigma << 2.0, 0.8, 0.8, 1.0;
  Gaussian g{sigma.inverse()};
  MalaOptions opt;
  opt.iters = 11000;
  opt.burn_in = 1000;
  opt.tau = 0.5;
  opt.preconditioner = sigma;
  Rng rng = make_rng(21);
  const Trace tr = mala(g, VectorXd::Zero(2), opt, rng);
  EXPECT_GT(tr.acceptance, 0.5);
  for (Index j = 0; j < 2; ++j) {
    const VectorXd x = tr.samples.col(j);
    EXPECT_LT(std::abs(x.mean()), 3.0 * batch_mean_se(x));
  }
  const MatrixXd c = tr.samples.rowwise() - tr.samples.colwise().mean();
  const MatrixXd cov = c.transpose() * c / static_cast<double>(tr.kept() - 1);
  EXPECT_NEAR(cov(0, 0), 2.0, 0.2);
  EXPECT_NEAR(cov(0, 1), 0.8, 0.15);
}

TEST(Mala, SmallStepAcceptsAlmostAlways) {
  MatrixXd sigma = MatrixXd::Identity(2, 2);
  Gaussian g{sigma};
  MalaOptions opt;
  opt.iters = 2000;
  opt.burn_in = 100;
  opt.tau = 1e-6;
  Rng rng = make_rng(22);
  EXPECT_GT(mala(g, VectorXd::Ones(2), opt, rng).acceptance, 0.999);
  opt.preconditioner = -sigma;
  EXPECT_THROW(mala(g, VectorXd::Ones(2), opt, rng), InvalidInput);
}

TEST(Mala, AgreesWithRandomWalkOnLqe) {
  const LqeModel m(lqe_data(100, 23));
  Rng r1 = make_rng(24), r2 = make_rng(25);
  RwOptions ro;
  ro.iters = 5000;
  ro.burn_in = 1000;
  const Trace rw = rw_metropolis(m, lqe_init(), ro, r1);
  const MatrixXd c = rw.samples.rowwise() - rw.samples.colwise().mean();
  MalaOptions mo;
  mo.iters = 5000;
  mo.burn_in = 1000;
  mo.tau = 0.5;
  // Pilot covariance on the raw scale, diagonal only.
  MatrixXd raw(rw.kept(), 2);
  for (Index t = 0; t < rw.kept(); ++t) raw.row(t) = m.param_spec().to_raw(rw.samples.row(t).transpose()).transpose();
  const MatrixXd rc = raw.rowwise() - raw.colwise().mean();
  mo.preconditioner = (rc.transpose() * rc / static_cast<double>(rw.kept() - 1)).diagonal().asDiagonal();
  const Trace ml = mala(m, lqe_init(), mo, r2);
  for (Index j = 0; j < 2; ++j) {
    const VectorXd a = rw.samples.col(j), b = ml.samples.col(j);
    const double se = std::hypot(batch_mean_se(a, 20), batch_mean_se(b, 20));
    EXPECT_LT(std::abs(a.mean() - b.mean()), 3.0 * se) << j;
  }
}

// ---- Pólya-Gamma Gibbs baseline -------------------------------------------------

TEST(LatentNormal, ConditionalMeanMatchesDenseFormula) {
  Rng rng = make_rng(31);
  const LqeData d = lqe_data(40, 32);
  const MatrixXd d2 = squared_distances(d.x);
  const LatentCovariance q(d2, 1.3, 0.8, 1e-2, 1e-10, -1);
  VectorXd eta(40);
  for (Index i = 0; i < 40; ++i) eta(i) = 0.1 + uniform01(rng);
  const VectorXd kappa = d.y.array() - 0.5;
  const MatrixXd qd = q.tau() * (q.factor() * q.factor().transpose() + q.nugget() * MatrixXd::Identity(40, 40));
  MatrixXd prec = qd.inverse();
  prec.diagonal() += eta;
  const VectorXd exact = prec.ldlt().solve(kappa);
  EXPECT_LT((latent_conditional_mean(q, eta, kappa) - exact).cwiseAbs().maxCoeff(), 1e-8);

  const int draws = 20000;
  VectorXd sum = VectorXd::Zero(40);
  for (int k = 0; k < draws; ++k) sum += latent_conditional_draw(q, eta, kappa, rng);
  const VectorXd sd = prec.inverse().diagonal().cwiseSqrt();
  const VectorXd z = (sum / draws - exact).cwiseQuotient(sd) * std::sqrt(static_cast<double>(draws));
  EXPECT_LT(z.cwiseAbs().maxCoeff(), 4.0);
}

TEST(LatentNormal, TinyScaleConcentratesAtZero) {
  Rng rng = make_rng(33);
  const LqeData d = lqe_data(20, 34);
  const LatentCovariance q(squared_distances(d.x), 1e-8, 1.0, 1e-2, 1e-10, -1);
  const VectorXd eta = VectorXd::Constant(20, 0.25);
  const VectorXd kappa = VectorXd::Constant(20, 0.5);
  for (int k = 0; k < 20; ++k) EXPECT_LT(latent_conditional_draw(q, eta, kappa, rng).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(LatentNormal, DecoupledPairMatchesQuadrature) {
  // Two locations so far apart that K_b = I for any plausible b; the
  // posterior of (τ, ζ₁, ζ₂) then factorizes given τ and the marginal of ζ₁
  // follows from nested one-dimensional quadrature.
  LqeData d;
  d.x.resize(2, 1);
  d.x << 0.0, 1e4;
  d.y.resize(2);
  d.y << 1.0, 0.0;
  const LqePriors pr;
  LatentNormalOptions opt;
  opt.iters = 40000;
  opt.burn_in = 2000;
  opt.record_latent = true;
  Rng rng = make_rng(35);
  const Trace tr = gibbs_latent_normal(d, pr, opt, rng);
  ASSERT_EQ(tr.aux.cols(), 2);

  const double delta = opt.nugget;
  auto lik = [](double z, double y) { return std::exp(y * z - stats::log1p_exp(z)); };
  const int nt = 1200, nz = 1601;
  const double zmax = 12.0, hz = 2.0 * zmax / (nz - 1);
  std::vector<double> zgrid(nz), dens(nz, 0.0);
  for (int k = 0; k < nz; ++k) zgrid[k] = -zmax + hz * k;
  for (int a = 0; a < nt; ++a) {
    const double tau = 6.0 * (a + 0.5) / nt;
    const double v = tau * (1.0 + delta);
    double m2 = 0.0;
    for (int k = 0; k < nz; ++k) m2 += std::exp(stats::normal_log_pdf(zgrid[k], 0.0, std::sqrt(v))) * lik(zgrid[k], 0.0) * hz;
    const double w = std::exp(stats::half_normal_log_pdf(tau, pr.tau_sd)) * m2;
    for (int k = 0; k < nz; ++k) dens[k] += w * std::exp(stats::normal_log_pdf(zgrid[k], 0.0, std::sqrt(v))) * lik(zgrid[k], 1.0);
  }
  std::vector<double> cdf(nz);
  double acc = 0.0;
  for (int k = 0; k < nz; ++k) cdf[k] = (acc += dens[k]);
  for (double& c : cdf) c /= acc;

  std::vector<double> s(tr.aux.col(0).data(), tr.aux.col(0).data() + tr.kept());
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int k = std::clamp(static_cast<int>(std::floor((s[i] + zmax) / hz)), 0, nz - 1);
    const double f = cdf[static_cast<std::size_t>(k)];
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / s.size()), std::abs(f - static_cast<double>(i + 1) / s.size())});
  }
  EXPECT_LE(ks, 0.05);
}

// ---- discrete Gibbs ----------------------------------------------------------

TEST(DiscreteGibbs, MatchesEnumerationOnTwoCoordinates) {
  const std::vector<std::vector<double>> w = {{0.0, 1.0, -1.0}, {0.5, 0.0, 0.0}};
  auto f = [&](Index c, int v, const std::vector<int>& st) {
    const double inter = (c == 0 ? (v == st[1]) : (st[0] == v)) ? 0.7 : 0.0;
    return w[static_cast<std::size_t>(c)][static_cast<std::size_t>(v)] + inter;
  };
  Rng rng = make_rng(41);
  const Trace tr = discrete_gibbs({3, 3}, {0, 0}, f, 60000, 1000, rng);
  double p[3][3], z = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) z += (p[a][b] = std::exp(w[0][a] + w[1][b] + (a == b ? 0.7 : 0.0)));
  std::map<std::pair<int, int>, double> freq;
  for (Index t = 0; t < tr.kept(); ++t) freq[{static_cast<int>(tr.aux(t, 0)), static_cast<int>(tr.aux(t, 1))}] += 1.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double f = freq[std::make_pair(a, b)] / static_cast<double>(tr.kept());
      EXPECT_NEAR(f, p[a][b] / z, 0.01);
    }
}

TEST(DiscreteGibbs, SingleValueSupportNeverChanges) {
  Rng rng = make_rng(42);
  const Trace tr = discrete_gibbs({1, 2}, {0, 1}, [](Index, int v, const std::vector<int>&) { return 0.3 * v; }, 500, 0, rng);
  EXPECT_EQ(tr.aux.col(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(tr.aux.col(1).minCoeff(), -1.0);
  EXPECT_THROW(discrete_gibbs({2}, {2}, [](Index, int, const std::vector<int>&) { return 0.0; }, 10, 0, rng),
               InvalidInput);
}

TEST(DiscreteGibbs, CategoricalHandlesInfiniteWeights) {
  Rng rng = make_rng(43);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(categorical_from_logs({stats::kNegInf, 2.0, stats::kNegInf}, rng), 1);
  EXPECT_THROW(categorical_from_logs({stats::kNegInf, stats::kNegInf}, rng), InvalidInput);
}

// ---- harmonization ------------------------------------------------------------

TEST(HarmonizationSampler, GridPairsMatchConjugateEnumeration) {
  // With σ² and τ integrated out in closed form, the posterior over the
  // 10 × 10 grid pairs is ∏ λ̃_s Γ(a_σ)/B_σ^{a_σ} Γ(a_τ)/B_τ^{a_τ}.
  Rng rng = make_rng(51);
  HarmonizationData data;
  data.laplacians = {random_laplacian(5, 0.6, rng), random_laplacian(5, 0.6, rng)};
  const ProjectionTable table(data, default_harmonization_grid());
  const HarmonizationPriors pr;
  const double a_s = pr.sigma2_shape + 3.0, a_t = pr.tau_shape + 1.0;
  MatrixXd exact(10, 10);
  for (int g0 = 0; g0 < 10; ++g0)
    for (int g1 = 0; g1 < 10; ++g1) {
      const std::vector<int> idx{g0, g1};
      double bs = pr.sigma2_scale, bt = pr.tau_scale;
      double lg = 0.0;
      for (Index s = 0; s < 2; ++s) {
        const int g = idx[static_cast<std::size_t>(s)];
        const double lt = table.grid()[static_cast<std::size_t>(g)];
        bs += 0.5 * table.fit(s, g) + lt * table.nuclear(s, g);
        bt += 0.5 * table.mean_dist2(s, idx);
        lg += std::log(lt);
      }
      exact(g0, g1) = lg - a_s * std::log(bs) - a_t * std::log(bt);
    }
  exact = (exact.array() - exact.maxCoeff()).exp();
  exact /= exact.sum();

  HarmonizationSamplerOptions opt;
  opt.iters = 62000;
  opt.burn_in = 2000;
  const HarmonizationChain ch = harmonization_sampler(table, opt, rng);
  MatrixXd freq = MatrixXd::Zero(10, 10);
  for (Index t = 0; t < ch.trace.kept(); ++t)
    freq(static_cast<Index>(ch.trace.aux(t, 0)), static_cast<Index>(ch.trace.aux(t, 1))) += 1.0;
  freq /= static_cast<double>(ch.trace.kept());
  for (Index a = 0; a < 10; ++a)
    for (Index b = 0; b < 10; ++b) {
      const double p = exact(a, b);
      EXPECT_LE(std::abs(freq(a, b) - p), 5.0 * std::sqrt(p * (1.0 - p) / 6000.0) + 1e-3) << a << "," << b;
    }
  EXPECT_EQ(ch.smoothed_distance.rows(), 2);
  EXPECT_EQ(ch.smoothed_distance(0, 0), 0.0);
  EXPECT_GT(ch.smoothed_distance(0, 1), 0.0);
}

// ---- composite samplers ------------------------------------------------------

TEST(BmmcSampler, ShapesAndLabels) {
  Rng rng = make_rng(61);
  BmmcData d;
  d.x.resize(12, 2);
  d.y.resize(12);
  for (Index i = 0; i < 12; ++i) {
    const double s = i % 2 ? 1.0 : -1.0;
    d.x(i, 0) = 2.0 * s + 0.3 * std_normal(rng);
    d.x(i, 1) = std_normal(rng);
    d.y(i) = s;
  }
  d.unlabeled = {0, 1, 2};
  const BmmcModel m(d);
  BmmcSamplerOptions opt;
  opt.iters = 300;
  opt.burn_in = 100;
  const Trace tr = bmmc_sampler(m, opt, rng);
  ASSERT_EQ(tr.kept(), 200);
  ASSERT_EQ(tr.aux.cols(), 3);
  EXPECT_TRUE((tr.aux.array().abs() == 1.0).all());
  EXPECT_GT(tr.samples.minCoeff(), 0.0);
  // Well-separated clusters: each unlabeled point is imputed with its cluster.
  EXPECT_LT(tr.aux.col(0).mean(), -0.5);
  EXPECT_GT(tr.aux.col(1).mean(), 0.5);
}

TEST(GibbsHinge, SeparatedClustersPredictTheirSide) {
  Rng rng = make_rng(62);
  BmmcData d;
  d.x.resize(40, 1);
  d.y.resize(40);
  for (Index i = 0; i < 40; ++i) {
    const double s = i % 2 ? 1.0 : -1.0;
    d.x(i, 0) = 3.0 * s + 0.5 * std_normal(rng);
    d.y(i) = s;
  }
  d.unlabeled = {0, 1};
  GibbsHingeOptions opt;
  opt.iters = 3000;
  opt.burn_in = 1000;
  const Trace tr = gibbs_hinge_sampler(d, opt, rng);
  ASSERT_EQ(tr.dim(), 3);
  EXPECT_EQ(tr.names.back(), "lambda");
  EXPECT_GT(tr.column("w0").mean(), 0.0);
  EXPECT_LT(tr.aux.col(0).mean(), 0.0);
  EXPECT_GT(tr.aux.col(1).mean(), 0.0);
  EXPECT_GT(tr.acceptance, 0.1);
}

TEST(CoxCanonical, AgreesWithBridgedPosterior) {
  Rng rng = make_rng(63);
  const Index n = 300;
  VectorXd x(n), t(n);
  for (Index i = 0; i < n; ++i) {
    x(i) = std_normal(rng);
    t(i) = std_exponential(rng) / std::exp(0.8 * x(i));
  }
  const CoxDesign design(t, x, CoxDesign::quantile_edges(t, 5));
  CoxCanonicalOptions co;
  co.iters = 6000;
  co.burn_in = 1000;
  const Trace can = cox_canonical_sampler(design, co, rng);
  RwOptions ro;
  ro.iters = 6000;
  ro.burn_in = 1000;
  const Trace br = rw_metropolis(CoxModel(design), VectorXd::Zero(1), ro, rng);
  const VectorXd a = can.samples.col(0), b = br.samples.col(0);
  EXPECT_LT(std::abs(a.mean() - b.mean()), 3.0 * std::hypot(batch_mean_se(a, 20), batch_mean_se(b, 20)) + 0.02);
  EXPECT_EQ(can.aux.cols(), design.intervals());
  EXPECT_GT(can.aux.minCoeff(), 0.0);
}
