#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "bridged/numerics.hpp"
#include "support.hpp"

using namespace bridged;
using bridged::testing::random_matrix;
using bridged::testing::random_psd_rank;
using bridged::testing::random_spd;

TEST(Kernel, ZeroDistanceGivesTau) {
  Locations x(2, 1);
  x << 0.0, 0.0;
  const SymMatrix q = squared_exp_kernel(x, {2.0, 1.0});
  EXPECT_TRUE((q.matrix().array() == 2.0).all());
}

TEST(Kernel, OffDiagonalValue) {
  Locations x(2, 1);
  x << 0.0, std::sqrt(2.0);
  const SymMatrix q = squared_exp_kernel(x, {1.0, 1.0});
  EXPECT_NEAR(q(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_EQ(q(0, 1), q(1, 0));
  EXPECT_EQ(q(0, 0), 1.0);
}

TEST(Kernel, SpectralNormBoundAndPsd) {
  Rng rng = make_rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 5 + rep % 20;
    const Locations x = 3.0 * random_matrix(n, 1 + rep % 3, rng);
    const CovKernelParams p{0.1 + 3.0 * uniform01(rng), 0.05 + 4.0 * uniform01(rng)};
    const SymMatrix q = squared_exp_kernel(x, p);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(q.matrix(), Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * p.tau);
    EXPECT_LE(es.eigenvalues().maxCoeff(), n * p.tau * (1.0 + 1e-12));
    EXPECT_TRUE((q.matrix().diagonal().array() == p.tau).all());
  }
}

TEST(Kernel, RejectsNonFinite) {
  Locations x(2, 1);
  x << 0.0, NAN;
  EXPECT_THROW(squared_exp_kernel(x, {1.0, 1.0}), InvalidInput);
  Locations ok(1, 1);
  ok << 0.0;
  EXPECT_THROW(squared_exp_kernel(ok, {0.0, 1.0}), InvalidInput);
}

TEST(Cholesky, IdentityAndDiagonal) {
  VectorXd v(3);
  v << 1.0, -2.0, 3.5;
  EXPECT_EQ(cholesky_solve(SymMatrix::identity(3), v), v);
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  VectorXd rhs(2);
  rhs << 2.0, 4.0;
  const VectorXd x = cholesky_solve(SymMatrix::from_upper(d), rhs);
  EXPECT_DOUBLE_EQ(x(0), 1.0);
  EXPECT_DOUBLE_EQ(x(1), 1.0);
}

TEST(Cholesky, RandomResidual) {
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix a = SymMatrix::symmetrized(random_spd(5, rng));
    const VectorXd b = bridged::testing::random_vector(5, rng);
    const VectorXd x = cholesky_solve(a, b);
    EXPECT_LE((a.matrix() * x - b).norm() / b.norm(), 1e-10);
  }
}

TEST(Cholesky, ReportsPivot) {
  MatrixXd a = MatrixXd::Identity(3, 3);
  a(2, 2) = -1.0;
  try {
    cholesky_solve(SymMatrix::from_upper(a), VectorXd::Ones(3));
    FAIL();
  } catch (const DecompositionError& e) {
    EXPECT_EQ(e.pivot(), 2);
  }
}

TEST(SymMatrix, WritesBothTriangles) {
  SymMatrix s(3);
  s.set(0, 2, 1.5);
  EXPECT_EQ(s(2, 0), 1.5);
  MatrixXd a(2, 2);
  a << 1, 2, 3, 4;
  const SymMatrix u = SymMatrix::from_upper(a);
  EXPECT_EQ(u(1, 0), 2.0);
}

TEST(PivotedCholesky, ReconstructsLowRank) {
  Rng rng = make_rng(5);
  const MatrixXd a = random_psd_rank(30, 4, rng);
  const MatrixXd f = pivoted_cholesky(a, 1e-12);
  EXPECT_EQ(f.cols(), 4);
  EXPECT_LE((f * f.transpose() - a).norm(), 1e-9 * a.norm());
}

TEST(DiagPlusLowRank, MatchesDense) {
  Rng rng = make_rng(6);
  const VectorXd d = (random_matrix(12, 1, rng).array().abs() + 0.5).matrix();
  const MatrixXd u = random_matrix(12, 3, rng);
  const DiagPlusLowRank op(d, u);
  MatrixXd dense = u * u.transpose();
  dense.diagonal() += d;
  const VectorXd v = bridged::testing::random_vector(12, rng);
  EXPECT_LE((op.solve(v) - dense.ldlt().solve(v)).norm(), 1e-10);
  EXPECT_LE((op.apply(v) - dense * v).norm(), 1e-12);
  EXPECT_NEAR(op.log_det(), std::log(dense.determinant()), 1e-10);
}

TEST(Geodesic, ZeroForIdenticalInputs) {
  Rng rng = make_rng(7);
  const MatrixXd x = random_psd_rank(6, 3, rng);
  EXPECT_NEAR(geodesic_distance(x, x, 1e-6), 0.0, 1e-8);
}

TEST(Geodesic, DiagonalExample) {
  const MatrixXd x = MatrixXd::Identity(2, 2);
  const MatrixXd y = std::exp(2.0) * MatrixXd::Identity(2, 2);
  EXPECT_NEAR(geodesic_distance(x, y, 1e-12), 2.0 * std::sqrt(2.0), 1e-9);
}

TEST(Geodesic, SymmetricAndNonnegative) {
  Rng rng = make_rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const MatrixXd x = random_psd_rank(6, 1 + rep % 6, rng);
    const MatrixXd y = random_psd_rank(6, 1 + (rep / 6) % 6, rng);
    const double dxy = geodesic_distance(x, y, 1e-3);
    const double dyx = geodesic_distance(y, x, 1e-3);
    EXPECT_GE(dxy, 0.0);
    EXPECT_NEAR(dxy, dyx, 1e-8 * std::max(1.0, dxy));
  }
}

TEST(Geodesic, SizeMismatch) {
  EXPECT_THROW(geodesic_distance(MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 3), 1e-6), InvalidInput);
  EXPECT_THROW(geodesic_distance(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), 0.0), InvalidInput);
}

TEST(SoftThreshold, ZeroAndFullShrinkage) {
  Rng rng = make_rng(9);
  const MatrixXd x = random_matrix(5, 4, rng);
  EXPECT_LE((svd_soft_threshold(x, 0.0) - x).norm(), 1e-12);
  const double smax = Eigen::JacobiSVD<MatrixXd>(x).singularValues()(0);
  EXPECT_LE(svd_soft_threshold(x, smax).norm(), 1e-12);
  EXPECT_THROW(svd_soft_threshold(x, -1.0), InvalidInput);
}

TEST(SoftThreshold, RankOne) {
  VectorXd u(3), v(2);
  u << 1.0, 2.0, 2.0;
  v << 3.0, 4.0;
  u.normalize();
  v.normalize();
  const MatrixXd x = 3.0 * u * v.transpose();
  EXPECT_LE((svd_soft_threshold(x, 1.0) - 2.0 * u * v.transpose()).norm(), 1e-12);
}

TEST(SoftThreshold, Nonexpansive) {
  Rng rng = make_rng(10);
  for (int rep = 0; rep < 100; ++rep) {
    const MatrixXd x = random_matrix(6, 6, rng), y = random_matrix(6, 6, rng);
    const double t = 2.0 * uniform01(rng);
    EXPECT_LE((svd_soft_threshold(x, t) - svd_soft_threshold(y, t)).norm(), (x - y).norm() + 1e-12);
    const MatrixXd xs = x + x.transpose(), ys = y + y.transpose();
    EXPECT_LE((sym_soft_threshold(xs, t) - sym_soft_threshold(ys, t)).norm(), (xs - ys).norm() + 1e-12);
    EXPECT_LE((sym_soft_threshold(xs, t) - svd_soft_threshold(xs, t)).norm(), 1e-10);
  }
}

TEST(NuclearNorm, SumOfSingularValues) {
  MatrixXd d = MatrixXd::Zero(3, 3);
  d.diagonal() << 1.0, -2.0, 0.5;
  EXPECT_NEAR(nuclear_norm(d), 3.5, 1e-14);
}

namespace {

// E[e^{-tX}] for X ~ PG(1, c), continued to t < 0 through cos.
long double pg_laplace(long double c, long double t) {
  const long double u = (c * c / 2.0L + t) / 2.0L;
  const long double den = u >= 0 ? std::cosh(std::sqrt(u)) : std::cos(std::sqrt(-u));
  return std::cosh(c / 2.0L) / den;
}

// First two moments from central differences of the Laplace transform.
std::pair<double, double> pg_moments_oracle(double c) {
  const long double h = 1e-4L;
  const long double fp = pg_laplace(c, h), fm = pg_laplace(c, -h), f0 = pg_laplace(c, 0);
  const long double m1 = -(fp - fm) / (2 * h);
  const long double m2 = (fp - 2 * f0 + fm) / (h * h);
  return {static_cast<double>(m1), static_cast<double>(m2)};
}

}  // namespace

TEST(PolyaGamma, OracleMatchesKnownMeans) {
  EXPECT_NEAR(pg_moments_oracle(0.0).first, 0.25, 1e-7);
  EXPECT_NEAR(pg_moments_oracle(2.0).first, std::tanh(1.0) / 4.0, 1e-7);
  // Var PG(1, 0) = 1/24.
  EXPECT_NEAR(pg_moments_oracle(0.0).second - 0.0625, 1.0 / 24.0, 1e-6);
}

TEST(PolyaGamma, MomentsMatchLaplaceTransform) {
  for (double c : {0.0, 0.5, 2.0, 5.0}) {
    Rng rng = make_rng(20, static_cast<std::uint64_t>(c * 10));
    const int n = 100000;
    std::vector<double> x(n), x2(n);
    for (int i = 0; i < n; ++i) {
      x[i] = polya_gamma_sample(c, rng);
      ASSERT_GT(x[i], 0.0);
      x2[i] = x[i] * x[i];
    }
    const auto [m1, m2] = pg_moments_oracle(c);
    const double se1 = std::sqrt(bridged::testing::sample_var(x) / n);
    const double se2 = std::sqrt(bridged::testing::sample_var(x2) / n);
    EXPECT_NEAR(bridged::testing::sample_mean(x), m1, 3.0 * se1) << "c=" << c;
    EXPECT_NEAR(bridged::testing::sample_mean(x2), m2, 3.0 * se2 + 1e-6) << "c=" << c;
  }
}

TEST(PolyaGamma, NegativeTiltIsSymmetric) {
  Rng a = make_rng(13), b = make_rng(13);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(polya_gamma_sample(1.5, a), polya_gamma_sample(-1.5, b));
}

TEST(Random, SubStreamsDiffer) {
  Rng a = make_rng(1, 0), b = make_rng(1, 1), c = make_rng(1, 0);
  const auto va = a(), vb = b(), vc = c();
  EXPECT_NE(va, vb);
  EXPECT_EQ(va, vc);
}
