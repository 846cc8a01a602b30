#include <gtest/gtest.h>

#include "flagdyn/linalg.hpp"
#include "support.hpp"

using namespace flagdyn;
using namespace testing_support;

TEST(QrPositive, MatchesGramSchmidt) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 1, 9), k = uniform_int(rng, 1, n);
    const MatX a = gaussian(rng, n, k);
    const auto [q, r] = qr_positive(a);
    const auto [q0, r0] = mgs(a);
    EXPECT_LT((q - q0).norm(), 1e-10);
    EXPECT_LT((r - r0).norm(), 1e-10 * (1 + r0.norm()));
    EXPECT_LT((q * r - a).norm(), 1e-12 * (1 + a.norm()));
    EXPECT_GT(r.diagonal().minCoeff(), 0.0);
  }
}

TEST(QrPositive, RejectsRankDeficient) {
  MatX a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  try {
    qr_positive(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
  EXPECT_THROW(qr_positive(MatX::Ones(2, 3)), Error);
}

TEST(QrPositive, IdentityIsFixed) {
  const auto [q, r] = qr_positive(MatX::Identity(4, 2));
  EXPECT_EQ(q, MatX::Identity(4, 2));
  EXPECT_EQ(r, MatX::Identity(2, 2));
}

TEST(TriLeft, Definition) {
  MatX x(3, 3);
  x << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  MatX want(3, 3);
  want << 1, 6, 10, 0, 5, 14, 0, 0, 9;
  EXPECT_EQ(tri_left(x), want);
  EXPECT_THROW(tri_left(MatX::Zero(2, 3)), Error);
}

TEST(TangentQr, ReconstructionAndDerivative) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniform_int(rng, 2, 8), k = uniform_int(rng, 1, n);
    const MatX x = gaussian(rng, n, k) + MatX::Identity(n, k) * 2;
    const MatX v = gaussian(rng, n, k);
    const auto split = tangent_qr(x, v);
    const auto ku = qr_positive(x);
    EXPECT_LT(hs_norm((v - split.v0 * ku.r - ku.q * split.v1).eval()), 1e-10);
    const double h = 1e-6;
    const MatX fd = (qr_positive((x + h * v).eval()).q - qr_positive((x - h * v).eval()).q) / (2 * h);
    EXPECT_LT((fd - split.v0).norm(), 1e-6);
    // v1 is upper triangular
    EXPECT_LT(split.v1.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm(), 1e-14);
  }
}

TEST(HsInner, NormalizedTrace) {
  MatX e(2, 2), f(2, 2);
  e << 1, 2, 3, 4;
  f << 5, 6, 7, 8;
  EXPECT_DOUBLE_EQ(hs_inner(e, f), (e.transpose() * f).trace() / 2);
  EXPECT_DOUBLE_EQ(hs_norm(MatX::Identity(5, 3)), 1.0);
  EXPECT_THROW(hs_inner(e, MatX::Zero(3, 2)), Error);
}

TEST(Projections, OrthogonalSplitMatchesKernelOracle) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniform_int(rng, 2, 6), k = uniform_int(rng, 1, n);
    const MatX x = random_frame(rng, n, k).mat();
    const MatX b = gaussian(rng, n, k);
    const MatX t = proj_tangent_orth(x, b);
    const MatX nn = proj_normal_orth(x, b);
    EXPECT_LT((t + nn - b).norm(), 1e-12);
    EXPECT_LT((t - project_onto_kernel(frame_constraints(x, false), b)).norm(), 1e-9);
    EXPECT_LT(std::abs(hs_inner(t, nn)), 1e-12);
  }
}

TEST(Projections, UnitarySplitMatchesKernelOracle) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniform_int(rng, 1, 4), k = uniform_int(rng, 1, n);
    const MatX x = random_unitary_frame(rng, n, k).mat();
    const MatX b = gaussian(rng, 2 * n, k);
    const MatX t = proj_tangent_unitary(x, b);
    const MatX nn = proj_normal_unitary(x, b);
    EXPECT_LT((t + nn - b).norm(), 1e-12);
    EXPECT_LT((t - project_onto_kernel(frame_constraints(x, true), b)).norm(), 1e-9);
  }
}

TEST(Projections, UnitaryRequiresUnitaryFrame) {
  const MatX x = MatX::Identity(4, 2);  // e1, e2 with n = 2: isotropic
  EXPECT_NO_THROW(proj_tangent_unitary(x, x));
  MatX bad = MatX::Zero(4, 2);
  bad(0, 0) = 1;
  bad(2, 1) = 1;  // e1, e3 = J e1
  EXPECT_THROW(proj_tangent_unitary(bad, bad), Error);
  EXPECT_THROW(proj_normal_unitary(MatX::Identity(3, 1), MatX::Identity(3, 1)), Error);
}

TEST(SymplecticJ, Structure) {
  const MatX j = symplectic_j<double>(3);
  EXPECT_EQ((j * j + MatX::Identity(6, 6)).norm(), 0.0);
  EXPECT_EQ((j + j.transpose()).norm(), 0.0);
  EXPECT_EQ(j(3, 0), 1.0);  // J e_1 = e_{1+n}
}

TEST(Expm, AgreesWithEigendecomposition) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = uniform_int(rng, 1, 7);
    MatX s = gaussian(rng, n, n);
    s = ((s + s.transpose()) * uniform(rng, 0.1, 3.0)).eval();
    Eigen::SelfAdjointEigenSolver<MatX> es(s);
    const MatX want = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                      es.eigenvectors().transpose();
    EXPECT_LT((expm(s) - want).norm() / want.norm(), 1e-12);
  }
}

TEST(Expm, SkewGivesRotation) {
  MatX w(2, 2);
  w << 0, -1.3, 1.3, 0;
  const MatX r = expm(w);
  EXPECT_NEAR(r(0, 0), std::cos(1.3), 1e-14);
  EXPECT_NEAR(r(1, 0), std::sin(1.3), 1e-14);
}

TEST(Scalar, LongDoubleInstantiation) {
  Mat<long double> a = Mat<long double>::Random(5, 3);
  a += Mat<long double>::Identity(5, 3) * 3;
  const auto [q, r] = qr_positive(a);
  EXPECT_LT(static_cast<double>((q * r - a).norm()), 1e-17);
  EXPECT_LT(static_cast<double>(orthonormality_residual(q)), 1e-17);
}
