#include <gtest/gtest.h>

#include "flagdyn/flow.hpp"
#include "support.hpp"

using namespace flagdyn;
using namespace testing_support;

namespace {

SpectralData random_symmetric(std::mt19937_64& rng, int n) {
  MatX s = gaussian(rng, n, n);
  return SpectralData::from_symmetric((0.5 * (s + s.transpose())).eval());
}

}  // namespace

TEST(SpectralData, FromSymmetricIsDescending) {
  std::mt19937_64 rng(31);
  const SpectralData a = random_symmetric(rng, 5);
  for (int i = 1; i < 5; ++i) EXPECT_GE(a.evals()[i - 1], a.evals()[i]);
  EXPECT_TRUE(a.ordered());
  MatX s = a.matrix();
  EXPECT_LT((a.evecs() * a.evals().asDiagonal() * a.evecs().transpose() - s).norm(), 1e-12);
}

TEST(SpectralData, SimpleAndOrdered) {
  VecX v(3);
  v << 3, 1, 1;
  EXPECT_FALSE(SpectralData::diagonal(v).simple());
  v << 3, 2, 1;
  EXPECT_TRUE(SpectralData::diagonal(v).simple());
  VecX s(4);
  s << 4, 2, 0.25, 0.5;  // 1 ◁ 2 ◁ 4 ◁ 3
  EXPECT_TRUE(SpectralData::diagonal(s).ordered(true));
  EXPECT_FALSE(SpectralData::diagonal(s).ordered(false));
}

TEST(Weights, Validation) {
  EXPECT_THROW(Weights({1.0, 2.0}), Error);
  EXPECT_THROW(Weights({1.0, 0.0}), Error);
  EXPECT_TRUE(Weights({3.0, 2.0, 1.0}).strict());
  EXPECT_FALSE(Weights::ones(3).strict());
  const auto w = Weights({3.0, 2.0, 1.0}).pullback_weights();
  EXPECT_DOUBLE_EQ(w[0], 1.0 * (9 - 4) / 3);
  EXPECT_DOUBLE_EQ(w[1], 2.0 * (4 - 1) / 3);
  EXPECT_DOUBLE_EQ(w[2], 3.0 * 1 / 3);
}

TEST(VectorField, IsTimeDerivativeOfTheFlow) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = uniform_int(rng, 2, 7), k = uniform_int(rng, 1, n);
    const SpectralData a = random_symmetric(rng, n);
    const Frame x = random_frame(rng, n, k);
    const double h = 1e-5;
    const MatX fd = (flow(a, x, h).mat() - flow(a, x, -h).mat()) / (2 * h);
    const MatX f = vector_field(a, x);
    EXPECT_LT((fd - f).norm(), 1e-7 * (1 + f.norm()));
    EXPECT_LT((proj_normal_orth(x.mat(), f)).norm(), 1e-12);
  }
}

TEST(Flow, GroupPropertyAndIntegratorsAgree) {
  std::mt19937_64 rng(33);
  const SpectralData a = random_symmetric(rng, 5);
  const Frame x = random_frame(rng, 5, 3);
  const Frame y = flow(a, flow(a, x, 0.7), 0.5);
  EXPECT_LT((y.mat() - flow(a, x, 1.2).mat()).norm(), 1e-12);
  FlowConfig rk{1e-3, 1.0, Integrator::rk4_projected};
  EXPECT_LT((flow(a, x, 1.2, rk).mat() - flow(a, x, 1.2).mat()).norm(), 1e-9);
  EXPECT_EQ(flow(a, x, 0.0).mat(), x.mat());
}

TEST(Flow, LongHorizonConvergesToTopEigenvectors) {
  VecX ev(4);
  ev << 3, 1, -0.5, -2;
  const SpectralData a = SpectralData::diagonal(ev);
  std::mt19937_64 rng(34);
  const Frame x = random_frame(rng, 4, 2);
  const Frame y = flow(a, x, 40.0);
  EXPECT_LT(flag_distance(to_flag(y, Signature::full(2)), to_flag(Frame::canonical(4, 2), Signature::full(2))),
            1e-12);
}

TEST(Flow, Errors) {
  const SpectralData a = SpectralData::diagonal(VecX::Ones(3));
  EXPECT_THROW(flow(a, Frame::canonical(4, 2), 1.0), Error);
  EXPECT_THROW(flow(a, Frame::canonical(3, 2), std::nan("")), Error);
  EXPECT_THROW(FlowConfig({0.0, 1.0}).validate(), Error);
  EXPECT_THROW(FlowConfig({2.0, 1.0}).validate(), Error);
  // an explicit step far too large for the spectrum
  VecX ev(3);
  ev << 200, 0, -200;
  try {
    flow(SpectralData::diagonal(ev), Frame::orthonormalize(MatX::Ones(3, 1)), 1.0,
         FlowConfig{0.5, 1.0, Integrator::rk4_projected});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Divergence);
  }
}

TEST(Quad, MatchesDefinition) {
  std::mt19937_64 rng(35);
  const SpectralData a = random_symmetric(rng, 5);
  const Frame x = random_frame(rng, 5, 3);
  const Weights b({3.0, 2.0, 0.5});
  double want = 0;
  for (int i = 0; i < 3; ++i)
    want += b.b()[i] * b.b()[i] * x.mat().col(i).dot(a.matrix() * x.mat().col(i));
  EXPECT_NEAR(quad(a, b, x), want / 3, 1e-12);
}

TEST(QuadGradient, MatchesFiniteDifferencesAndEuclideanProjection) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = uniform_int(rng, 2, 7), k = uniform_int(rng, 1, std::min(n, 4));
    const SpectralData a = random_symmetric(rng, n);
    const Weights b(strict_weights(rng, k));
    const Frame x = random_frame(rng, n, k);
    const MatX g = quad_gradient(a, b, x);
    MatX fd = MatX::Zero(n, k);
    const double h = 1e-5;
    for (const MatX& v : tangent_basis(x.mat())) {
      const double d = (quad(a, b, Frame::orthonormalize(x.mat() + h * v)) -
                        quad(a, b, Frame::orthonormalize(x.mat() - h * v))) /
                       (2 * h);
      fd += d * v;
    }
    EXPECT_LT((g - fd).norm(), 1e-6 * std::max(1.0, g.norm()));
    const Eigen::Map<const VecX> bv(b.b().data(), k);
    const MatX euclid = 2.0 * a.matrix() * x.mat() * bv.array().square().matrix().asDiagonal();
    EXPECT_LT((g - proj_tangent_orth(x.mat(), euclid)).norm(), 1e-12 * (1 + g.norm()));
  }
}

TEST(GradientFlow, AscentIncreasesQ) {
  std::mt19937_64 rng(37);
  const SpectralData a = random_symmetric(rng, 5);
  const Weights b({2.0, 1.5, 1.0});
  const Frame x = random_frame(rng, 5, 3);
  std::vector<double> qs;
  const FrameObserver<double> obs = [&](double, const Frame& y) { qs.push_back(quad(a, b, y)); };
  gradient_flow(a, b, x, 2.0, FlowConfig{1e-2, 2.0}, true, obs);
  ASSERT_EQ(qs.size(), 201u);
  for (std::size_t s = 1; s < qs.size(); ++s) EXPECT_GE(qs[s], qs[s - 1] - 1e-12);
  const Frame down = gradient_flow(a, b, x, 2.0, FlowConfig{1e-2, 2.0}, false);
  EXPECT_LT(quad(a, b, down), quad(a, b, x));
  EXPECT_THROW(gradient_flow(a, b, x, -1.0), Error);
}

TEST(GradientFlow, IsotropicFramesStayIsotropic) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = uniform_int(rng, 2, 4), k = uniform_int(rng, 1, n);
    VecX lam = descending(rng, n, 0.3, 2.0, 0.1).array().exp();
    VecX ev(2 * n);
    ev << lam, lam.cwiseInverse();
    const SpectralData a = SpectralData::diagonal(ev);
    const Weights b(strict_weights(rng, k));
    const Frame x = random_unitary_frame(rng, n, k);
    const Eigen::Map<const VecX> bv(b.b().data(), k);
    const MatX euclid = 2.0 * a.matrix() * x.mat() * bv.array().square().matrix().asDiagonal();
    const MatX g = quad_gradient(a, b, x);
    EXPECT_LT((g - project_onto_kernel(frame_constraints(x.mat(), true), euclid)).norm(), 1e-9 * (1 + g.norm()));
    const Frame y = gradient_flow(a, b, x, 1.0, FlowConfig{1e-3, 1.0});
    EXPECT_EQ(y.kind(), FrameKind::unitary);
    EXPECT_LT(isotropy_residual(y.mat()), 1e-12);
    EXPECT_GT(quad(a, b, y), quad(a, b, x));
  }
}

TEST(XiForm, NonnegativeForSharedOrderedDirections) {
  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = uniform_int(rng, 2, 6), r = uniform_int(rng, 1, n - 1);
    const MatX q = random_frame(rng, n, r).mat();
    const MatX p = q * q.transpose();
    const SpectralData a = SpectralData::diagonal(descending(rng, n, -3, 3, 0.0));
    const SpectralData h = SpectralData::diagonal(descending(rng, n, -3, 3, 0.0));
    EXPECT_GE(xi_form(p, a, h), -1e-12);
  }
  EXPECT_THROW(xi_form(MatX(MatX::Ones(3, 3)), SpectralData::diagonal(VecX::Ones(3)), SpectralData::diagonal(VecX::Ones(3))),
               Error);
}

TEST(Lyapunov, AuditPassesAndDetectsPrecondition) {
  std::mt19937_64 rng(39);
  const SpectralData a = SpectralData::diagonal(descending(rng, 4, -2, 2, 0.2));
  const Weights b({3.0, 2.0, 1.0});
  const Frame x = random_frame(rng, 4, 3);
  const LyapunovReport rep = lyapunov_audit(a, a, b, x, FlowConfig{1e-2, 30.0});
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.max_violation, 1e-10);
  ASSERT_TRUE(rep.converged_to.has_value());
  EXPECT_EQ(*rep.converged_to, (std::vector<int>{1, 2, 3}));
  VecX rev = a.evals().reverse();
  EXPECT_THROW(lyapunov_audit(a, SpectralData::diagonal(rev), b, x, FlowConfig{1e-2, 1.0}), Error);
  EXPECT_THROW(lyapunov_audit(a, a, Weights::ones(3), x, FlowConfig{1e-2, 1.0}), Error);
}

TEST(Lyapunov, DetectsANonLyapunovFunction) {
  // b increasing in the wrong direction is rejected by Weights; use reversed A instead,
  // which makes Q decrease along the flow of H.
  VecX h(3);
  h << 2, 0, -2;
  const SpectralData hh = SpectralData::diagonal(h);
  const Weights b({2.0, 1.0});
  std::mt19937_64 rng(40);
  const Frame x = random_frame(rng, 3, 2);
  const SpectralData neg = SpectralData::diagonal((-h).eval());
  const auto y = flow(hh, x, 1.0);
  EXPECT_LT(quad(neg, b, y), quad(neg, b, x));
}
