#include <gtest/gtest.h>

#include "flagdyn/frame.hpp"
#include "support.hpp"

using namespace flagdyn;
using namespace testing_support;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // sentinel; callers expect something else
}

}  // namespace

TEST(Frame, ValidatesOrthonormality) {
  EXPECT_NO_THROW(Frame(MatX::Identity(3, 2)));
  EXPECT_EQ(code_of([] { Frame(MatX::Ones(3, 2)); }), ErrorCode::NotFrame);
  EXPECT_EQ(code_of([] { Frame(MatX::Identity(2, 3)); }), ErrorCode::NotFrame);
  MatX nan = MatX::Identity(3, 1);
  nan(0, 0) = std::nan("");
  EXPECT_EQ(code_of([&] { Frame{nan}; }), ErrorCode::NotFrame);
}

TEST(Frame, UnitaryNeedsIsotropy) {
  EXPECT_NO_THROW(Frame::canonical(3, 3, FrameKind::unitary));
  EXPECT_EQ(Frame::canonical(3, 2, FrameKind::unitary).n(), 6);
  MatX x = MatX::Zero(4, 2);
  x(0, 0) = 1;
  x(2, 1) = 1;
  EXPECT_EQ(code_of([&] { Frame(x, FrameKind::unitary); }), ErrorCode::NotUnitaryFrame);
  EXPECT_EQ(code_of([] { Frame(MatX::Identity(3, 1), FrameKind::unitary); }), ErrorCode::NotUnitaryFrame);
}

TEST(Act, IdentityAndCanonical) {
  std::mt19937_64 rng(21);
  const Frame x = random_frame(rng, 5, 3);
  EXPECT_LT((act(MatX::Identity(5, 5), x).mat() - x.mat()).norm(), 1e-14);
  // I_{n,k} is fixed by upper triangular matrices with positive diagonal
  MatX u = gaussian(rng, 4, 4).triangularView<Eigen::Upper>();
  u.diagonal() = u.diagonal().cwiseAbs().array() + 0.5;
  EXPECT_LT((act(u, Frame::canonical(4, 2)).mat() - MatX::Identity(4, 2)).norm(), 1e-14);
}

TEST(Act, GroupLaw) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 2, 8), k = uniform_int(rng, 1, n - 1);
    const MatX a = invertible(rng, n), b = invertible(rng, n);
    const Frame x = random_frame(rng, n, k);
    EXPECT_LT(hs_norm((act(b, act(a, x)).mat() - act((b * a).eval(), x).mat()).eval()), 1e-9);
  }
}

TEST(Act, QFactorOracle) {
  std::mt19937_64 rng(23);
  const MatX a = invertible(rng, 6);
  const Frame x = random_frame(rng, 6, 4);
  EXPECT_LT((act(a, x).mat() - mgs(a * x.mat()).first).norm(), 1e-12);
}

TEST(Act, SymplecticPreservesUnitaryFrames) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = uniform_int(rng, 1, 4), k = uniform_int(rng, 1, n);
    const Frame x = random_unitary_frame(rng, n, k);
    const Frame y = act(random_symplectic(rng, n), x);
    EXPECT_EQ(y.kind(), FrameKind::unitary);
    EXPECT_LT(isotropy_residual(y.mat()), 1e-10);
  }
}

TEST(Act, Errors) {
  const Frame x = Frame::canonical(3, 2);
  EXPECT_EQ(code_of([&] { act(MatX::Zero(3, 3), x); }), ErrorCode::Singular);
  EXPECT_EQ(code_of([&] { act(MatX::Identity(4, 4), x); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] { act(MatX::Identity(3, 2), x); }), ErrorCode::NonSquare);
  // invertible, but the image of the frame is not isotropic
  MatX a = MatX::Identity(4, 4);
  a(2, 1) = 1.0;
  EXPECT_EQ(code_of([&] { act(a, Frame::canonical(2, 2, FrameKind::unitary)); }), ErrorCode::NotUnitaryFrame);
}

TEST(Truncate, KeepsLeadingColumns) {
  std::mt19937_64 rng(25);
  const Frame x = random_frame(rng, 5, 4);
  EXPECT_EQ(truncate(x, 2).mat(), x.mat().leftCols(2));
  EXPECT_EQ(code_of([&] { truncate(x, 5); }), ErrorCode::BadIndex);
  EXPECT_EQ(code_of([&] { truncate(x, 0); }), ErrorCode::BadIndex);
}

TEST(Flag, ProjectorsAndDistance) {
  std::mt19937_64 rng(26);
  const Frame x = random_frame(rng, 5, 3);
  const Flag u = to_flag(x, Signature::full(3));
  for (std::size_t i = 0; i < 3; ++i) {
    const MatX p = u.projector(i);
    EXPECT_LT((p * p - p).norm(), 1e-12);
    EXPECT_NEAR(p.trace(), i + 1.0, 1e-12);
  }
  // column signs and upper-triangular changes do not move the flag
  MatX u3 = MatX::Identity(3, 3);
  u3(0, 2) = 0.7;
  u3(1, 1) = -1;
  const Flag v = to_flag(Frame::orthonormalize(x.mat() * u3), Signature::full(3));
  EXPECT_TRUE(flags_equal(u, v));
  const Flag w = to_flag(random_frame(rng, 5, 3), Signature::full(3));
  EXPECT_FALSE(flags_equal(u, w));
  EXPECT_EQ(code_of([&] { flag_distance(u, to_flag(x, Signature({1, 3}))); }), ErrorCode::SignatureMismatch);
}

TEST(Flag, SignatureValidation) {
  EXPECT_THROW(Signature({2, 2}), Error);
  EXPECT_THROW(Signature({0, 1}), Error);
  EXPECT_EQ(code_of([] { to_flag(Frame::canonical(3, 2), Signature({1, 3})); }), ErrorCode::ShapeMismatch);
}

TEST(Flag, Isotropy) {
  EXPECT_TRUE(is_isotropic(to_flag(Frame::canonical(2, 2, FrameKind::unitary), Signature::full(2))));
  MatX x = MatX::Zero(4, 2);
  x(0, 0) = 1;
  x(2, 1) = 1;
  EXPECT_FALSE(is_isotropic(to_flag(Frame(x), Signature::full(2))));
  EXPECT_EQ(code_of([] { is_isotropic(to_flag(Frame::canonical(3, 1), Signature::full(1))); }),
            ErrorCode::OddAmbient);
}
