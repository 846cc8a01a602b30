#pragma once

// Dense kernel: positive-diagonal QR, the tangent QR splitting, the ◁ operator,
// the normalized Hilbert-Schmidt product and the tangent/normal projections of
// the orthogonal and unitary frame manifolds.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "flagdyn/errors.hpp"

namespace flagdyn {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatX = Mat<double>;
using VecX = Vec<double>;

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

template <typename Scalar>
struct QrPair {
  Mat<Scalar> q;
  Mat<Scalar> r;
};

template <typename Scalar>
struct TangentSplit {
  Mat<Scalar> v0;
  Mat<Scalar> v1;
};

namespace detail {

template <typename A, typename B>
void require_same_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::ShapeMismatch, where);
}

template <typename A>
void require_square(const Eigen::MatrixBase<A>& a, const char* where) {
  if (a.rows() != a.cols()) fail(ErrorCode::NonSquare, where);
}

}  // namespace detail

// Householder QR followed by a sign fix so that diag(r) > 0.
template <typename Derived>
QrPair<typename Derived::Scalar> qr_positive(const Eigen::MatrixBase<Derived>& x, const Tolerance& tol = {}) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::max;
  const Eigen::Index n = x.rows(), k = x.cols();
  if (k > n) fail(ErrorCode::RankDeficient, "more columns than rows");

  Eigen::HouseholderQR<Mat<Scalar>> hh(x.eval());
  Mat<Scalar> r = hh.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  Mat<Scalar> q = hh.householderQ() * Mat<Scalar>::Identity(n, k);

  for (Eigen::Index i = 0; i < k; ++i) {
    const Scalar scale = max(Scalar(1), x.col(i).norm());
    if (!(abs(r(i, i)) >= Scalar(tol.abs) * scale)) fail(ErrorCode::RankDeficient, "pivot below tolerance");
    if (r(i, i) < Scalar(0)) {
      r.row(i) *= Scalar(-1);
      q.col(i) *= Scalar(-1);
    }
  }
  return {std::move(q), std::move(r)};
}

// x^◁: diagonal kept, (i,j) with i<j becomes x_ij + x_ji, lower part zero.
template <typename Derived>
Mat<typename Derived::Scalar> tri_left(const Eigen::MatrixBase<Derived>& x) {
  detail::require_square(x, "tri_left");
  Mat<typename Derived::Scalar> out = x.template triangularView<Eigen::StrictlyUpper>();
  out += x.transpose().template triangularView<Eigen::StrictlyUpper>();
  out.diagonal() = x.diagonal();
  return out;
}

// With x = K U: v0 = v U⁻¹ − K (Kᵀ v U⁻¹)◁ and v1 = (Kᵀ v U⁻¹)◁ U.
template <typename DX, typename DV>
TangentSplit<typename DX::Scalar> tangent_qr(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DV>& v,
                                            const Tolerance& tol = {}) {
  using Scalar = typename DX::Scalar;
  detail::require_same_shape(x, v, "tangent_qr");
  const QrPair<Scalar> ku = qr_positive(x, tol);
  const auto u = ku.r.template triangularView<Eigen::Upper>();
  Mat<Scalar> v_uinv = u.template solve<Eigen::OnTheRight>(v.eval());
  Mat<Scalar> m = tri_left((ku.q.transpose() * v_uinv).eval());
  TangentSplit<Scalar> out;
  out.v0 = v_uinv - ku.q * m;
  out.v1 = m * ku.r;
  return out;
}

// ⟨E,F⟩_hs = (1/k) tr(EᵀF), k = number of columns.
template <typename DE, typename DF>
typename DE::Scalar hs_inner(const Eigen::MatrixBase<DE>& e, const Eigen::MatrixBase<DF>& f) {
  detail::require_same_shape(e, f, "hs_inner");
  if (e.cols() == 0) return typename DE::Scalar(0);
  return e.cwiseProduct(f).sum() / typename DE::Scalar(e.cols());
}

template <typename DE>
typename DE::Scalar hs_norm(const Eigen::MatrixBase<DE>& e) {
  using std::sqrt;
  return sqrt(hs_inner(e, e));
}

template <typename Scalar = double>
Mat<Scalar> symplectic_j(Eigen::Index n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "symplectic_j needs n >= 1");
  Mat<Scalar> j = Mat<Scalar>::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Mat<Scalar>::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat<Scalar>::Identity(n, n);
  return j;
}

template <typename DX>
typename DX::Scalar orthonormality_residual(const Eigen::MatrixBase<DX>& x) {
  using Scalar = typename DX::Scalar;
  return (x.transpose() * x - Mat<Scalar>::Identity(x.cols(), x.cols())).norm();
}

// ‖XᵀJX‖_F; requires an even number of rows.
template <typename DX>
typename DX::Scalar isotropy_residual(const Eigen::MatrixBase<DX>& x) {
  using Scalar = typename DX::Scalar;
  if (x.rows() % 2 != 0) fail(ErrorCode::OddAmbient, "isotropy needs an even ambient dimension");
  const Mat<Scalar> jm = symplectic_j<Scalar>(x.rows() / 2);
  return (x.transpose() * jm * x).norm();
}

// Π^T(B) = ½ X(XᵀB − BᵀX) + (I − XXᵀ)B
template <typename DX, typename DB>
Mat<typename DX::Scalar> proj_tangent_orth(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DX::Scalar;
  detail::require_same_shape(x, b, "proj_tangent_orth");
  const Mat<Scalar> xtb = x.transpose() * b;
  return Scalar(0.5) * x * (xtb - xtb.transpose()) + b - x * xtb;
}

// Π^⊥(B) = ½ X(XᵀB + BᵀX)
template <typename DX, typename DB>
Mat<typename DX::Scalar> proj_normal_orth(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DX::Scalar;
  detail::require_same_shape(x, b, "proj_normal_orth");
  const Mat<Scalar> xtb = x.transpose() * b;
  return Scalar(0.5) * x * (xtb + xtb.transpose());
}

namespace detail {

template <typename DX>
void require_unitary(const Eigen::MatrixBase<DX>& x, const Tolerance& tol) {
  if (x.rows() % 2 != 0) fail(ErrorCode::NotUnitaryFrame, "odd ambient dimension");
  if (orthonormality_residual(x) > tol.rel || isotropy_residual(x) > tol.rel)
    fail(ErrorCode::NotUnitaryFrame, "frame is not orthonormal and isotropic");
}

}  // namespace detail

// ½X(XᵀB − BᵀX) + ½JX(BᵀJX − XᵀJB) + (I − XXᵀ + JXXᵀJ)B
template <typename DX, typename DB>
Mat<typename DX::Scalar> proj_tangent_unitary(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DB>& b,
                                              const Tolerance& tol = {}) {
  using Scalar = typename DX::Scalar;
  detail::require_same_shape(x, b, "proj_tangent_unitary");
  detail::require_unitary(x, tol);
  const Mat<Scalar> jm = symplectic_j<Scalar>(x.rows() / 2);
  const Mat<Scalar> jx = jm * x;
  const Mat<Scalar> xtb = x.transpose() * b;
  const Mat<Scalar> jxtb = jx.transpose() * b;  // XᵀJᵀB = −XᵀJB
  return Scalar(0.5) * x * (xtb - xtb.transpose()) + Scalar(0.5) * jx * (jxtb + jxtb.transpose()) + b -
         x * xtb - jx * jxtb;
}

// ½X(XᵀB + BᵀX) − ½JX(XᵀJB + BᵀJX)
template <typename DX, typename DB>
Mat<typename DX::Scalar> proj_normal_unitary(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DB>& b,
                                             const Tolerance& tol = {}) {
  using Scalar = typename DX::Scalar;
  detail::require_same_shape(x, b, "proj_normal_unitary");
  detail::require_unitary(x, tol);
  const Mat<Scalar> jm = symplectic_j<Scalar>(x.rows() / 2);
  const Mat<Scalar> jx = jm * x;
  const Mat<Scalar> xtb = x.transpose() * b;
  const Mat<Scalar> jxtb = jx.transpose() * b;
  return Scalar(0.5) * x * (xtb + xtb.transpose()) + Scalar(0.5) * jx * (jxtb - jxtb.transpose());
}

// Scaling and squaring with a diagonal Padé(6) approximant.
template <typename Derived>
Mat<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using std::ceil;
  using std::log2;
  detail::require_square(a, "expm");
  const Eigen::Index n = a.rows();
  const Scalar norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > Scalar(0.5)) squarings = static_cast<int>(ceil(log2(norm1 / Scalar(0.5))));
  const Mat<Scalar> x = a / std::ldexp(Scalar(1), squarings);

  static constexpr double c[7] = {1.0,          0.5,           5.0 / 44.0,    1.0 / 66.0,
                                  1.0 / 792.0,  1.0 / 15840.0, 1.0 / 665280.0};
  Mat<Scalar> num = Mat<Scalar>::Identity(n, n);
  Mat<Scalar> den = Mat<Scalar>::Identity(n, n);
  Mat<Scalar> pw = Mat<Scalar>::Identity(n, n);
  for (int j = 1; j <= 6; ++j) {
    pw = (pw * x).eval();
    num += Scalar(c[j]) * pw;
    den += Scalar((j % 2 ? -1.0 : 1.0) * c[j]) * pw;
  }
  Mat<Scalar> r = den.partialPivLu().solve(num);
  for (int s = 0; s < squarings; ++s) r = (r * r).eval();
  return r;
}

}  // namespace flagdyn
