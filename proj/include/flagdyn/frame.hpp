#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "flagdyn/errors.hpp"
#include "flagdyn/linalg.hpp"

namespace flagdyn {

enum class FrameKind { orthogonal, unitary };

inline const char* to_string(FrameKind kind) { return kind == FrameKind::unitary ? "unitary" : "orthogonal"; }

// Point of O_{n,k} (orthonormal columns) or O^sp_{n,k} (also XᵀJX = 0).
template <typename Scalar>
class BasicFrame {
 public:
  using Matrix = Mat<Scalar>;

  BasicFrame(Matrix mat, FrameKind kind = FrameKind::orthogonal, const Tolerance& tol = {})
      : mat_(std::move(mat)), kind_(kind) {
    if (mat_.cols() < 1 || mat_.cols() > mat_.rows()) fail(ErrorCode::NotFrame, "need 1 <= k <= n");
    if (!mat_.allFinite()) fail(ErrorCode::NotFrame, "non-finite entries");
    if (orthonormality_residual(mat_) > Scalar(tol.rel)) fail(ErrorCode::NotFrame, "columns are not orthonormal");
    if (kind_ == FrameKind::unitary) {
      if (mat_.rows() % 2 != 0) fail(ErrorCode::NotUnitaryFrame, "odd ambient dimension");
      if (isotropy_residual(mat_) > Scalar(tol.rel)) fail(ErrorCode::NotUnitaryFrame, "XᵀJX != 0");
    }
  }

  // Q factor of an arbitrary full-rank matrix.
  static BasicFrame orthonormalize(const Matrix& m, FrameKind kind = FrameKind::orthogonal) {
    return BasicFrame(qr_positive(m).q, kind);
  }

  // I_{n,k}
  static BasicFrame canonical(Eigen::Index n, Eigen::Index k, FrameKind kind = FrameKind::orthogonal) {
    const Eigen::Index rows = kind == FrameKind::unitary ? 2 * n : n;
    return BasicFrame(Matrix::Identity(rows, k), kind);
  }

  const Matrix& mat() const noexcept { return mat_; }
  FrameKind kind() const noexcept { return kind_; }
  Eigen::Index n() const noexcept { return mat_.rows(); }
  Eigen::Index k() const noexcept { return mat_.cols(); }

 private:
  Matrix mat_;
  FrameKind kind_;
};

using Frame = BasicFrame<double>;

namespace detail {

// Π(M) without the invertibility check on the acting matrix.
template <typename Scalar>
BasicFrame<Scalar> project(const Mat<Scalar>& m, FrameKind kind) {
  try {
    return BasicFrame<Scalar>(qr_positive(m).q, kind);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) fail(ErrorCode::Singular, "image of the frame lost rank");
    throw;
  }
}

}  // namespace detail

// A ∗ X = Π(A X), the Q factor of A X.
template <typename Scalar, typename Derived>
BasicFrame<Scalar> act(const Eigen::MatrixBase<Derived>& a, const BasicFrame<Scalar>& x) {
  detail::require_square(a, "act");
  if (a.rows() != x.n()) fail(ErrorCode::ShapeMismatch, "act: matrix and frame sizes differ");
  Eigen::ColPivHouseholderQR<Mat<Scalar>> lu(a.eval());
  lu.setThreshold(Scalar(1e-13));
  if (!lu.isInvertible()) fail(ErrorCode::Singular, "act: matrix is numerically singular");
  return detail::project<Scalar>((a * x.mat()).eval(), x.kind());
}

template <typename Scalar>
BasicFrame<Scalar> truncate(const BasicFrame<Scalar>& x, Eigen::Index k2) {
  if (k2 < 1 || k2 > x.k()) fail(ErrorCode::BadIndex, "truncate: need 1 <= k2 <= k");
  return BasicFrame<Scalar>(x.mat().leftCols(k2), x.kind());
}

class Signature {
 public:
  explicit Signature(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.empty() || parts_.front() < 1) fail(ErrorCode::InvalidArgument, "signature parts must be positive");
    for (std::size_t i = 1; i < parts_.size(); ++i)
      if (parts_[i] <= parts_[i - 1]) fail(ErrorCode::InvalidArgument, "signature must be strictly increasing");
  }

  // (1, 2, ..., k)
  static Signature full(int k) {
    std::vector<int> p(k);
    for (int i = 0; i < k; ++i) p[i] = i + 1;
    return Signature(std::move(p));
  }

  const std::vector<int>& parts() const noexcept { return parts_; }
  int last() const { return parts_.back(); }
  bool operator==(const Signature&) const = default;

 private:
  std::vector<int> parts_;
};

template <typename Scalar>
class BasicFlag {
 public:
  BasicFlag(BasicFrame<Scalar> frame, Signature sig) : frame_(std::move(frame)), sig_(std::move(sig)) {
    if (frame_.k() != sig_.last()) fail(ErrorCode::ShapeMismatch, "flag: frame columns != last signature part");
  }

  const BasicFrame<Scalar>& frame() const noexcept { return frame_; }
  const Signature& signature() const noexcept { return sig_; }

  // Orthogonal projector onto V_{k_i}.
  Mat<Scalar> projector(std::size_t part) const {
    const auto cols = frame_.mat().leftCols(sig_.parts().at(part));
    return cols * cols.transpose();
  }

 private:
  BasicFrame<Scalar> frame_;
  Signature sig_;
};

using Flag = BasicFlag<double>;

template <typename Scalar>
BasicFlag<Scalar> to_flag(const BasicFrame<Scalar>& x, const Signature& sig) {
  if (sig.last() > x.n()) fail(ErrorCode::ShapeMismatch, "to_flag: signature exceeds ambient dimension");
  return BasicFlag<Scalar>(x, sig);
}

// max_i ‖P_{U_i} − P_{V_i}‖_hs over the parts of the signature.
template <typename Scalar>
Scalar flag_distance(const BasicFlag<Scalar>& u, const BasicFlag<Scalar>& v) {
  if (!(u.signature() == v.signature()) || u.frame().n() != v.frame().n())
    fail(ErrorCode::SignatureMismatch, "flag_distance: signatures or ambient dimensions differ");
  Scalar best(0);
  for (std::size_t i = 0; i < u.signature().parts().size(); ++i) {
    const Mat<Scalar> gap = u.projector(i) - v.projector(i);
    best = std::max(best, hs_norm(gap));
  }
  return best;
}

template <typename Scalar>
bool flags_equal(const BasicFlag<Scalar>& u, const BasicFlag<Scalar>& v) {
  return flag_distance(u, v) < Scalar(1e-8);
}

template <typename Scalar>
bool is_isotropic(const BasicFlag<Scalar>& v, const Tolerance& tol = {}) {
  if (v.frame().n() % 2 != 0) fail(ErrorCode::OddAmbient, "is_isotropic: odd ambient dimension");
  return isotropy_residual(v.frame().mat()) < Scalar(tol.rel);
}

}  // namespace flagdyn
