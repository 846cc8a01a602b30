#pragma once

// Flows on frame manifolds: the QR vector field F_A, the flows φ_A^t, the
// quadratic functions Q_{A,b} with their gradients, and the Lyapunov audit.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "flagdyn/errors.hpp"
#include "flagdyn/frame.hpp"
#include "flagdyn/linalg.hpp"

namespace flagdyn {

// Eigendata of a symmetric matrix A = V diag(λ) Vᵀ. Indexing follows the
// descending convention λ_1 ≥ λ_2 ≥ ... used throughout the library.
template <typename Scalar>
class BasicSpectralData {
 public:
  BasicSpectralData(Vec<Scalar> evals, Mat<Scalar> evecs) : evals_(std::move(evals)), evecs_(std::move(evecs)) {
    if (evecs_.rows() != evecs_.cols() || evecs_.rows() != evals_.size())
      fail(ErrorCode::ShapeMismatch, "spectral data: sizes differ");
    if (!evals_.allFinite() || !evecs_.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite spectral data");
    if (orthonormality_residual(evecs_) > Scalar(1e-8))
      fail(ErrorCode::InvalidArgument, "eigenvectors are not orthonormal");
  }

  static BasicSpectralData diagonal(Vec<Scalar> evals) {
    const Eigen::Index n = evals.size();
    return BasicSpectralData(std::move(evals), Mat<Scalar>::Identity(n, n));
  }

  // Eigendecomposition of a symmetric matrix, sorted so that λ is descending.
  static BasicSpectralData from_symmetric(const Mat<Scalar>& a) {
    detail::require_square(a, "from_symmetric");
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(a);
    return BasicSpectralData(es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse());
  }

  const Vec<Scalar>& evals() const noexcept { return evals_; }
  const Mat<Scalar>& evecs() const noexcept { return evecs_; }
  Eigen::Index size() const noexcept { return evals_.size(); }

  Mat<Scalar> matrix() const { return evecs_ * evals_.asDiagonal() * evecs_.transpose(); }

  // exp(tA) from the eigendecomposition.
  Mat<Scalar> exp_matrix(Scalar t) const {
    const Vec<Scalar> e = (t * evals_).array().exp().matrix();
    return evecs_ * e.asDiagonal() * evecs_.transpose();
  }

  BasicSpectralData squared() const { return BasicSpectralData(evals_.array().square().matrix(), evecs_); }

  bool simple(Scalar tol = Scalar(1e-10)) const {
    const Scalar scale = std::max(Scalar(1), evals_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < size(); ++i)
      for (Eigen::Index j = i + 1; j < size(); ++j)
        if (std::abs(evals_[i] - evals_[j]) <= tol * scale) return false;
    return true;
  }

  // Nonincreasing along the index order; for symplectic data along
  // 1 ◁ 2 ◁ ... ◁ n ◁ 2n ◁ ... ◁ n+1.
  bool ordered(bool symplectic = false) const {
    std::vector<Eigen::Index> order(size());
    const Eigen::Index half = size() / 2;
    for (Eigen::Index r = 0; r < size(); ++r)
      order[r] = (symplectic && r >= half) ? size() - 1 - (r - half) : r;
    for (Eigen::Index r = 1; r < size(); ++r)
      if (evals_[order[r]] > evals_[order[r - 1]]) return false;
    return true;
  }

 private:
  Vec<Scalar> evals_;
  Mat<Scalar> evecs_;
};

using SpectralData = BasicSpectralData<double>;

template <typename Scalar>
class BasicWeights {
 public:
  explicit BasicWeights(std::vector<Scalar> b) : b_(std::move(b)) {
    if (b_.empty()) fail(ErrorCode::InvalidArgument, "weights: empty");
    for (std::size_t i = 0; i < b_.size(); ++i) {
      if (!(b_[i] > Scalar(0)) || !std::isfinite(static_cast<double>(b_[i])))
        fail(ErrorCode::InvalidArgument, "weights must be positive");
      if (i > 0 && b_[i] > b_[i - 1]) fail(ErrorCode::InvalidArgument, "weights must be nonincreasing");
    }
  }

  static BasicWeights ones(std::size_t k) { return BasicWeights(std::vector<Scalar>(k, Scalar(1))); }

  const std::vector<Scalar>& b() const noexcept { return b_; }
  std::size_t k() const noexcept { return b_.size(); }

  bool strict() const {
    for (std::size_t i = 1; i < b_.size(); ++i)
      if (!(b_[i] < b_[i - 1])) return false;
    return true;
  }

  // ω_i = i(b_i² − b_{i+1}²)/k, ω_k = b_k²
  std::vector<Scalar> pullback_weights() const {
    const std::size_t k = b_.size();
    std::vector<Scalar> w(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Scalar next = i + 1 < k ? b_[i + 1] : Scalar(0);
      w[i] = Scalar(i + 1) * (b_[i] * b_[i] - next * next) / Scalar(k);
    }
    return w;
  }

 private:
  std::vector<Scalar> b_;
};

using Weights = BasicWeights<double>;

enum class Integrator { exact_exponential, rk4_projected };

struct FlowConfig {
  double step = 1e-3;
  double horizon = 1.0;
  Integrator integrator = Integrator::exact_exponential;

  void validate() const {
    if (!(step > 0) || !(horizon > 0) || step > horizon)
      fail(ErrorCode::InvalidArgument, "flow config: need 0 < step <= horizon");
  }
};

namespace detail {

template <typename Scalar>
void require_compatible(const BasicSpectralData<Scalar>& a, const BasicFrame<Scalar>& x) {
  if (a.size() != x.n()) fail(ErrorCode::ShapeMismatch, "spectral data and frame sizes differ");
}

template <typename Scalar>
void require_compatible(const BasicWeights<Scalar>& b, const BasicFrame<Scalar>& x) {
  if (static_cast<Eigen::Index>(b.k()) != x.k()) fail(ErrorCode::ShapeMismatch, "weights and frame sizes differ");
}

// QR re-projection. Unitary frames are also swept against JX_j column by
// column, which removes the isotropy drift a numerical step leaves behind.
template <typename Scalar>
BasicFrame<Scalar> retract(const Mat<Scalar>& y, FrameKind kind) {
  if (kind == FrameKind::orthogonal) return project<Scalar>(y, kind);
  Mat<Scalar> q = qr_positive(y).q;
  const Mat<Scalar> jm = symplectic_j<Scalar>(q.rows() / 2);
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    Vec<Scalar> v = q.col(i);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < i; ++j) {
        const Vec<Scalar> jx = jm * q.col(j);
        v -= q.col(j).dot(v) * q.col(j);
        v -= jx.dot(v) * jx;
      }
    q.col(i) = v / v.norm();
  }
  return BasicFrame<Scalar>(q, kind);
}

// One RK4 step of Ẋ = field(X) followed by re-projection.
template <typename Scalar, typename Field>
BasicFrame<Scalar> rk4_step(const Field& field, const BasicFrame<Scalar>& x, Scalar h) {
  const Mat<Scalar>& x0 = x.mat();
  const Mat<Scalar> k1 = field(x0);
  const Mat<Scalar> k2 = field((x0 + Scalar(0.5) * h * k1).eval());
  const Mat<Scalar> k3 = field((x0 + Scalar(0.5) * h * k2).eval());
  const Mat<Scalar> k4 = field((x0 + h * k3).eval());
  const Mat<Scalar> y = x0 + (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  if (!y.allFinite()) fail(ErrorCode::Divergence, "non-finite state");
  const Scalar drift = (y.colwise().norm().array() - Scalar(1)).abs().maxCoeff();
  if (drift > Scalar(1e-3)) fail(ErrorCode::Divergence, "column norms drifted beyond 1e-3; reduce the step");
  return retract<Scalar>(y, x.kind());
}

template <typename Scalar>
Mat<Scalar> vector_field_raw(const Mat<Scalar>& a, const Mat<Scalar>& x) {
  const Mat<Scalar> ax = a * x;
  return ax - x * tri_left((x.transpose() * ax).eval());
}

// 2 Σ_{i=2}^{k+1} P_i A X E_{i−1}(b), before projection to the tangent space.
template <typename Scalar>
Mat<Scalar> gradient_sum(const Mat<Scalar>& a, const std::vector<Scalar>& b, const Mat<Scalar>& x) {
  const Eigen::Index n = x.rows(), k = x.cols();
  const Mat<Scalar> ax = a * x;
  Mat<Scalar> g = Mat<Scalar>::Zero(n, k);
  for (Eigen::Index i = 2; i <= k + 1; ++i) {
    const Scalar bi = i <= k ? b[i - 1] : Scalar(0);
    Vec<Scalar> e(k);
    for (Eigen::Index j = 0; j < k; ++j) e[j] = j < i - 1 ? b[j] * b[j] - bi * bi : Scalar(0);
    Mat<Scalar> p;
    if (i <= k)
      p = x.col(i - 1) * x.col(i - 1).transpose();
    else
      p = Mat<Scalar>::Identity(n, n) - x * x.transpose();
    g += Scalar(2) * p * ax * e.asDiagonal();
  }
  return g;
}

// Unitary frames project onto T_X O^sp without the frame check, since RK4
// stages sit slightly off the manifold.
template <typename Scalar>
Mat<Scalar> quad_gradient_raw(const Mat<Scalar>& a, const std::vector<Scalar>& b, const Mat<Scalar>& x,
                              bool unitary = false) {
  const Mat<Scalar> g = gradient_sum(a, b, x);
  if (!unitary) return proj_tangent_orth(x, g);
  const Mat<Scalar> jx = symplectic_j<Scalar>(x.rows() / 2) * x;
  const Mat<Scalar> xtg = x.transpose() * g;
  const Mat<Scalar> jxtg = jx.transpose() * g;
  return Scalar(0.5) * x * (xtg - xtg.transpose()) + Scalar(0.5) * jx * (jxtg + jxtg.transpose()) + g - x * xtg -
         jx * jxtg;
}

}  // namespace detail

// F_A(X) = A X − X (Xᵀ A X)◁
template <typename Scalar>
Mat<Scalar> vector_field(const BasicSpectralData<Scalar>& a, const BasicFrame<Scalar>& x) {
  detail::require_compatible(a, x);
  return detail::vector_field_raw(a.matrix(), x.mat());
}

// φ_A^t(X) = e^{tA} ∗ X
template <typename Scalar>
BasicFrame<Scalar> flow(const BasicSpectralData<Scalar>& a, const BasicFrame<Scalar>& x, Scalar t,
                        const FlowConfig& cfg = {}) {
  using std::abs;
  detail::require_compatible(a, x);
  if (!std::isfinite(static_cast<double>(t))) fail(ErrorCode::InvalidArgument, "flow: non-finite time");
  if (t == Scalar(0)) return x;
  if (cfg.integrator == Integrator::exact_exponential) {
    // Substeps keep exp(sA) well conditioned; the action law makes them exact.
    const Scalar spread = a.evals().maxCoeff() - a.evals().minCoeff();
    const long m = std::max(1L, static_cast<long>(std::ceil(static_cast<double>(abs(t) * spread / Scalar(4)))));
    const Mat<Scalar> e = a.exp_matrix(t / Scalar(m));
    BasicFrame<Scalar> y = x;
    for (long s = 0; s < m; ++s) y = detail::project<Scalar>((e * y.mat()).eval(), y.kind());
    return y;
  }
  if (!(cfg.step > 0)) fail(ErrorCode::InvalidArgument, "flow: step must be positive");
  const Mat<Scalar> am = a.matrix();
  const long m = std::max(1L, static_cast<long>(std::ceil(static_cast<double>(abs(t)) / cfg.step - 1e-9)));
  const Scalar h = t / Scalar(m);
  auto field = [&](const Mat<Scalar>& y) { return detail::vector_field_raw(am, y); };
  BasicFrame<Scalar> y = x;
  for (long s = 0; s < m; ++s) y = detail::rk4_step<Scalar>(field, y, h);
  return y;
}

// Q_{A,b}(X) = ⟨A X D_b, X D_b⟩_hs
template <typename Scalar>
Scalar quad(const BasicSpectralData<Scalar>& a, const BasicWeights<Scalar>& b, const BasicFrame<Scalar>& x) {
  detail::require_compatible(a, x);
  detail::require_compatible(b, x);
  const Eigen::Map<const Vec<Scalar>> bv(b.b().data(), static_cast<Eigen::Index>(b.k()));
  const Mat<Scalar> xd = x.mat() * bv.asDiagonal();
  return hs_inner((a.matrix() * xd).eval(), xd);
}

// Riemannian (hs) gradient of Q_{A,b}. The sum 2 Σ P_i A X E_{i−1}(b) pairs
// correctly with every tangent vector but carries a normal component when the
// weights are not constant, so it is projected onto T_X O_{n,k}.
template <typename Scalar>
Mat<Scalar> quad_gradient(const BasicSpectralData<Scalar>& a, const BasicWeights<Scalar>& b,
                          const BasicFrame<Scalar>& x) {
  detail::require_compatible(a, x);
  detail::require_compatible(b, x);
  return detail::quad_gradient_raw(a.matrix(), b.b(), x.mat(), x.kind() == FrameKind::unitary);
}

template <typename Scalar>
using FrameObserver = std::function<void(Scalar, const BasicFrame<Scalar>&)>;

// RK4 integration of Ẋ = ±∇Q_{A,b}(X) with QR re-projection; ascent by default.
template <typename Scalar>
BasicFrame<Scalar> gradient_flow(const BasicSpectralData<Scalar>& a, const BasicWeights<Scalar>& b,
                                 const BasicFrame<Scalar>& x, Scalar t, const FlowConfig& cfg = {},
                                 bool ascent = true, const FrameObserver<Scalar>& observe = {}) {
  detail::require_compatible(a, x);
  detail::require_compatible(b, x);
  if (!(t >= Scalar(0)) || !std::isfinite(static_cast<double>(t)))
    fail(ErrorCode::InvalidArgument, "gradient_flow: need t >= 0");
  if (!(cfg.step > 0)) fail(ErrorCode::InvalidArgument, "gradient_flow: step must be positive");
  if (observe) observe(Scalar(0), x);
  if (t == Scalar(0)) return x;
  const Mat<Scalar> am = a.matrix();
  const Scalar sign = ascent ? Scalar(1) : Scalar(-1);
  const bool unitary = x.kind() == FrameKind::unitary;
  auto field = [&](const Mat<Scalar>& y) { return (sign * detail::quad_gradient_raw(am, b.b(), y, unitary)).eval(); };
  const long m = std::max(1L, static_cast<long>(std::ceil(static_cast<double>(t) / cfg.step - 1e-9)));
  const Scalar h = t / Scalar(m);
  BasicFrame<Scalar> y = x;
  for (long s = 0; s < m; ++s) {
    y = detail::rk4_step<Scalar>(field, y, h);
    if (observe) observe(h * Scalar(s + 1), y);
  }
  return y;
}

// ξ_P(A,H) = tr(P A (I − P) H)
template <typename Scalar>
Scalar xi_form(const Mat<Scalar>& p, const BasicSpectralData<Scalar>& a, const BasicSpectralData<Scalar>& h) {
  detail::require_square(p, "xi_form");
  if (p.rows() != a.size() || p.rows() != h.size()) fail(ErrorCode::ShapeMismatch, "xi_form: sizes differ");
  if ((p - p.transpose()).norm() > Scalar(1e-8) || (p * p - p).norm() > Scalar(1e-8))
    fail(ErrorCode::NotProjector, "xi_form: p is not a symmetric idempotent");
  const Eigen::Index n = p.rows();
  return (p * a.matrix() * (Mat<Scalar>::Identity(n, n) - p) * h.matrix()).trace();
}

struct AuditOptions {
  double monotone_slack = 1e-10;
  int stall_window = 50;
  double stall_tolerance = 1e-14;
  double field_tolerance = 1e-6;
};

struct AuditSample {
  double t;
  double q;
  double grad_norm;
  double field_norm;
};

struct LyapunovReport {
  std::vector<AuditSample> samples;
  bool monotone = true;
  double max_violation = 0.0;  // largest drop Q(t_s) − Q(t_{s+1}) observed
  bool strict = true;          // every stall happened where ‖F_H‖ is below field_tolerance
  int stalls = 0;
  std::optional<std::vector<int>> converged_to;  // eigen-direction indices (1-based) of the limit, if reached

  bool passed() const { return monotone && strict; }
};

namespace detail {

template <typename Scalar>
bool share_ordered_directions(const BasicSpectralData<Scalar>& a, const BasicSpectralData<Scalar>& h) {
  if (a.size() != h.size()) return false;
  // Same eigen-directions up to sign, and both spectra ordered the same way.
  const Mat<Scalar> overlap = (a.evecs().transpose() * h.evecs()).cwiseAbs();
  if ((overlap - Mat<Scalar>::Identity(a.size(), a.size())).norm() > Scalar(1e-8)) return false;
  return a.ordered() && h.ordered();
}

// Index of the dominant eigen-direction of each column, when every column is
// (numerically) an eigen-direction.
template <typename Scalar>
std::optional<std::vector<int>> eigen_columns(const BasicSpectralData<Scalar>& h, const BasicFrame<Scalar>& x,
                                              Scalar tol) {
  const Mat<Scalar> c = h.evecs().transpose() * x.mat();
  std::vector<int> out;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    Eigen::Index r;
    c.col(j).cwiseAbs().maxCoeff(&r);
    if (std::abs(std::abs(c(r, j)) - Scalar(1)) > tol) return std::nullopt;
    out.push_back(static_cast<int>(r) + 1);
  }
  return out;
}

}  // namespace detail

// Integrates φ_H^t and checks that Q_{A,b} is a strict Lyapunov function along it.
template <typename Scalar>
LyapunovReport lyapunov_audit(const BasicSpectralData<Scalar>& a, const BasicSpectralData<Scalar>& h,
                              const BasicWeights<Scalar>& b, const BasicFrame<Scalar>& x, const FlowConfig& cfg,
                              const AuditOptions& opt = {}) {
  cfg.validate();
  detail::require_compatible(a, x);
  detail::require_compatible(b, x);
  if (!detail::share_ordered_directions(a, h))
    fail(ErrorCode::PreconditionViolated, "A and H must share the same ordered eigen-directions");
  if (!b.strict()) fail(ErrorCode::PreconditionViolated, "weights must be strictly decreasing");

  const Mat<Scalar> am = a.matrix();
  const Mat<Scalar> hm = h.matrix();
  auto sample = [&](Scalar t, const BasicFrame<Scalar>& y) {
    const Scalar q = quad(a, b, y);
    const Scalar g = hs_norm(detail::quad_gradient_raw(am, b.b(), y.mat()));
    const Scalar f = hs_norm(detail::vector_field_raw(hm, y.mat()));
    return AuditSample{static_cast<double>(t), static_cast<double>(q), static_cast<double>(g),
                       static_cast<double>(f)};
  };

  LyapunovReport rep;
  const long steps = static_cast<long>(std::ceil(cfg.horizon / cfg.step - 1e-9));
  const Scalar dt = Scalar(cfg.horizon) / Scalar(steps);
  FlowConfig one = cfg;
  one.step = std::min(cfg.step, static_cast<double>(dt));
  BasicFrame<Scalar> y = x;
  rep.samples.reserve(steps + 1);
  rep.samples.push_back(sample(Scalar(0), y));
  for (long s = 1; s <= steps; ++s) {
    y = flow(h, y, dt, one);
    rep.samples.push_back(sample(dt * Scalar(s), y));
  }

  for (std::size_t s = 1; s < rep.samples.size(); ++s) {
    const double drop = rep.samples[s - 1].q - rep.samples[s].q;
    rep.max_violation = std::max(rep.max_violation, drop);
    if (drop > opt.monotone_slack) rep.monotone = false;
  }
  const std::size_t w = static_cast<std::size_t>(opt.stall_window);
  for (std::size_t s = w; s < rep.samples.size(); ++s) {
    if (std::abs(rep.samples[s].q - rep.samples[s - w].q) < opt.stall_tolerance) {
      ++rep.stalls;
      if (rep.samples[s].field_norm >= opt.field_tolerance) rep.strict = false;
    }
  }
  if (rep.samples.back().field_norm < opt.field_tolerance)
    rep.converged_to = detail::eigen_columns(h, y, Scalar(1e-6));
  return rep;
}

}  // namespace flagdyn
