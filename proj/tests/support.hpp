#pragma once

// Seeded generators and independent oracles shared by the test binaries.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "flagdyn/frame.hpp"
#include "flagdyn/linalg.hpp"

namespace testing_support {

using flagdyn::MatX;
using flagdyn::VecX;

inline MatX gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  MatX m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Well conditioned random invertible matrix: I + 0.3 G.
inline MatX invertible(std::mt19937_64& rng, Eigen::Index n) {
  return MatX::Identity(n, n) + 0.3 * gaussian(rng, n, n);
}

// Modified Gram-Schmidt, positive diagonal.
inline std::pair<MatX, MatX> mgs(const MatX& a) {
  const Eigen::Index n = a.rows(), k = a.cols();
  MatX q = a, r = MatX::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) {
        const double c = q.col(i).dot(q.col(j));
        r(i, j) += c;
        q.col(j) -= c * q.col(i);
      }
    r(j, j) = q.col(j).norm();
    q.col(j) /= r(j, j);
  }
  (void)n;
  return {q, r};
}

inline flagdyn::Frame random_frame(std::mt19937_64& rng, Eigen::Index n, Eigen::Index k) {
  return flagdyn::Frame::orthonormalize(gaussian(rng, n, k));
}

// exp(J S) with S symmetric: a symplectic matrix.
inline MatX random_symplectic(std::mt19937_64& rng, Eigen::Index n, double scale = 0.3) {
  MatX s = gaussian(rng, 2 * n, 2 * n);
  s = (0.5 * scale * (s + s.transpose())).eval();
  return flagdyn::expm((flagdyn::symplectic_j<double>(n) * s).eval());
}

// exp(Ω) with Ω skew and commuting with J: orthogonal and symplectic.
inline MatX random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  const MatX j = flagdyn::symplectic_j<double>(n);
  MatX g = gaussian(rng, 2 * n, 2 * n);
  g = (g - g.transpose()).eval();
  return flagdyn::expm((0.5 * (g + j * g * j.transpose())).eval());
}

inline flagdyn::Frame random_unitary_frame(std::mt19937_64& rng, Eigen::Index n, Eigen::Index k) {
  return flagdyn::Frame(random_unitary(rng, n).leftCols(k), flagdyn::FrameKind::unitary);
}

// Distinct descending eigenvalues with gaps of at least `gap`.
inline VecX descending(std::mt19937_64& rng, int n, double lo, double hi, double gap) {
  for (;;) {
    VecX v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
    std::sort(v.data(), v.data() + n, std::greater<>());
    bool ok = true;
    for (int i = 1; i < n; ++i) ok = ok && v[i - 1] - v[i] >= gap;
    if (ok) return v;
  }
}

// Strictly decreasing positive weights.
inline std::vector<double> strict_weights(std::mt19937_64& rng, int k) {
  std::vector<double> b(k);
  double cur = uniform(rng, 1.0, 2.0);
  for (int i = 0; i < k; ++i) {
    b[i] = cur;
    cur -= uniform(rng, 0.1, 0.3);
    cur = std::max(cur, 0.05 * (k - i));
  }
  return b;
}

// Orthogonal projection onto the null space of a linear map given as a matrix
// acting on vec(V) (column-major).
inline MatX project_onto_kernel(const MatX& constraints, const MatX& b) {
  Eigen::JacobiSVD<MatX> svd(constraints, Eigen::ComputeFullV);
  const double cutoff = 1e-10 * std::max(1.0, svd.singularValues().size() ? svd.singularValues()[0] : 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()[i] > cutoff;
  const MatX range = svd.matrixV().leftCols(rank);
  const Eigen::Map<const VecX> vb(b.data(), b.size());
  const VecX out = vb - range * (range.transpose() * vb);
  return Eigen::Map<const MatX>(out.data(), b.rows(), b.cols());
}

// Rows of the linearized constraints of O_{n,k} (and O^sp_{n,k}) at x.
inline MatX frame_constraints(const MatX& x, bool unitary) {
  const Eigen::Index n = x.rows(), k = x.cols(), d = n * k;
  std::vector<VecX> rows;
  auto unit = [&](Eigen::Index r, Eigen::Index c) {
    MatX e = MatX::Zero(n, k);
    e(r, c) = 1;
    return e;
  };
  std::vector<MatX> basis;
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < n; ++r) basis.push_back(unit(r, c));
  const MatX jm = unitary ? flagdyn::symplectic_j<double>(n / 2) : MatX();
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a; b < k; ++b) {
      VecX row(d), row2(d);
      for (Eigen::Index t = 0; t < d; ++t) {
        const MatX& v = basis[t];
        row[t] = (x.transpose() * v + v.transpose() * x)(a, b);
        if (unitary) row2[t] = (x.transpose() * jm * v - (x.transpose() * jm * v).transpose())(a, b);
      }
      rows.push_back(row);
      if (unitary && a != b) rows.push_back(row2);
    }
  MatX out(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = rows[i].transpose();
  return out;
}

// hs-orthonormal basis of T_X O_{n,k}.
inline std::vector<MatX> tangent_basis(const MatX& x) {
  const MatX c = frame_constraints(x, false);
  Eigen::JacobiSVD<MatX> svd(c, Eigen::ComputeFullV);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()[i] > 1e-10;
  std::vector<MatX> out;
  const double scale = std::sqrt(static_cast<double>(x.cols()));
  for (Eigen::Index j = rank; j < svd.matrixV().cols(); ++j) {
    const VecX v = svd.matrixV().col(j) * scale;
    out.push_back(Eigen::Map<const MatX>(v.data(), x.rows(), x.cols()));
  }
  return out;
}

inline double rel_err(double got, double want, double floor = 1e-12) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace testing_support
