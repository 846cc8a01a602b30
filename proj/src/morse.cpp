#include "flagdyn/morse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flagdyn {

Polynomial::Polynomial(std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Polynomial Polynomial::geometric(int d) { return Polynomial(std::vector<std::int64_t>(d + 1, 1)); }

std::int64_t Polynomial::eval(std::int64_t t) const {
  std::int64_t acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    if (__builtin_mul_overflow(acc, t, &acc) || __builtin_add_overflow(acc, *it, &acc))
      fail(ErrorCode::OutOfRange, "polynomial evaluation overflow");
  }
  return acc;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (c_.empty() || o.c_.empty()) return Polynomial();
  std::vector<std::int64_t> r(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) {
      std::int64_t term;
      if (__builtin_mul_overflow(c_[i], o.c_[j], &term) || __builtin_add_overflow(r[i + j], term, &r[i + j]))
        fail(ErrorCode::OutOfRange, "polynomial coefficient overflow");
    }
  return Polynomial(std::move(r));
}

std::string Polynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || c_[i] != 1) os << c_[i];
    if (i >= 1) os << 't';
    if (i >= 2) os << '^' << i;
  }
  return os.str();
}

SpectralData geometric_spectrum(int n, bool symplectic, double r) {
  if (n < 1) fail(ErrorCode::BadSizes, "geometric_spectrum: n >= 1");
  if (!(r > 1)) fail(ErrorCode::InvalidArgument, "geometric_spectrum: ratio must exceed 1");
  if (!symplectic) {
    VecX ev(n);
    for (int i = 1; i <= n; ++i) ev[i - 1] = std::pow(r, n + 1 - 2 * i);
    return SpectralData::diagonal(ev);
  }
  VecX ev(2 * n);
  for (int i = 1; i <= n; ++i) {
    ev[i - 1] = std::pow(r, n + 1 - i);
    ev[i + n - 1] = 1.0 / ev[i - 1];
  }
  return SpectralData::diagonal(ev);
}

SpectralData normalized_spectrum(std::vector<double> values, bool symplectic) {
  if (values.empty()) fail(ErrorCode::BadSizes, "normalized_spectrum: no eigenvalues");
  for (double v : values)
    if (!(v > 0) || !std::isfinite(v)) fail(ErrorCode::NonPositiveEigenvalue, "eigenvalues must be positive");
  if (symplectic)
    for (double& v : values) v = std::max(v, 1.0 / v);
  std::sort(values.begin(), values.end(), std::greater<>());
  const int n = static_cast<int>(values.size());
  if (!symplectic) {
    double logsum = 0;
    for (double v : values) logsum += std::log(v);
    const double scale = std::exp(-logsum / n);
    VecX ev(n);
    for (int i = 0; i < n; ++i) ev[i] = values[i] * scale;
    return SpectralData::diagonal(ev);
  }
  VecX ev(2 * n);
  for (int i = 0; i < n; ++i) {
    ev[i] = values[i];
    ev[i + n] = 1.0 / values[i];
  }
  return SpectralData::diagonal(ev);
}

std::vector<Perm> fixed_points(int n, int k, bool symplectic, std::uint64_t budget) {
  return all_perms(n, k, symplectic, budget);
}

Frame perm_frame(const Perm& p) {
  MatX x = MatX::Zero(p.universe(), p.k());
  for (int i = 0; i < p.k(); ++i) x(p[i] - 1, i) = 1.0;
  return Frame(x, p.symplectic() ? FrameKind::unitary : FrameKind::orthogonal);
}

MatX chart_generator(const Perm& p, const Move& m) {
  const int dim = p.universe();
  const int a = p[m.i] - 1, b = m.target[m.i] - 1;
  MatX g = MatX::Zero(dim, dim);
  g(b, a) = 1.0;
  g(a, b) = -1.0;
  if (!p.symplectic() || m.kind == MoveKind::conjugate) return g;
  const MatX jm = symplectic_j<double>(p.n());
  return g + jm * g * jm.transpose();
}

namespace {

void require_spectrum(const SpectralData& a, const Perm& p) {
  if (a.size() != p.universe()) fail(ErrorCode::ShapeMismatch, "spectral data does not match the permutation");
  if (!a.simple()) fail(ErrorCode::NotSimpleSpectrum, "spectrum has a repeated eigenvalue");
  if (a.evals().minCoeff() <= 0) fail(ErrorCode::NonPositiveEigenvalue, "spectrum must be positive");
}

double lam(const SpectralData& a, int index) { return a.evals()[index - 1]; }

VecX chart_coordinates(const MatX& y, const std::vector<Move>& ms) {
  VecX c(ms.size());
  for (std::size_t m = 0; m < ms.size(); ++m) c[m] = y(ms[m].target[ms[m].i] - 1, ms[m].i);
  return c;
}

}  // namespace

std::vector<double> jacobian_spectrum(const SpectralData& a, const Perm& p) {
  require_spectrum(a, p);
  std::vector<double> out;
  for (const Move& m : moves(p)) out.push_back(lam(a, m.target[m.i]) / lam(a, p[m.i]));
  return out;
}

std::vector<double> hessian_spectrum(const SpectralData& a, const Weights& b, const Perm& p) {
  require_spectrum(a, p);
  if (static_cast<int>(b.k()) != p.k()) fail(ErrorCode::ShapeMismatch, "weights do not match the permutation");
  if (!b.strict()) fail(ErrorCode::WeightsNotStrict, "weights must be strictly decreasing");
  const double k = p.k();
  auto sq = [&](int idx) { return lam(a, idx) * lam(a, idx); };
  std::vector<double> out;
  for (const Move& m : moves(p)) {
    const int i = m.i;
    const double bi = b.b()[i] * b.b()[i];
    switch (m.kind) {
      case MoveKind::replace:
      case MoveKind::conjugate:
        out.push_back(2.0 / k * bi * (sq(m.target[i]) - sq(p[i])));
        break;
      case MoveKind::swap: {
        const double bj = b.b()[m.j] * b.b()[m.j];
        out.push_back(2.0 / k * (bi - bj) * (sq(p[m.j]) - sq(p[i])));
        break;
      }
      case MoveKind::conj_swap: {
        const int j = m.j;
        const double bj = b.b()[j] * b.b()[j];
        const int cpi = conj_index(p[i], p.n()), cpj = conj_index(p[j], p.n());
        out.push_back(2.0 / k * (bi * (sq(cpj) - sq(p[i])) + bj * (sq(cpi) - sq(p[j]))));
        break;
      }
    }
  }
  return out;
}

MatX numerical_jacobian(const SpectralData& a, const Perm& p, double h) {
  require_spectrum(a, p);
  const auto ms = moves(p);
  const MatX am = a.matrix();
  const MatX x = perm_frame(p).mat();
  MatX jac(ms.size(), ms.size());
  for (std::size_t m = 0; m < ms.size(); ++m) {
    const MatX g = chart_generator(p, ms[m]);
    const MatX yp = qr_positive((am * expm((h * g).eval()) * x).eval()).q;
    const MatX ym = qr_positive((am * expm((-h * g).eval()) * x).eval()).q;
    jac.col(m) = (chart_coordinates(yp, ms) - chart_coordinates(ym, ms)) / (2 * h);
  }
  return jac;
}

MatX numerical_hessian(const SpectralData& a, const Weights& b, const Perm& p, double h) {
  require_spectrum(a, p);
  if (static_cast<int>(b.k()) != p.k()) fail(ErrorCode::ShapeMismatch, "weights do not match the permutation");
  const auto ms = moves(p);
  const std::size_t d = ms.size();
  std::vector<MatX> gens;
  for (const Move& m : ms) gens.push_back(chart_generator(p, m));
  const MatX am = a.matrix();
  const MatX x = perm_frame(p).mat();
  const int k = p.k();
  // (1/k) Σ b_i² ‖A x_i‖², i.e. Q_{A²,b}
  auto f = [&](const VecX& theta) {
    MatX omega = MatX::Zero(x.rows(), x.rows());
    for (std::size_t m = 0; m < d; ++m) omega += theta[m] * gens[m];
    const MatX ax = am * expm(omega) * x;
    double s = 0;
    for (int i = 0; i < k; ++i) s += b.b()[i] * b.b()[i] * ax.col(i).squaredNorm();
    return s / k;
  };
  const VecX zero = VecX::Zero(d);
  const double f0 = f(zero);
  MatX hess(d, d);
  for (std::size_t m = 0; m < d; ++m) {
    VecX e = zero;
    e[m] = h;
    hess(m, m) = (f(e) - 2 * f0 + f(-e)) / (h * h);
    for (std::size_t l = 0; l < m; ++l) {
      VecX u = zero, v = zero;
      u[m] = h;
      v[l] = h;
      const double mixed = (f(u + v) - f(u - v) - f(v - u) + f(-u - v)) / (4 * h * h);
      hess(m, l) = hess(l, m) = mixed;
    }
  }
  return hess;
}

Polynomial poincare_poly(int n, int k, bool symplectic) {
  if (n < 1 || k < 1 || k > n) fail(ErrorCode::BadSizes, "poincare_poly: need 1 <= k <= n");
  Polynomial p({1});
  for (int i = 1; i <= k; ++i) p = p * Polynomial::geometric(symplectic ? 2 * n - 2 * i + 1 : n - i);
  return p;
}

Polynomial morse_poly(int n, int k, bool symplectic, std::uint64_t budget) {
  const auto perms = fixed_points(n, k, symplectic, budget);
  std::vector<std::int64_t> c(graph_degree(n, k, symplectic) + 1, 0);
  for (const Perm& p : perms) ++c.at(index_h(p));
  return Polynomial(std::move(c));
}

namespace {

// C_i: indices still free before position i, along the order.
std::vector<int> free_before(const std::vector<int>& prefix, int n, bool sp) {
  const int m = sp ? 2 * n : n;
  std::vector<char> used(m + 1, 0);
  for (int v : prefix) {
    used[v] = 1;
    if (sp) used[conj_index(v, n)] = 1;
  }
  std::vector<int> out;
  for (int v = 1; v <= m; ++v)
    if (!used[v]) out.push_back(v);
  std::sort(out.begin(), out.end(), [&](int a, int b) { return before(a, b, n, sp); });
  return out;
}

}  // namespace

Perm counting_bijection(int n, int k, bool symplectic, const std::vector<int>& s) {
  if (n < 1 || k < 1 || k > n) fail(ErrorCode::BadSizes, "counting_bijection: need 1 <= k <= n");
  if (static_cast<int>(s.size()) != k) fail(ErrorCode::OutOfRange, "counting_bijection: code length must be k");
  std::vector<int> word;
  for (int i = 0; i < k; ++i) {
    const auto c = free_before(word, n, symplectic);
    if (s[i] < 0 || s[i] >= static_cast<int>(c.size())) fail(ErrorCode::OutOfRange, "counting_bijection: s_i out of range");
    word.push_back(c[s[i]]);
  }
  return Perm(n, word, symplectic);
}

std::vector<int> counting_code(const Perm& p) {
  std::vector<int> s, prefix;
  for (int i = 0; i < p.k(); ++i) {
    const auto c = free_before(prefix, p.n(), p.symplectic());
    s.push_back(static_cast<int>(std::find(c.begin(), c.end(), p[i]) - c.begin()));
    prefix.push_back(p[i]);
  }
  return s;
}

bool Certificate::passed() const {
  if (!match) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  for (const auto& r : per_point)
    if (!r.ok) return false;
  return true;
}

Certificate perfectness_certificate(int n, int k, bool symplectic, const CertificateOptions& opt) {
  Certificate cert;
  cert.n = n;
  cert.k = k;
  cert.symplectic = symplectic;
  cert.poincare = poincare_poly(n, k, symplectic);
  cert.morse = morse_poly(n, k, symplectic, opt.budget);
  cert.match = cert.morse == cert.poincare;
  cert.checks.push_back({"morse_equals_poincare", cert.match});

  const SpectralData a = opt.spectrum ? *opt.spectrum : geometric_spectrum(n, symplectic);
  std::vector<double> wb(k);
  for (int i = 0; i < k; ++i) wb[i] = k - i;
  const Weights b = opt.weights ? *opt.weights : Weights(wb);
  if (!a.simple()) fail(ErrorCode::NotSimpleSpectrum, "certificate: spectrum has a repeated eigenvalue");
  if (!b.strict()) fail(ErrorCode::WeightsNotStrict, "certificate: weights must be strictly decreasing");

  const auto perms = fixed_points(n, k, symplectic, opt.budget);
  const bool numeric = opt.numeric && perms.size() <= opt.numeric_max_points;
  bool indices_ok = true, numeric_ok = true;
  for (const Perm& p : perms) {
    CriticalReport r(p);
    r.h = index_h(p);
    r.jacobian_eigs = jacobian_spectrum(a, p);
    r.hessian_eigs = hessian_spectrum(a, b, p);
    int expanding = 0;
    for (double v : r.jacobian_eigs) expanding += v > 1.0;
    for (double v : r.hessian_eigs) {
      r.morse_index += v > 0;
      if (std::abs(v) < 1e-12) r.nondegenerate = false;
    }
    r.ok = r.nondegenerate && r.morse_index == r.h && expanding == r.h;
    if (numeric) {
      const MatX hn = numerical_hessian(a, b, p, 1e-3);
      Eigen::SelfAdjointEigenSolver<MatX> es(hn);
      std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
      std::vector<double> want = r.hessian_eigs;
      std::sort(want.begin(), want.end());
      bool close = got.size() == want.size();
      int pos = 0;
      for (std::size_t m = 0; close && m < got.size(); ++m) {
        close = std::abs(got[m] - want[m]) <= opt.rel_tol * std::max(std::abs(want[m]), 1e-12);
        pos += got[m] > 0;
      }
      r.numeric_hessian_eigs = got;
      if (!close || pos != r.h) {
        r.ok = false;
        numeric_ok = false;
      }
    }
    indices_ok = indices_ok && r.ok;
    cert.per_point.push_back(std::move(r));
  }
  cert.checks.push_back({"index_equals_h", indices_ok});
  if (numeric) cert.checks.push_back({"numeric_hessian_matches", numeric_ok});
  return cert;
}

}  // namespace flagdyn
