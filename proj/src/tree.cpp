#include "flagdyn/tree.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace flagdyn {

Subset subset_of(const std::vector<int>& indices) {
  Subset s = 0;
  for (int i : indices) {
    if (i < 1 || i > 64) fail(ErrorCode::BadIndex, "subset index out of range");
    s |= Subset{1} << (i - 1);
  }
  return s;
}

std::vector<int> elements(Subset s) {
  std::vector<int> out;
  while (s) {
    out.push_back(std::countr_zero(s) + 1);
    s &= s - 1;
  }
  return out;
}

int card(Subset s) { return std::popcount(s); }

namespace {

bool subset(Subset a, Subset b) { return (a & ~b) == 0; }
bool nested_or_disjoint(Subset a, Subset b) { return (a & b) == 0 || subset(a, b); }

}  // namespace

Tree::Tree(int n, std::vector<Subset> nodes, bool symplectic)
    : n_(n), nodes_(std::move(nodes)), symplectic_(symplectic) {
  if (n_ < 1 || universe() > 64) fail(ErrorCode::BadSizes, "tree ambient size out of range");
  if (nodes_.empty()) fail(ErrorCode::BadSizes, "tree needs at least one node");
  const Subset all = universe_mask();
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const Subset p = nodes_[j];
    if (p == 0) fail(ErrorCode::InvalidArgument, "empty tree node");
    if (!subset(p, all)) fail(ErrorCode::BadIndex, "tree node outside the index set");
    for (std::size_t i = 0; i < j; ++i) {
      if (!nested_or_disjoint(nodes_[i], p)) fail(ErrorCode::InvalidArgument, "nodes are neither nested nor disjoint");
      if (symplectic_ && !nested_or_disjoint(conj(nodes_[i]), p))
        fail(ErrorCode::InvalidArgument, "conjugate node is neither nested in nor disjoint from a later node");
    }
  }
}

Tree Tree::from_lists(int n, const std::vector<std::vector<int>>& nodes, bool symplectic) {
  std::vector<Subset> s;
  for (const auto& l : nodes) s.push_back(subset_of(l));
  return Tree(n, std::move(s), symplectic);
}

Tree Tree::singletons(int n, const std::vector<int>& word, bool symplectic) {
  std::vector<Subset> s;
  for (int w : word) s.push_back(subset_of({w}));
  return Tree(n, std::move(s), symplectic);
}

Tree Tree::maximal(int n, int k, bool symplectic) {
  const int m = symplectic ? 2 * n : n;
  const Subset all = m == 64 ? ~Subset{0} : (Subset{1} << m) - 1;
  return Tree(n, std::vector<Subset>(k, all), symplectic);
}

Subset Tree::universe_mask() const noexcept {
  const int m = universe();
  return m == 64 ? ~Subset{0} : (Subset{1} << m) - 1;
}

Subset Tree::node(int i) const {
  if (i < 0 || i >= k()) fail(ErrorCode::BadIndex, "tree node index out of range");
  return nodes_[i];
}

// i ↦ i+n (mod 2n)
Subset Tree::conj(Subset s) const {
  if (!symplectic_) return s;
  const Subset low = (Subset{1} << n_) - 1;
  return ((s & low) << n_) | (s >> n_);
}

std::vector<std::vector<int>> Tree::lists() const {
  std::vector<std::vector<int>> out;
  for (Subset p : nodes_) out.push_back(elements(p));
  return out;
}

std::string Tree::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < k(); ++i) {
    if (i) os << ',';
    os << '{';
    const auto e = elements(nodes_[i]);
    for (std::size_t j = 0; j < e.size(); ++j) os << (j ? "," : "") << e[j];
    os << '}';
  }
  os << ')';
  return os.str();
}

TreeStats stats(const Tree& t) {
  const int k = t.k();
  TreeStats st;
  st.card.resize(k);
  st.depth.assign(k, 0);
  st.codepth.assign(k, 0);
  for (int i = 0; i < k; ++i) {
    st.card[i] = card(t.nodes()[i]);
    for (int s = 0; s < i; ++s) {
      if (subset(t.nodes()[s], t.nodes()[i])) {
        ++st.depth[i];
        ++st.kappa;
      }
      if (t.symplectic() && subset(t.conj(t.nodes()[s]), t.nodes()[i])) {
        ++st.codepth[i];
        ++st.mu;
      }
    }
  }
  return st;
}

bool is_consistent(const Tree& t) {
  const TreeStats st = stats(t);
  for (int i = 0; i < t.k(); ++i)
    if (st.depth[i] + st.codepth[i] + 1 > st.card[i]) return false;
  return true;
}

bool is_full(const Tree& t, int i) {
  if (i < 0 || i >= t.k()) fail(ErrorCode::BadIndex, "is_full: node index out of range");
  const TreeStats st = stats(t);
  return st.depth[i] + st.codepth[i] + 1 == st.card[i];
}

bool is_root(const Tree& t, int i) {
  if (i < 0 || i >= t.k()) fail(ErrorCode::BadIndex, "is_root: node index out of range");
  for (int s = i + 1; s < t.k(); ++s)
    if (subset(t.nodes()[i], t.nodes()[s])) return false;
  return true;
}

namespace {

// A later node containing P_i or, in the symplectic case, conj P_i. A full
// node's columns span E_{P_i}, so isotropy already pins later columns off
// E_{conj P_i} and such a node is as redundant as a non-root.
bool absorbed(const Tree& t, int i) {
  const Subset p = t.nodes()[i], cp = t.conj(p);
  for (int s = i + 1; s < t.k(); ++s)
    if (subset(p, t.nodes()[s]) || (t.symplectic() && subset(cp, t.nodes()[s]))) return true;
  return false;
}

int first_reducible(const Tree& t) {
  const TreeStats st = stats(t);
  for (int i = 0; i < t.k(); ++i)
    if (st.depth[i] + st.codepth[i] + 1 == st.card[i] && absorbed(t, i)) return i;
  return -1;
}

}  // namespace

bool is_irreducible(const Tree& t) { return first_reducible(t) < 0; }

Tree reduce(const Tree& t) {
  if (!is_consistent(t)) fail(ErrorCode::Inconsistent, "reduce: tree is inconsistent");
  std::vector<Subset> nodes = t.nodes();
  for (;;) {
    const Tree cur(t.n(), nodes, t.symplectic());
    const int i = first_reducible(cur);
    if (i < 0) return cur;
    const Subset cut = nodes[i] | cur.conj(nodes[i]);
    for (int j = i + 1; j < cur.k(); ++j) {
      nodes[j] &= ~cut;
      if (nodes[j] == 0) fail(ErrorCode::Inconsistent, "reduce emptied a node");
    }
  }
}

int dimension(const Tree& t) {
  if (!is_consistent(t)) fail(ErrorCode::Inconsistent, "dimension: tree is inconsistent");
  const TreeStats st = stats(t);
  int total = -t.k() - st.kappa - st.mu;
  for (int c : st.card) total += c;
  return total;
}

int max_dimension(int n, int k, bool symplectic) {
  return symplectic ? k * (2 * n - k) : k * (2 * n - k - 1) / 2;
}

bool contains(const Tree& t, const Tree& s) {
  if (t.n() != s.n() || t.k() != s.k() || t.symplectic() != s.symplectic())
    fail(ErrorCode::ShapeMismatch, "contains: trees of different shape");
  for (int i = 0; i < t.k(); ++i)
    if (!subset(s.nodes()[i], t.nodes()[i])) return false;
  return true;
}

std::optional<Tree> meet(const Tree& t, const Tree& s) {
  if (t.n() != s.n() || t.k() != s.k() || t.symplectic() != s.symplectic())
    fail(ErrorCode::ShapeMismatch, "meet: trees of different shape");
  std::vector<Subset> nodes(t.k());
  for (int i = 0; i < t.k(); ++i) {
    nodes[i] = t.nodes()[i] & s.nodes()[i];
    if (nodes[i] == 0) return std::nullopt;
  }
  const Tree both(t.n(), std::move(nodes), t.symplectic());
  if (!is_consistent(both)) return std::nullopt;
  return reduce(both);
}

Tree concatenate(const Tree& t, const Tree& s) {
  if (t.n() != s.n() || t.symplectic() != s.symplectic())
    fail(ErrorCode::ShapeMismatch, "concatenate: different ambient sets");
  std::vector<Subset> nodes = t.nodes();
  nodes.insert(nodes.end(), s.nodes().begin(), s.nodes().end());
  return Tree(t.n(), std::move(nodes), t.symplectic());
}

double membership_residual(const Tree& t, const Frame& x, const SpectralData& eigbasis) {
  if (x.n() != t.universe() || x.k() != t.k() || eigbasis.size() != x.n())
    fail(ErrorCode::ShapeMismatch, "member: sizes differ");
  const MatX c = eigbasis.evecs().transpose() * x.mat();
  double worst = 0.0;
  for (int i = 0; i < t.k(); ++i) {
    double out = 0.0;
    for (int r = 0; r < c.rows(); ++r)
      if (!(t.nodes()[i] >> r & 1)) out += c(r, i) * c(r, i);
    worst = std::max(worst, std::sqrt(out));
  }
  return worst;
}

bool member(const Tree& t, const Frame& x, const SpectralData& eigbasis, double tol) {
  return membership_residual(t, x, eigbasis) < tol;
}

namespace {

struct Enumerator {
  int n, k;
  bool sp;
  Subset all;
  std::size_t max_trees;
  std::vector<Subset> cur;
  std::vector<char> full;
  std::vector<Tree>* out;

  Subset conj(Subset s) const {
    if (!sp) return s;
    const Subset low = (Subset{1} << n) - 1;
    return ((s & low) << n) | (s >> n);
  }

  void run(int i) {
    if (i == k) {
      if (out->size() >= max_trees) fail(ErrorCode::SizeLimit, "enumeration exceeded the tree budget");
      out->emplace_back(n, cur, sp);
      return;
    }
    for (Subset p = 1; p <= all; ++p) {
      int depth = 0;
      bool ok = true;
      for (int s = 0; s < i && ok; ++s) {
        const Subset q = cur[s];
        if (!nested_or_disjoint(q, p)) ok = false;
        else if (subset(q, p)) {
          if (full[s]) ok = false;  // an earlier full node would stop being a root
          ++depth;
        }
        if (ok && sp) {
          const Subset cq = conj(q);
          if (!nested_or_disjoint(cq, p)) ok = false;
          else if (subset(cq, p)) {
            if (full[s]) ok = false;
            ++depth;
          }
        }
      }
      if (!ok || depth + 1 > card(p)) continue;
      cur[i] = p;
      full[i] = depth + 1 == card(p);
      run(i + 1);
    }
  }
};

}  // namespace

std::vector<Tree> enumerate_irreducible(int n, int k, bool symplectic, const EnumerationLimits& lim) {
  if (n < 1 || k < 1 || k > n) fail(ErrorCode::BadSizes, "enumerate_irreducible: need 1 <= k <= n");
  if (n > (symplectic ? lim.max_n_symplectic : lim.max_n_general))
    fail(ErrorCode::SizeLimit, "enumerate_irreducible: n beyond the configured bound");
  const int m = symplectic ? 2 * n : n;
  std::vector<Tree> out;
  Enumerator e{n, k, symplectic, (Subset{1} << m) - 1, lim.max_trees, std::vector<Subset>(k),
               std::vector<char>(k), &out};
  e.run(0);
  return out;
}

Frame sample_point(const Tree& t, std::mt19937_64& rng) {
  if (!is_consistent(t)) fail(ErrorCode::Inconsistent, "sample_point: stratum is empty");
  const int m = t.universe();
  std::normal_distribution<double> gauss;
  const MatX jm = t.symplectic() ? symplectic_j<double>(t.n()) : MatX();
  MatX x = MatX::Zero(m, t.k());
  for (int i = 0; i < t.k(); ++i) {
    const Subset p = t.nodes()[i];
    std::vector<VecX> basis;  // orthonormal vectors the new column must avoid
    for (int s = 0; s < i; ++s) {
      if (subset(t.nodes()[s], p)) basis.push_back(x.col(s));
      if (t.symplectic() && subset(t.conj(t.nodes()[s]), p)) basis.push_back(jm * x.col(s));
    }
    VecX v;
    for (int attempt = 0;; ++attempt) {
      v = VecX::Zero(m);
      for (int r = 0; r < m; ++r)
        if (p >> r & 1) v[r] = gauss(rng);
      for (int pass = 0; pass < 2; ++pass)
        for (const VecX& b : basis) v -= b.dot(v) * b;
      if (v.norm() > 1e-6) break;
      if (attempt > 100) fail(ErrorCode::Inconsistent, "sample_point: could not complete the frame");
    }
    x.col(i) = v / v.norm();
  }
  return Frame(x, t.symplectic() ? FrameKind::unitary : FrameKind::orthogonal);
}

MatX constraint_jacobian(const Tree& t, const MatX& x) {
  const int m = t.universe(), k = t.k();
  if (x.rows() != m || x.cols() != k) fail(ErrorCode::ShapeMismatch, "constraint_jacobian: sizes differ");
  // Coordinate index of entry (r, i) of Ŝ(P), or -1 when r ∉ P_i.
  std::vector<std::vector<int>> coord(m, std::vector<int>(k, -1));
  int ncoord = 0;
  for (int i = 0; i < k; ++i)
    for (int r = 0; r < m; ++r)
      if (t.nodes()[i] >> r & 1) coord[r][i] = ncoord++;

  std::vector<std::pair<int, int>> sigma, gamma;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < j; ++i) {
      if (subset(t.nodes()[i], t.nodes()[j])) sigma.emplace_back(i, j);
      if (t.symplectic() && subset(t.conj(t.nodes()[i]), t.nodes()[j])) gamma.emplace_back(i, j);
    }

  const MatX jx = t.symplectic() ? MatX(symplectic_j<double>(t.n()) * x) : MatX();
  MatX d = MatX::Zero(k + static_cast<int>(sigma.size() + gamma.size()), ncoord);
  auto put = [&](int row, int col_i, const VecX& g) {
    for (int r = 0; r < m; ++r)
      if (coord[r][col_i] >= 0) d(row, coord[r][col_i]) += g[r];
  };
  int row = 0;
  for (int i = 0; i < k; ++i) put(row++, i, 2.0 * x.col(i));
  for (auto [i, j] : sigma) {
    put(row, j, x.col(i));
    put(row, i, x.col(j));
    ++row;
  }
  // d(JX_i·X_j) = JX_i·Y_j − JX_j·Y_i
  for (auto [i, j] : gamma) {
    put(row, j, jx.col(i));
    put(row, i, -jx.col(j));
    ++row;
  }
  return d;
}

int numerical_dimension(const Tree& t, const MatX& x) {
  const MatX d = constraint_jacobian(t, x);
  Eigen::JacobiSVD<MatX> svd(d);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return static_cast<int>(d.cols()) - rank;
}

}  // namespace flagdyn
