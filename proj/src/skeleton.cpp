#include "flagdyn/skeleton.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace flagdyn {

Perm::Perm(int n, std::vector<int> word, bool symplectic) : n_(n), word_(std::move(word)), symplectic_(symplectic) {
  if (n_ < 1 || universe() > 64) fail(ErrorCode::BadSizes, "perm ambient size out of range");
  if (word_.empty() || k() > n_) fail(ErrorCode::BadSizes, "perm length must be in 1..n");
  Subset seen = 0, residues = 0;
  for (int w : word_) {
    if (w < 1 || w > universe()) fail(ErrorCode::BadIndex, "perm entry out of range");
    const Subset bit = Subset{1} << (w - 1);
    if (seen & bit) fail(ErrorCode::InvalidArgument, "perm entries must be distinct");
    seen |= bit;
    if (symplectic_) {
      const Subset r = Subset{1} << ((w - 1) % n_);
      if (residues & r) fail(ErrorCode::InvalidArgument, "perm is not isotropic");
      residues |= r;
    }
  }
}

Subset Perm::range() const {
  Subset s = 0;
  for (int w : word_) s |= Subset{1} << (w - 1);
  return s;
}

Subset Perm::available() const {
  const int m = universe();
  const Subset all = (Subset{1} << m) - 1;
  Subset used = range();
  if (symplectic_)
    for (int w : word_) used |= Subset{1} << (conj_index(w, n_) - 1);
  return all & ~used;
}

std::string Perm::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < k(); ++i) os << (i ? " " : "") << word_[i];
  os << ')';
  return os.str();
}

int conj_index(int i, int n) { return i <= n ? i + n : i - n; }

int order_rank(int i, int n, bool symplectic) {
  if (!symplectic || i <= n) return i - 1;
  return n + (2 * n - i);
}

bool before(int a, int b, int n, bool symplectic) { return order_rank(a, n, symplectic) < order_rank(b, n, symplectic); }

namespace {

void require_same_shape(const Perm& p, const Perm& q) {
  if (p.n() != q.n() || p.k() != q.k() || p.symplectic() != q.symplectic())
    fail(ErrorCode::ShapeMismatch, "permutations of different shape");
}

// Elements of a subset sorted along the (circular) order.
std::vector<int> ordered_elements(Subset s, int n, bool symplectic) {
  std::vector<int> e = elements(s);
  std::sort(e.begin(), e.end(), [&](int a, int b) { return before(a, b, n, symplectic); });
  return e;
}

Perm with(const Perm& p, int i, int v) {
  std::vector<int> w = p.word();
  w[i] = v;
  return Perm(p.n(), std::move(w), p.symplectic());
}

Perm with(const Perm& p, int i, int vi, int j, int vj) {
  std::vector<int> w = p.word();
  w[i] = vi;
  w[j] = vj;
  return Perm(p.n(), std::move(w), p.symplectic());
}

const Move* find_move(const std::vector<Move>& ms, const Perm& q) {
  for (const Move& m : ms)
    if (m.target == q) return &m;
  return nullptr;
}

}  // namespace

std::vector<Move> moves(const Perm& p) {
  const int n = p.n(), k = p.k();
  const bool sp = p.symplectic();
  std::vector<Move> out;
  if (sp)
    for (int i = 0; i < k; ++i) out.push_back({MoveKind::conjugate, i, i, with(p, i, conj_index(p[i], n))});
  const std::vector<int> avail = ordered_elements(p.available(), n, sp);
  for (int i = 0; i < k; ++i)
    for (int j : avail) out.push_back({MoveKind::replace, i, j, with(p, i, j)});
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) out.push_back({MoveKind::swap, i, j, with(p, i, p[j], j, p[i])});
  if (sp)
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        out.push_back({MoveKind::conj_swap, i, j, with(p, i, conj_index(p[j], n), j, conj_index(p[i], n))});
  return out;
}

int graph_degree(int n, int k, bool symplectic) { return symplectic ? k * (2 * n - k) : k * (2 * n - k - 1) / 2; }

bool linked(const Perm& p, const Perm& q) {
  require_same_shape(p, q);
  return find_move(moves(p), q) != nullptr;
}

// Every move changes position i first; p leads to q iff the new entry there
// comes later in the order.
bool leads_to(const Perm& p, const Perm& q) {
  require_same_shape(p, q);
  const auto ms = moves(p);
  const Move* m = find_move(ms, q);
  if (!m) fail(ErrorCode::NotLinked, "leads_to: permutations are not linked");
  return before(p[m->i], q[m->i], p.n(), p.symplectic());
}

// Covering edges of the oriented graph. For a replacement π_i → j this means no
// available element and no later entry π_s lies strictly between π_i and j; for
// a swap of positions i < j, no entry between them in position has a value
// between π_i and π_j. Both reduce to H rising by exactly one.
bool precedes(const Perm& p, const Perm& q) {
  require_same_shape(p, q);
  const auto ms = moves(p);
  const Move* m = find_move(ms, q);
  if (!m || !before(p[m->i], q[m->i], p.n(), p.symplectic())) return false;
  return index_h(q) == index_h(p) + 1;
}

// Number of inversions: available j below π_i, pairs i<j with π_i above π_j,
// and in the symplectic case conj π_i below π_i and conj π_j below π_i.
int index_h(const Perm& p) {
  const int n = p.n(), k = p.k();
  const bool sp = p.symplectic();
  int h = 0;
  for (int i = 0; i < k; ++i) {
    for (int j : elements(p.available()))
      if (before(j, p[i], n, sp)) ++h;
    if (sp && before(conj_index(p[i], n), p[i], n, sp)) ++h;
    for (int j = i + 1; j < k; ++j) {
      if (before(p[j], p[i], n, sp)) ++h;
      if (sp && before(conj_index(p[j], n), p[i], n, sp)) ++h;
    }
  }
  return h;
}

std::uint64_t vertex_count(int n, int k, bool symplectic) {
  if (n < 1 || k < 1 || k > n) fail(ErrorCode::BadSizes, "need 1 <= k <= n");
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t f = symplectic ? static_cast<std::uint64_t>(2 * n - 2 * i) : static_cast<std::uint64_t>(n - i);
    if (c > UINT64_MAX / f) return UINT64_MAX;
    c *= f;
  }
  return c;
}

std::vector<Perm> all_perms(int n, int k, bool symplectic, std::uint64_t budget) {
  if (vertex_count(n, k, symplectic) > budget) fail(ErrorCode::SizeLimit, "permutation count exceeds the budget");
  const int m = symplectic ? 2 * n : n;
  std::vector<Perm> out;
  std::vector<int> word;
  std::vector<char> used(m + 1, 0);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(word.size()) == k) {
      out.emplace_back(n, word, symplectic);
      return;
    }
    for (int v = 1; v <= m; ++v) {
      if (used[v] || (symplectic && used[conj_index(v, n)])) continue;
      used[v] = 1;
      word.push_back(v);
      self(self);
      word.pop_back();
      used[v] = 0;
    }
  };
  rec(rec);
  return out;
}

int SkeletonGraph::find(const Perm& p) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), p);
  if (it == vertices.end() || !(*it == p)) return -1;
  return static_cast<int>(it - vertices.begin());
}

bool SkeletonGraph::acyclic() const {
  std::vector<int> indeg(vertices.size());
  for (auto [t, h] : edges) ++indeg[h];
  std::deque<int> ready;
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
  std::size_t seen = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop_front();
    ++seen;
    for (int w : out[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return seen == vertices.size();
}

std::vector<std::pair<int, int>> SkeletonGraph::precedes_edges() const {
  std::vector<std::pair<int, int>> out_edges;
  for (auto [t, h] : edges)
    if (precedes(vertices[t], vertices[h])) out_edges.emplace_back(t, h);
  return out_edges;
}

SkeletonGraph build_graph(int n, int k, bool symplectic, std::uint64_t max_vertices) {
  SkeletonGraph g;
  g.n = n;
  g.k = k;
  g.symplectic = symplectic;
  g.vertices = all_perms(n, k, symplectic, max_vertices);
  const std::size_t nv = g.vertices.size();
  g.out.resize(nv);
  g.in.resize(nv);
  g.index.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const Perm& p = g.vertices[v];
    g.index[v] = index_h(p);
    for (const Move& m : moves(p)) {
      if (!before(p[m.i], m.target[m.i], n, symplectic)) continue;
      const int w = g.find(m.target);
      g.edges.emplace_back(static_cast<int>(v), w);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  for (auto [t, h] : g.edges) {
    g.out[t].push_back(h);
    g.in[h].push_back(t);
  }
  return g;
}

std::pair<Perm, Perm> tree_bounds(const Tree& t) {
  if (!is_consistent(t)) fail(ErrorCode::Inconsistent, "tree_bounds: tree is inconsistent");
  const int n = t.n();
  const bool sp = t.symplectic();
  std::vector<int> lo, hi;
  auto taken = [&](const std::vector<int>& w) {
    Subset s = 0;
    for (int v : w) {
      s |= Subset{1} << (v - 1);
      if (sp) s |= Subset{1} << (conj_index(v, n) - 1);
    }
    return s;
  };
  for (int i = 0; i < t.k(); ++i) {
    const auto lo_choices = ordered_elements(t.nodes()[i] & ~taken(lo), n, sp);
    const auto hi_choices = ordered_elements(t.nodes()[i] & ~taken(hi), n, sp);
    if (lo_choices.empty() || hi_choices.empty()) fail(ErrorCode::Inconsistent, "tree_bounds: node exhausted");
    lo.push_back(lo_choices.front());
    hi.push_back(hi_choices.back());
  }
  return {Perm(n, lo, sp), Perm(n, hi, sp)};
}

Tree one_dim_strata(const Perm& p, const Perm& q) {
  require_same_shape(p, q);
  const auto ms = moves(p);
  const Move* m = find_move(ms, q);
  if (!m) fail(ErrorCode::NotLinked, "one_dim_strata: permutations are not linked");
  std::vector<Subset> nodes;
  for (int v : p.word()) nodes.push_back(Subset{1} << (v - 1));
  const Subset pi = nodes[m->i];
  const Subset qi = Subset{1} << (q[m->i] - 1);
  nodes[m->i] = pi | qi;
  if (m->kind == MoveKind::swap || m->kind == MoveKind::conj_swap) {
    const int j = m->j;
    nodes[j] = (Subset{1} << (p[j] - 1)) | (Subset{1} << (q[j] - 1));
  }
  return Tree(p.n(), std::move(nodes), p.symplectic());
}

}  // namespace flagdyn
