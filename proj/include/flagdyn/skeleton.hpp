#pragma once

// Zero-dimensional strata (permutations), their linking moves, the leads-to
// orientation, the precedes covering relation and the index H.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flagdyn/tree.hpp"

namespace flagdyn {

class Perm {
 public:
  // Entries are 1-based indices in {1..n}, or {1..2n} when symplectic.
  Perm(int n, std::vector<int> word, bool symplectic = false);

  int n() const noexcept { return n_; }
  int k() const noexcept { return static_cast<int>(word_.size()); }
  bool symplectic() const noexcept { return symplectic_; }
  int universe() const noexcept { return symplectic_ ? 2 * n_ : n_; }
  const std::vector<int>& word() const noexcept { return word_; }
  int operator[](int i) const { return word_[i]; }

  // R(π) as a bitmask, and C(π) (resp. Ĉ(π) = complement of R ∪ conj R).
  Subset range() const;
  Subset available() const;

  std::string to_string() const;  // "(π_1 … π_k)"
  bool operator==(const Perm&) const = default;
  auto operator<=>(const Perm& o) const { return word_ <=> o.word_; }

 private:
  int n_;
  std::vector<int> word_;
  bool symplectic_;
};

int conj_index(int i, int n);
// Position of i in 1 < 2 < … < n, or in 1 ◁ … ◁ n ◁ 2n ◁ … ◁ n+1.
int order_rank(int i, int n, bool symplectic);
bool before(int a, int b, int n, bool symplectic);

enum class MoveKind {
  replace,    // π_i → j, j available
  swap,       // exchange π_i and π_j
  conjugate,  // π_i → conj π_i (symplectic)
  conj_swap,  // π_i → conj π_j, π_j → conj π_i (symplectic)
};

struct Move {
  MoveKind kind;
  int i;      // 0-based position
  int j;      // second position (swap kinds) or replacement value (replace)
  Perm target;
};

// All single moves out of p in a fixed order: conjugations, replacements
// (by position, then value along the order), swaps, conjugate swaps.
std::vector<Move> moves(const Perm& p);
int graph_degree(int n, int k, bool symplectic);

bool linked(const Perm& p, const Perm& q);
bool leads_to(const Perm& p, const Perm& q);
bool precedes(const Perm& p, const Perm& q);
int index_h(const Perm& p);

std::uint64_t vertex_count(int n, int k, bool symplectic);
// All permutations (isotropic when symplectic) in lexicographic order.
std::vector<Perm> all_perms(int n, int k, bool symplectic, std::uint64_t budget = 100'000);

struct SkeletonGraph {
  int n = 0, k = 0;
  bool symplectic = false;
  std::vector<Perm> vertices;
  std::vector<std::pair<int, int>> edges;  // (tail, head), tail leads to head
  std::vector<int> index;
  std::vector<std::vector<int>> out;
  std::vector<std::vector<int>> in;

  int find(const Perm& p) const;  // -1 when absent
  bool acyclic() const;
  std::vector<std::pair<int, int>> precedes_edges() const;
};

SkeletonGraph build_graph(int n, int k, bool symplectic, std::uint64_t max_vertices = 100'000);

// (∧t, ∨t) for a consistent tree.
std::pair<Perm, Perm> tree_bounds(const Tree& t);
// The one-dimensional stratum joining two linked permutations.
Tree one_dim_strata(const Perm& p, const Perm& q);

}  // namespace flagdyn
