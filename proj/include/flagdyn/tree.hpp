#pragma once

// (n,k)-trees and symplectic (n,k)-trees labelling the strata of F_{n,k} and
// F^sp_{n,k}. Node subsets are bitmasks over {1..n} (or {1..2n}); bit i-1 is
// index i.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flagdyn/flow.hpp"
#include "flagdyn/frame.hpp"

namespace flagdyn {

using Subset = std::uint64_t;

Subset subset_of(const std::vector<int>& indices);
std::vector<int> elements(Subset s);
int card(Subset s);

class Tree {
 public:
  // n is the half dimension when symplectic, so indices range over {1..2n}.
  Tree(int n, std::vector<Subset> nodes, bool symplectic = false);
  static Tree from_lists(int n, const std::vector<std::vector<int>>& nodes, bool symplectic = false);

  // ({π_1}, …, {π_k})
  static Tree singletons(int n, const std::vector<int>& word, bool symplectic = false);
  // Every node equal to the whole index set.
  static Tree maximal(int n, int k, bool symplectic = false);

  int n() const noexcept { return n_; }
  int k() const noexcept { return static_cast<int>(nodes_.size()); }
  bool symplectic() const noexcept { return symplectic_; }
  int universe() const noexcept { return symplectic_ ? 2 * n_ : n_; }
  Subset universe_mask() const noexcept;
  const std::vector<Subset>& nodes() const noexcept { return nodes_; }
  Subset node(int i) const;  // 0-based
  Subset conj(Subset s) const;

  std::vector<std::vector<int>> lists() const;
  std::string to_string() const;

  bool operator==(const Tree& o) const = default;

 private:
  int n_;
  std::vector<Subset> nodes_;
  bool symplectic_;
};

struct TreeStats {
  std::vector<int> card;
  std::vector<int> depth;
  std::vector<int> codepth;  // all zero for general trees
  int kappa = 0;
  int mu = 0;
};

TreeStats stats(const Tree& t);
bool is_consistent(const Tree& t);
bool is_full(const Tree& t, int i);  // 0-based node index
bool is_root(const Tree& t, int i);
bool is_irreducible(const Tree& t);
Tree reduce(const Tree& t);
int dimension(const Tree& t);
int max_dimension(int n, int k, bool symplectic);
bool contains(const Tree& t, const Tree& s);  // s ≤ t componentwise
std::optional<Tree> meet(const Tree& t, const Tree& s);
// t ⋄ s: nodes of t followed by nodes of s (same ambient set)
Tree concatenate(const Tree& t, const Tree& s);

// Column i of x lies in span{E_j : j ∈ P_i} up to a residual of tol.
bool member(const Tree& t, const Frame& x, const SpectralData& eigbasis, double tol = 1e-8);
double membership_residual(const Tree& t, const Frame& x, const SpectralData& eigbasis);

struct EnumerationLimits {
  int max_n_general = 6;
  int max_n_symplectic = 4;
  std::size_t max_trees = 5'000'000;
};

std::vector<Tree> enumerate_irreducible(int n, int k, bool symplectic, const EnumerationLimits& lim = {});

// Random point of the stratum in the standard eigenbasis (orthogonal or
// unitary frame). Requires a consistent tree.
Frame sample_point(const Tree& t, std::mt19937_64& rng);

// Jacobian of Φ = (‖X_i‖² − 1, X_i·X_j for P_i ⊆ P_j, JX_i·X_j for conj P_i ⊆ P_j)
// on the coordinates allowed by the tree, and its rank deficiency at x.
MatX constraint_jacobian(const Tree& t, const MatX& x);
int numerical_dimension(const Tree& t, const MatX& x);

}  // namespace flagdyn
