#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "patricia/errors.hpp"
#include "patricia/measure.hpp"
#include "patricia/rational.hpp"
#include "patricia/word.hpp"

namespace patricia {

// A finite rooted binary tree, stored as its prefix-closed set of vertex
// words in shortlex order.  Always contains at least the root (empty word).
class BinaryTree {
 public:
  explicit BinaryTree(std::vector<Word> vertices) : v_(std::move(vertices)) {
    if (v_.empty()) throw EmptyInput("a tree needs at least its root");
    std::sort(v_.begin(), v_.end());
    v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
    if (!v_.front().empty())
      throw NotPrefixClosed("root (empty word) missing");
    for (const Word& w : v_)
      if (!w.empty() && !contains(w.parent()))
        throw NotPrefixClosed("vertex " + w.display() + " present without its parent");
  }

  static BinaryTree trivial() { return BinaryTree({Word()}); }

  const std::vector<Word>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }

  bool contains(const Word& w) const {
    return std::binary_search(v_.begin(), v_.end(), w);
  }

  bool is_leaf(const Word& w) const {
    return contains(w) && !contains(w.child(0)) && !contains(w.child(1));
  }

  std::vector<Word> leaves() const {
    std::vector<Word> out;
    for (const Word& w : v_)
      if (!contains(w.child(0)) && !contains(w.child(1))) out.push_back(w);
    return out;
  }

  std::size_t leaf_count() const { return leaves().size(); }

  // Depth of the deepest vertex; the deepest vertices are leaves.  Shortlex
  // order puts the longest word last.
  std::size_t height() const { return v_.back().size(); }

  bool operator==(const BinaryTree& rhs) const { return v_ == rhs.v_; }
  bool operator!=(const BinaryTree& rhs) const { return v_ != rhs.v_; }
  // Arbitrary-but-stable total order so trees can key maps.
  bool operator<(const BinaryTree& rhs) const {
    return std::lexicographical_compare(v_.begin(), v_.end(), rhs.v_.begin(), rhs.v_.end());
  }

 protected:
  struct unchecked_tag {};
  BinaryTree(std::vector<Word> vertices, unchecked_tag) : v_(std::move(vertices)) {}

  std::vector<Word> v_;
};

// The vertices strictly and weakly below v, re-rooted at v (prefix stripped).
inline BinaryTree subtree_at(const BinaryTree& t, const Word& v) {
  if (!t.contains(v)) throw EmptyInput("subtree_at: " + v.display() + " is not a vertex");
  std::vector<Word> out;
  for (const Word& w : t.vertices())
    if (is_prefix(v, w)) out.push_back(w.suffix_from(v.size()));
  return BinaryTree(std::move(out));
}

// A binary tree in which every vertex has zero or two children.
class FullBinaryTree : public BinaryTree {
 public:
  explicit FullBinaryTree(BinaryTree t) : BinaryTree(std::move(t)) {
    for (const Word& w : v_)
      if (contains(w.child(0)) != contains(w.child(1)))
        throw NotFull("vertex " + w.display() + " has exactly one child");
  }
  explicit FullBinaryTree(std::vector<Word> vertices)
      : FullBinaryTree(BinaryTree(std::move(vertices))) {}

  static FullBinaryTree trivial() { return FullBinaryTree(BinaryTree::trivial()); }

  // The unique full tree with two leaves: {e, 0, 1}.
  static FullBinaryTree cherry() {
    return FullBinaryTree({Word(), Word("0"), Word("1")});
  }
};

// {e} u 0L u 1R.
inline FullBinaryTree join_trees(const BinaryTree& left, const BinaryTree& right) {
  std::vector<Word> out{Word()};
  for (const Word& w : left.vertices()) out.push_back(Word("0") + w);
  for (const Word& w : right.vertices()) out.push_back(Word("1") + w);
  return FullBinaryTree(std::move(out));
}

// Smallest tree containing the given words: the union of all their prefixes.
inline BinaryTree span_tree(const std::vector<Word>& ys) {
  if (ys.empty()) throw EmptyInput("span_tree of no words");
  std::vector<Word> verts;
  for (const Word& y : ys)
    for (std::size_t l = 0; l <= y.size(); ++l) verts.push_back(y.prefix(l));
  return BinaryTree(std::move(verts));
}

// Shapes reachable by radix sort: the trivial tree, or a tree with at least
// two leaves in which every leaf's sibling is also a vertex.
inline bool is_radix_shaped(const BinaryTree& t) {
  if (t.size() == 1) return true;
  const auto ls = t.leaves();
  if (ls.size() < 2) return false;
  for (const Word& y : ls)
    if (!t.contains(y.sibling())) return false;
  return true;
}

inline void require_radix_shaped(const BinaryTree& t) {
  if (!is_radix_shaped(t))
    throw NotRadixShaped("tree with " + std::to_string(t.size()) +
                         " vertices is not a radix-sort shape");
}

// ---- radix sort tree ----

struct RadixResult {
  BinaryTree tree;
  std::vector<Word> leaf_of_input;  // leaf_of_input[i] is where input i landed
};

namespace detail {

// Shared recursion: bucket the inputs by their next letter until each is
// alone; an input alone in its bucket rests at the current prefix.
// bit_at(i, d) returns letter d of input i or throws (cap, exhaustion).
template <class BitAt>
void radix_rec(const std::vector<int>& idx, std::string& prefix, BitAt&& bit_at,
               std::vector<Word>& leaf_out) {
  if (idx.size() == 1) {
    leaf_out[idx[0]] = Word(prefix);
    return;
  }
  std::vector<int> bucket[2];
  for (int i : idx) bucket[bit_at(i, prefix.size())].push_back(i);
  for (int b : {0, 1}) {
    if (bucket[b].empty()) continue;
    prefix.push_back(static_cast<char>('0' + b));
    radix_rec(bucket[b], prefix, bit_at, leaf_out);
    prefix.pop_back();
  }
}

}  // namespace detail

// Radix sort tree of n infinite words: input i receives the shortest prefix
// of z_i that is a prefix of no z_j, j != i; the tree spans those leaves.
// For n = 1 the tree is trivial.  Invariant under input permutation.
inline RadixResult radix_sort_tree(const std::vector<WordStream>& zs,
                                   std::size_t depth_cap = kDefaultDepthCap) {
  if (zs.empty()) throw EmptyInput("radix_sort_tree of no streams");
  std::vector<int> idx(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<Word> leaves(zs.size());
  std::string prefix;
  detail::radix_rec(idx, prefix,
                    [&](int i, std::size_t d) {
                      if (d >= depth_cap)
                        throw DepthCapExceeded("radix sort descended past depth " +
                                               std::to_string(depth_cap));
                      return zs[static_cast<std::size_t>(i)].bit(d);
                    },
                    leaves);
  return RadixResult{span_tree(leaves), std::move(leaves)};
}

// Same, with finite words standing for the cylinders they begin.  The inputs
// must be pairwise incomparable in the prefix order (in particular distinct).
inline RadixResult radix_sort_tree(const std::vector<Word>& zs) {
  if (zs.empty()) throw EmptyInput("radix_sort_tree of no words");
  std::vector<int> idx(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<Word> leaves(zs.size());
  std::string prefix;
  detail::radix_rec(idx, prefix,
                    [&](int i, std::size_t d) {
                      const Word& w = zs[static_cast<std::size_t>(i)];
                      if (d >= w.size())
                        throw IncomparabilityViolated(
                            "input " + w.display() +
                            " is a prefix of another input (inputs must be pairwise incomparable)");
                      return w.bit(d);
                    },
                    leaves);
  return RadixResult{span_tree(leaves), std::move(leaves)};
}

// ---- contraction ----

struct ContractResult {
  FullBinaryTree tree;
  std::map<Word, Word> leaf_map;  // leaf of the input -> leaf of the contraction
};

namespace detail {

// Recursion on the sorted leaf lists: strip the longest common prefix, split
// on the next letter (both sides nonempty by maximality), recurse.
inline void contract_rec(const std::vector<std::pair<Word, Word>>& items,
                         const std::string& image, std::vector<Word>& verts,
                         std::map<Word, Word>& leaf_map) {
  verts.push_back(Word(image));
  if (items.size() == 1) {
    leaf_map[items[0].first] = Word(image);
    return;
  }
  std::size_t lcp = items[0].second.size();
  for (const auto& it : items)
    lcp = std::min(lcp, meet(items[0].second, it.second).size());
  std::vector<std::pair<Word, Word>> side[2];
  for (const auto& it : items)
    side[it.second.bit(lcp)].push_back({it.first, it.second.suffix_from(lcp + 1)});
  for (int b : {0, 1})
    contract_rec(side[b], image + static_cast<char>('0' + b), verts, leaf_map);
}

}  // namespace detail

// Collapses every chain of single-child vertices to an edge, producing a full
// tree with the same number of leaves and the same branching pattern.
inline ContractResult patricia_contract_map(const BinaryTree& s) {
  require_radix_shaped(s);
  std::vector<std::pair<Word, Word>> items;  // (original leaf, remaining suffix)
  for (const Word& y : s.leaves()) items.push_back({y, y});
  std::vector<Word> verts;
  std::map<Word, Word> leaf_map;
  detail::contract_rec(items, "", verts, leaf_map);
  return ContractResult{FullBinaryTree(BinaryTree(std::move(verts))), std::move(leaf_map)};
}

inline FullBinaryTree patricia_contract(const BinaryTree& s) {
  return patricia_contract_map(s).tree;
}

// ---- enumeration ----

inline BigInt catalan(int m) {
  // C_m = binom(2m, m) / (m+1)
  BigInt c = 1;
  for (int i = 0; i < m; ++i) {
    c *= 2 * m - i;
    c /= i + 1;
  }
  return c / (m + 1);
}

// All full binary trees with exactly n leaves, in a deterministic order:
// by left-subtree leaf count ascending, then recursively.  There are
// catalan(n-1) of them; n is capped at 12 to keep sizes sane.
inline std::vector<FullBinaryTree> enumerate_full_trees(int n) {
  if (n < 1) throw EmptyInput("enumerate_full_trees needs n >= 1");
  if (n > 12) throw TooLarge("enumerate_full_trees capped at n = 12, got " + std::to_string(n));
  static std::map<int, std::vector<FullBinaryTree>> memo;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::vector<FullBinaryTree> out;
  if (n == 1) {
    out.push_back(FullBinaryTree::trivial());
  } else {
    for (int k = 1; k < n; ++k)
      for (const auto& left : enumerate_full_trees(k))
        for (const auto& right : enumerate_full_trees(n - k))
          out.push_back(join_trees(left, right));
  }
  memo[n] = out;
  return out;
}

}  // namespace patricia
