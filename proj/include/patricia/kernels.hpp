#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "patricia/errors.hpp"
#include "patricia/labeled_tree.hpp"
#include "patricia/measure.hpp"
#include "patricia/rng.hpp"
#include "patricia/tree.hpp"
#include "patricia/word.hpp"

namespace patricia {

// ---- backward dynamics on radix shapes ----

// One backward step of the radix-sort chain: forget the input that rested at
// leaf v.  If v's sibling is internal, only v disappears; if the sibling is a
// leaf too, the now-redundant chain down to the pair unwinds to the deepest
// remaining branch point.
inline BinaryTree kappa(const BinaryTree& t, const Word& v) {
  require_radix_shaped(t);
  if (t.size() == 1) throw NotALeaf("no backward step from the trivial tree");
  if (!t.is_leaf(v)) throw NotALeaf(v.display() + " is not a leaf");
  const Word sib = v.sibling();
  std::vector<Word> out;
  if (!t.is_leaf(sib)) {
    for (const Word& w : t.vertices())
      if (w != v) out.push_back(w);
  } else {
    const std::size_t m = v.size();
    // deepest l < m at which the path to v still has a branch in t
    std::size_t l = 0;
    for (std::size_t k = m - 1; k >= 1; --k)
      if (t.contains(v.prefix(k).sibling())) {
        l = k;
        break;
      }
    for (const Word& w : t.vertices()) {
      if (w == sib) continue;
      if (w.size() > l && w.size() <= m && is_prefix(w, v)) continue;
      out.push_back(w);
    }
  }
  return BinaryTree(std::move(out));
}

// Backward step after contraction: delete leaf v of a full tree and splice
// its sibling subtree into the parent's place.
inline FullBinaryTree kappa_bar(const FullBinaryTree& t, const Word& v) {
  if (t.size() == 1) throw NotALeaf("no backward step from the trivial tree");
  if (!t.is_leaf(v)) throw NotALeaf(v.display() + " is not a leaf");
  const std::size_t m = v.size();
  const Word par = v.parent();
  const Word sib = v.sibling();
  std::vector<Word> out;
  for (const Word& w : t.vertices()) {
    if (!is_strict_prefix(par, w)) out.push_back(w);
    if (is_prefix(sib, w)) out.push_back(w.splice_out(m - 1));
  }
  return FullBinaryTree(BinaryTree(std::move(out)));
}

// Uniform leaf deletion: one draw of the backward transition kernel.
inline FullBinaryTree backward_sample(const FullBinaryTree& t, Rng& rng) {
  const auto ls = t.leaves();
  return kappa_bar(t, ls[rng.below(ls.size())]);
}

// ---- forward growth on full trees ----

// Deterministic core of the growth step: graft a cherry at vertex v, hanging
// the old subtree of v on side c and a fresh leaf on the other side.
inline FullBinaryTree remy_step_at(const FullBinaryTree& t, const Word& v, int c) {
  assert(t.contains(v));
  assert(c == 0 || c == 1);
  std::vector<Word> out;
  const Word vc = v.child(c);
  for (const Word& w : t.vertices()) {
    if (is_prefix(v, w))
      out.push_back(vc + w.suffix_from(v.size()));
    else
      out.push_back(w);
  }
  out.push_back(v);
  out.push_back(v.child(1 - c));
  return FullBinaryTree(BinaryTree(std::move(out)));
}

// One growth step: uniform vertex, then a fair side.  (Draw order: vertex in
// shortlex rank, then side — pinned for reproducibility.)
inline FullBinaryTree remy_step(const FullBinaryTree& t, Rng& rng) {
  const auto& vs = t.vertices();
  const Word v = vs[rng.below(vs.size())];
  return remy_step_at(t, v, rng.bit());
}

// Growth trajectory started from the trivial tree; steps[k] has k+1 leaves.
inline std::vector<FullBinaryTree> remy_chain(int n_max, std::uint64_t seed) {
  if (n_max < 1) throw EmptyInput("remy_chain needs n_max >= 1");
  std::vector<FullBinaryTree> steps{FullBinaryTree::trivial()};
  Rng rng(seed);
  for (int n = 2; n <= n_max; ++n) steps.push_back(remy_step(steps.back(), rng));
  return steps;
}

// ---- labeled backward step ----

// Deletes the leaf carrying the largest label from a tree labeled 1..n+1,
// relabeling nothing else.
inline LabeledTree labeled_backward_step(const LabeledTree& lt) {
  const auto labels = lt.label_set();
  const int top = static_cast<int>(labels.size());
  if (top < 2) throw WrongLeafCount("need at least two labeled leaves");
  for (int i = 0; i < top; ++i)
    if (labels[static_cast<std::size_t>(i)] != i + 1)
      throw BadLabelSet("labels must be exactly 1..n");
  const Word v = lt.leaf_with(top);
  const std::size_t m = v.size();
  const Word sib = v.sibling();
  FullBinaryTree shape = kappa_bar(lt.shape(), v);
  std::map<Word, int> relabeled;
  for (const auto& [y, l] : lt.labels()) {
    if (l == top) continue;
    if (is_prefix(sib, y))
      relabeled[y.splice_out(m - 1)] = l;
    else
      relabeled[y] = l;
  }
  return LabeledTree(std::move(shape), std::move(relabeled));
}

// ---- incremental radix chain state ----

// The running state of the radix-sort chain: the word streams seen so far,
// held in an arena trie keyed by their distinguishing prefixes.  Supports
// O(new bits) insertion and cheap height queries, and can materialize the
// radix tree / its contraction at any step.
class RadixChain {
 public:
  explicit RadixChain(SourceMeasure nu, std::uint64_t seed,
                      std::size_t depth_cap = kDefaultDepthCap)
      : nu_(std::move(nu)), cap_(depth_cap) {
    reset(seed);
  }

  // Restart at step 0 with a new base seed, keeping the allocated arena.
  void reset(std::uint64_t seed) {
    seed_ = seed;
    nodes_.clear();
    nodes_.push_back(Node{});
    streams_.clear();
    rest_node_.clear();
  }

  int n() const { return static_cast<int>(streams_.size()); }
  std::uint64_t base_seed() const { return seed_; }
  const SourceMeasure& measure() const { return nu_; }

  // Next input drawn from the source measure (stream seed mixes the base
  // seed with the input index).
  void grow() { insert(nu_.stream(mix_seed(seed_, streams_.size()))); }

  // Explicitly supplied input (conditional resampling etc.).
  void grow_with(WordStream z) { insert(std::move(z)); }

  const WordStream& stream(int i) const { return streams_[static_cast<std::size_t>(i)]; }

  // Leaf of input i in the current radix tree.
  Word leaf_word(int i) const {
    return path_word(rest_node_[static_cast<std::size_t>(i)], [](const Node&) { return true; });
  }

  // Leaf of input i after contraction: only the letters chosen at branch
  // points survive.
  Word patricia_leaf_word(int i) const {
    return path_word(rest_node_[static_cast<std::size_t>(i)], [this](const Node& nd) {
      const Node& p = nodes_[static_cast<std::size_t>(nd.parent)];
      return p.child[0] >= 0 && p.child[1] >= 0;
    });
  }

  std::vector<Word> radix_leaves() const {
    std::vector<Word> out;
    for (int i = 0; i < n(); ++i) out.push_back(leaf_word(i));
    return out;
  }

  BinaryTree radix_tree() const {
    if (streams_.empty()) throw EmptyInput("no inputs inserted yet");
    return span_tree(radix_leaves());
  }

  FullBinaryTree patricia_tree() const {
    std::vector<Word> out;
    for (int i = 0; i < n(); ++i) {
      Word y = patricia_leaf_word(i);
      for (std::size_t l = 0; l <= y.size(); ++l) out.push_back(y.prefix(l));
    }
    if (out.empty()) throw EmptyInput("no inputs inserted yet");
    return FullBinaryTree(BinaryTree(std::move(out)));
  }

  std::size_t radix_height() const {
    std::size_t h = 0;
    for (int rn : rest_node_)
      h = std::max(h, static_cast<std::size_t>(nodes_[static_cast<std::size_t>(rn)].depth));
    return h;
  }

  std::size_t patricia_height() const {
    std::size_t h = 0;
    for (int i = 0; i < n(); ++i) {
      std::size_t d = 0;
      for (int cur = rest_node_[static_cast<std::size_t>(i)]; cur != 0;) {
        const Node& nd = nodes_[static_cast<std::size_t>(cur)];
        const Node& p = nodes_[static_cast<std::size_t>(nd.parent)];
        if (p.child[0] >= 0 && p.child[1] >= 0) ++d;
        cur = nd.parent;
      }
      h = std::max(h, d);
    }
    return h;
  }

 private:
  struct Node {
    int child[2] = {-1, -1};
    int parent = -1;
    int rest = -1;       // index of the stream resting here, if this is a leaf
    std::uint32_t depth = 0;
    std::int8_t pbit = 0;  // letter on the edge from the parent
  };

  int new_node(int parent, int b) {
    Node nd;
    nd.parent = parent;
    nd.pbit = static_cast<std::int8_t>(b);
    nd.depth = nodes_[static_cast<std::size_t>(parent)].depth + 1;
    nodes_.push_back(nd);
    return static_cast<int>(nodes_.size() - 1);
  }

  void insert(WordStream z) {
    const int zi = static_cast<int>(streams_.size());
    streams_.push_back(std::move(z));
    rest_node_.push_back(0);
    const WordStream& zs = streams_.back();
    if (zi == 0) {
      nodes_[0].rest = 0;
      rest_node_[0] = 0;
      return;
    }
    int cur = 0;
    std::size_t d = 0;
    for (;;) {
      if (d >= cap_)
        throw DepthCapExceeded("radix insertion descended past depth " + std::to_string(cap_));
      const int resting = nodes_[static_cast<std::size_t>(cur)].rest;
      if (resting >= 0) {
        // cur holds an older stream; push both down until they separate
        nodes_[static_cast<std::size_t>(cur)].rest = -1;
        for (;;) {
          if (d >= cap_)
            throw DepthCapExceeded("radix insertion descended past depth " + std::to_string(cap_));
          const int bs = streams_[static_cast<std::size_t>(resting)].bit(d);
          const int bz = zs.bit(d);
          if (bs != bz) {
            const int ns = new_node(cur, bs);
            nodes_[static_cast<std::size_t>(cur)].child[bs] = ns;
            nodes_[static_cast<std::size_t>(ns)].rest = resting;
            rest_node_[static_cast<std::size_t>(resting)] = ns;
            const int nz = new_node(cur, bz);
            nodes_[static_cast<std::size_t>(cur)].child[bz] = nz;
            nodes_[static_cast<std::size_t>(nz)].rest = zi;
            rest_node_[static_cast<std::size_t>(zi)] = nz;
            return;
          }
          const int nn = new_node(cur, bs);
          nodes_[static_cast<std::size_t>(cur)].child[bs] = nn;
          cur = nn;
          ++d;
        }
      }
      const int b = zs.bit(d);
      const int nxt = nodes_[static_cast<std::size_t>(cur)].child[b];
      if (nxt >= 0) {
        cur = nxt;
        ++d;
        continue;
      }
      const int nl = new_node(cur, b);
      nodes_[static_cast<std::size_t>(cur)].child[b] = nl;
      nodes_[static_cast<std::size_t>(nl)].rest = zi;
      rest_node_[static_cast<std::size_t>(zi)] = nl;
      return;
    }
  }

  // Letters along the root path of a node, keeping those edges accepted by
  // the filter.
  template <class Keep>
  Word path_word(int node, Keep&& keep) const {
    std::string bits;
    for (int cur = node; cur != 0;) {
      const Node& nd = nodes_[static_cast<std::size_t>(cur)];
      if (keep(nd)) bits.push_back(static_cast<char>('0' + nd.pbit));
      cur = nd.parent;
    }
    std::reverse(bits.begin(), bits.end());
    return Word(bits);
  }

  SourceMeasure nu_;
  std::size_t cap_;
  std::uint64_t seed_ = 0;
  std::vector<Node> nodes_;
  std::vector<WordStream> streams_;
  std::vector<int> rest_node_;
};

// ---- chain trajectories ----

struct PatriciaTrajectory {
  std::vector<BinaryTree> radix;         // radix[k] is the step-(k+1) radix tree
  std::vector<FullBinaryTree> patricia;  // its contraction
};

// Runs the radix-sort chain to n_max inputs, recording both trees at every
// step.
inline PatriciaTrajectory patricia_chain(const SourceMeasure& nu, int n_max,
                                         std::uint64_t seed,
                                         std::size_t depth_cap = kDefaultDepthCap) {
  if (n_max < 1) throw EmptyInput("patricia_chain needs n_max >= 1");
  RadixChain chain(nu, seed, depth_cap);
  PatriciaTrajectory out;
  for (int n = 1; n <= n_max; ++n) {
    chain.grow();
    out.radix.push_back(chain.radix_tree());
    out.patricia.push_back(chain.patricia_tree());
  }
  return out;
}

}  // namespace patricia
