#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "patricia/dds.hpp"
#include "patricia/errors.hpp"
#include "patricia/kernels.hpp"
#include "patricia/labeled_tree.hpp"
#include "patricia/measure.hpp"
#include "patricia/rng.hpp"
#include "patricia/tree.hpp"

namespace patricia {

// Runs the backward kernel from an endpoint down to the trivial tree.
// Returned in forward order: out[k] has k+1 leaves, out.back() == endpoint.
inline std::vector<FullBinaryTree> finite_bridge(const FullBinaryTree& endpoint,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FullBinaryTree> out{endpoint};
  while (out.back().size() > 1) out.push_back(backward_sample(out.back(), rng));
  std::reverse(out.begin(), out.end());
  return out;
}

// Caterpillar with the given spine letters: {e} plus, for each letter b of
// the spine, both children of the spine vertex reached so far.  bits.size()
// spine letters give a tree of height bits.size() with bits.size()+1 leaves.
inline FullBinaryTree caterpillar_tree(const std::vector<int>& bits) {
  std::vector<Word> verts{Word()};
  std::string spine;
  for (int b : bits) {
    verts.push_back(Word(spine + static_cast<char>('0' + b)));
    verts.push_back(Word(spine + static_cast<char>('0' + (1 - b))));
    spine.push_back(static_cast<char>('0' + b));
  }
  return FullBinaryTree(BinaryTree(std::move(verts)));
}

// The pathwise zig-zag bridge: every input k >= 2 carries a level Y_k and a
// fair letter eta_k, drawn once and shared by all n.  The step-n tree is the
// caterpillar whose spine letters are the eta's in increasing order of level
// among inputs 2..n, so consecutive steps are consistent and ht = n-1.
class ZigzagBridge {
 public:
  ZigzagBridge(int n_max, std::uint64_t seed) : n_max_(n_max) {
    if (n_max < 1) throw EmptyInput("zigzag bridge needs n_max >= 1");
    Rng rng(seed);
    y_.resize(static_cast<std::size_t>(n_max) + 1);
    eta_.resize(static_cast<std::size_t>(n_max) + 1);
    for (int k = 2; k <= n_max; ++k) {
      y_[static_cast<std::size_t>(k)] = rng.unit();
      eta_[static_cast<std::size_t>(k)] = rng.bit();
    }
    for (int a = 2; a <= n_max; ++a)
      for (int b = a + 1; b <= n_max; ++b)
        if (y_[static_cast<std::size_t>(a)] == y_[static_cast<std::size_t>(b)])
          throw DegenerateSample("level tie between inputs " + std::to_string(a) + " and " +
                                 std::to_string(b));
  }

  int n_max() const { return n_max_; }

  // Spine letters of the step-n tree (levels sorted ascending).
  std::vector<int> spine(int n) const {
    if (n < 1 || n > n_max_) throw EmptyInput("step out of range");
    std::vector<int> ks;
    for (int k = 2; k <= n; ++k) ks.push_back(k);
    std::sort(ks.begin(), ks.end(), [&](int a, int b) {
      return y_[static_cast<std::size_t>(a)] < y_[static_cast<std::size_t>(b)];
    });
    std::vector<int> bits;
    for (int k : ks) bits.push_back(eta_[static_cast<std::size_t>(k)]);
    return bits;
  }

  FullBinaryTree tree(int n) const { return caterpillar_tree(spine(n)); }

  std::vector<FullBinaryTree> trajectory() const {
    std::vector<FullBinaryTree> out;
    for (int n = 1; n <= n_max_; ++n) out.push_back(tree(n));
    return out;
  }

 private:
  int n_max_;
  std::vector<double> y_;
  std::vector<int> eta_;
};

// Exact step-n law of the zig-zag bridge: the spine letters are fair and
// independent, and the last letter does not affect the vertex set, so the
// tree is uniform over the 2^(n-2) caterpillars (n >= 2).
inline std::map<FullBinaryTree, Rational> zigzag_exact_marginal(int n) {
  std::map<FullBinaryTree, Rational> out;
  if (n < 1) throw EmptyInput("zigzag_exact_marginal needs n >= 1");
  if (n == 1) {
    out[FullBinaryTree::trivial()] = 1;
    return out;
  }
  const int free_bits = n - 2;
  if (free_bits > 20) throw TooLarge("marginal table too large past n = 22");
  const Rational p(1, BigInt(1) << free_bits);
  for (long mask = 0; mask < (1L << free_bits); ++mask) {
    std::vector<int> bits;
    for (int i = 0; i < free_bits; ++i) bits.push_back((mask >> i) & 1);
    bits.push_back(0);  // last letter is immaterial
    out[caterpillar_tree(bits)] += p;
  }
  return out;
}

// ---- continuum models ----

// A rooted continuum tree with a sampling measure and a left/right rule:
// draw() samples points with their marks; the meet queries compare branch
// points of sampled pairs, and w gives the winding of an ordered pair.
// Indices are 1-based into the drawn sample.
class RTreeModel {
 public:
  virtual ~RTreeModel() = default;
  virtual std::string name() const = 0;
  virtual void draw(int n, std::uint64_t seed) = 0;
  virtual int sample_size() const = 0;
  virtual bool meet_equal(int i, int j, int k, int l) const = 0;
  virtual bool meet_strictly_below(int i, int j, int k, int l) const = 0;
  // Meet of (i,j) weakly below the point of k (they may touch).
  virtual bool meet_below_point(int i, int j, int k) const = 0;
  virtual Wind w(int i, int j) const = 0;
};

// Deterministic check of the triplet property (T) and the winding rules (LR)
// on the drawn sample.  Empty result means all hold.
inline std::vector<std::string> check_model_properties(const RTreeModel& m) {
  std::vector<std::string> bad;
  const int n = m.sample_size();
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) {
        int hits = 0;
        hits += (m.meet_equal(i, j, i, k) && m.meet_strictly_below(i, j, j, k)) ? 1 : 0;
        hits += (m.meet_equal(i, j, j, k) && m.meet_strictly_below(i, j, i, k)) ? 1 : 0;
        hits += (m.meet_equal(i, k, j, k) && m.meet_strictly_below(i, k, i, j)) ? 1 : 0;
        if (hits != 1)
          bad.push_back("(T) fails for indices (" + std::to_string(i) + "," + std::to_string(j) +
                        "," + std::to_string(k) + ")");
      }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      if (m.w(i, j) != flip(m.w(j, i))) {
        bad.push_back("(LR) winding not antisymmetric for (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
        continue;
      }
      for (int k = 1; k <= n; ++k) {
        if (k == i || k == j) continue;
        if (m.meet_equal(i, j, i, k) && m.meet_strictly_below(i, j, j, k) &&
            m.w(i, j) != m.w(i, k))
          bad.push_back("(LR) winding not constant below the meet for (" + std::to_string(i) +
                        ";" + std::to_string(j) + "," + std::to_string(k) + ")");
      }
    }
  return bad;
}

// Didendritic seed read off the first n sampled points: pairs are classed by
// their branch points, ordered by the tree order, wound by w.  Diagonal
// (leaf) classes are kept distinct from branch-point classes even when a
// branch point touches a sampled point.
inline LeftRightSeed rtree_seed(const RTreeModel& m, int n) {
  if (n < 1 || n > m.sample_size()) throw EmptyInput("seed size out of range");
  LeftRightSeed s;
  for (int i = 1; i <= n; ++i) s.labels.push_back(i);
  for (int i = 1; i <= n; ++i) s.class_of[{i, i}] = i - 1;
  int next = n;
  std::vector<std::pair<int, int>> rep;  // representative pair per branch class
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      int found = -1;
      for (std::size_t r = 0; r < rep.size(); ++r)
        if (m.meet_equal(rep[r].first, rep[r].second, i, j)) {
          found = static_cast<int>(r);
          break;
        }
      if (found < 0) {
        rep.push_back({i, j});
        found = static_cast<int>(rep.size()) - 1;
      }
      s.class_of[{i, j}] = n + found;
    }
  s.num_classes = next + static_cast<int>(rep.size());
  s.less.assign(static_cast<std::size_t>(s.num_classes),
                std::vector<std::uint8_t>(static_cast<std::size_t>(s.num_classes), 0));
  for (std::size_t a = 0; a < rep.size(); ++a) {
    for (std::size_t b = 0; b < rep.size(); ++b)
      if (a != b && m.meet_strictly_below(rep[a].first, rep[a].second, rep[b].first, rep[b].second))
        s.less[static_cast<std::size_t>(n) + a][static_cast<std::size_t>(n) + b] = 1;
    for (int k = 1; k <= n; ++k)
      if (m.meet_below_point(rep[a].first, rep[a].second, k))
        s.less[static_cast<std::size_t>(n) + a][static_cast<std::size_t>(k - 1)] = 1;
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) s.w[{i, j}] = m.w(i, j);
  return s;
}

struct RTreeTrajectory {
  std::vector<LabeledTree> labeled;      // labeled[k] uses labels 1..k+1
  std::vector<FullBinaryTree> shapes;
};

// Samples n_max points once and reads off the labeled tree at every step, so
// the steps are projectively consistent by construction.  The model's
// consistency properties are checked on the sample first.
inline RTreeTrajectory rtree_bridge(RTreeModel& m, int n_max, std::uint64_t seed) {
  if (n_max < 1) throw EmptyInput("rtree_bridge needs n_max >= 1");
  m.draw(n_max, seed);
  for (const std::string& v : check_model_properties(m)) {
    if (v.rfind("(T)", 0) == 0) throw PropertyTViolated(v);
    throw PropertyLRViolated(v);
  }
  RTreeTrajectory out;
  out.labeled.push_back(LabeledTree::single(1));
  out.shapes.push_back(FullBinaryTree::trivial());
  for (int n = 2; n <= n_max; ++n) {
    FiniteDDS d = left_right_extend(rtree_seed(m, n));
    LabeledTree t = d.to_tree();
    out.shapes.push_back(t.shape());
    out.labeled.push_back(std::move(t));
  }
  return out;
}

// The unit segment rooted at 0: points sit at uniform levels, the meet of
// two points is the lower level, and a point's mark decides the winding at
// its own level.  Reproduces the zig-zag law.
class IntervalZigzagModel : public RTreeModel {
 public:
  std::string name() const override { return "interval"; }

  void draw(int n, std::uint64_t seed) override {
    Rng rng(seed);
    xi_.clear();
    theta_.clear();
    for (int i = 0; i < n; ++i) {
      xi_.push_back(rng.unit());
      theta_.push_back(rng.unit());
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (xi_[static_cast<std::size_t>(i)] == xi_[static_cast<std::size_t>(j)])
          throw DegenerateSample("coincident sample points " + std::to_string(i + 1) + "," +
                                 std::to_string(j + 1));
  }

  int sample_size() const override { return static_cast<int>(xi_.size()); }

  bool meet_equal(int i, int j, int k, int l) const override {
    return level(i, j) == level(k, l);
  }
  bool meet_strictly_below(int i, int j, int k, int l) const override {
    return level(i, j) < level(k, l);
  }
  bool meet_below_point(int i, int j, int k) const override {
    return level(i, j) <= xi_[static_cast<std::size_t>(k - 1)];
  }

  Wind w(int i, int j) const override {
    const double x = xi_[static_cast<std::size_t>(i - 1)], s = theta_[static_cast<std::size_t>(i - 1)];
    const double y = xi_[static_cast<std::size_t>(j - 1)], t = theta_[static_cast<std::size_t>(j - 1)];
    if (x < y) return s < 0.5 ? Wind::left : Wind::right;
    if (y < x) return t > 0.5 ? Wind::left : Wind::right;
    return Wind::right;  // unreachable after the tie check
  }

 private:
  double level(int i, int j) const {
    return std::min(xi_[static_cast<std::size_t>(i - 1)], xi_[static_cast<std::size_t>(j - 1)]);
  }
  std::vector<double> xi_;
  std::vector<double> theta_;
};

// The word space completed with its ends: points are infinite words drawn
// from a source measure, meets are longest common prefixes, and the winding
// looks at the first letter after the meet.  Reproduces the contracted
// radix-sort marginals for the same measure.
class BinaryCompletionModel : public RTreeModel {
 public:
  explicit BinaryCompletionModel(SourceMeasure nu, std::size_t depth_cap = kDefaultDepthCap)
      : nu_(std::move(nu)), cap_(depth_cap) {}

  std::string name() const override { return "binary:" + nu_.format(); }

  void draw(int n, std::uint64_t seed) override {
    points_.clear();
    meets_.clear();
    for (int i = 0; i < n; ++i) {
      points_.push_back(nu_.stream(mix_seed(seed, 2 * static_cast<std::uint64_t>(i))));
      // the mark is drawn for symmetry with other models but plays no role
      Rng mark(mix_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
      (void)mark.unit();
    }
  }

  int sample_size() const override { return static_cast<int>(points_.size()); }

  bool meet_equal(int i, int j, int k, int l) const override {
    return meet_word(i, j) == meet_word(k, l);
  }
  bool meet_strictly_below(int i, int j, int k, int l) const override {
    return is_strict_prefix(meet_word(i, j), meet_word(k, l));
  }
  bool meet_below_point(int i, int j, int k) const override {
    const Word& u = meet_word(i, j);
    const WordStream& z = points_[static_cast<std::size_t>(k - 1)];
    for (std::size_t p = 0; p < u.size(); ++p)
      if (z.bit(p) != u.bit(p)) return false;
    return true;
  }

  Wind w(int i, int j) const override {
    const Word& u = meet_word(i, j);
    return points_[static_cast<std::size_t>(i - 1)].bit(u.size()) == 0 ? Wind::left : Wind::right;
  }

 private:
  const Word& meet_word(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto key = std::make_pair(i, j);
    auto it = meets_.find(key);
    if (it == meets_.end())
      it = meets_.emplace(key, stream_meet(points_[static_cast<std::size_t>(i - 1)],
                                           points_[static_cast<std::size_t>(j - 1)], cap_)).first;
    return it->second;
  }

  SourceMeasure nu_;
  std::size_t cap_;
  std::vector<WordStream> points_;
  mutable std::map<std::pair<int, int>, Word> meets_;
};

}  // namespace patricia
