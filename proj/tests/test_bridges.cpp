#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "patricia/patricia.hpp"

using namespace patricia;

namespace {

std::vector<Word> words(std::initializer_list<const char*> bs) {
  std::vector<Word> out;
  for (const char* b : bs) out.emplace_back(b);
  return out;
}

FullBinaryTree full(std::initializer_list<const char*> bs) {
  return FullBinaryTree(span_tree(words(bs)));
}

double tv_to_exact(const std::map<FullBinaryTree, long>& counts, long total,
                   const std::map<FullBinaryTree, Rational>& exact) {
  std::map<FullBinaryTree, double> cells;
  for (const auto& [t, q] : exact) cells[t] = -to_double(q);
  for (const auto& [t, c] : counts) cells[t] += static_cast<double>(c) / static_cast<double>(total);
  double tv = 0;
  for (const auto& [t, d] : cells) tv += std::abs(d);
  return tv / 2;
}

// True when `small` is `big` with exactly one element deleted.
bool one_deletion_apart(const std::vector<int>& small, const std::vector<int>& big) {
  if (small.size() + 1 != big.size()) return false;
  std::size_t i = 0;
  for (std::size_t j = 0; j < big.size() && i < small.size(); ++j)
    if (small[i] == big[j]) ++i;
  return i == small.size();
}

}  // namespace

// ---- bridges to a finite endpoint ----

TEST_CASE("a finite bridge walks from the root to its endpoint") {
  const FullBinaryTree endpoint = full({"000", "001", "01", "1"});
  const auto b = finite_bridge(endpoint, 7);
  REQUIRE(b.size() == 4);
  CHECK(b.front() == FullBinaryTree::trivial());
  CHECK(b.back() == endpoint);
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(b[k].leaf_count() == k + 1);

  // every step is one uniform leaf deletion away from the next
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    bool reachable = false;
    for (const Word& v : b[k + 1].leaves()) reachable = reachable || kappa_bar(b[k + 1], v) == b[k];
    CHECK(reachable);
  }

  CHECK(finite_bridge(endpoint, 7) == b);
  CHECK(finite_bridge(FullBinaryTree::trivial(), 3) ==
        std::vector<FullBinaryTree>{FullBinaryTree::trivial()});
}

TEST_CASE("bridge steps follow the exact backward kernel") {
  // from this endpoint the three-leaf step keeps the left cherry 3/4 of the time
  const FullBinaryTree endpoint = full({"00", "010", "011", "1"});
  const FullBinaryTree cherry0 = full({"00", "01", "1"});
  int hits = 0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i)
    if (finite_bridge(endpoint, static_cast<std::uint64_t>(i))[2] == cherry0) ++hits;
  const double freq = static_cast<double>(hits) / trials;
  CHECK(freq > 0.75 - 4 * 0.00685);
  CHECK(freq < 0.75 + 4 * 0.00685);
}

TEST_CASE("conditional bridge steps match the exact kernel one level down") {
  const FullBinaryTree endpoint = full({"0000", "0001", "001", "01", "1"});
  std::map<FullBinaryTree, std::map<FullBinaryTree, long>> cond;
  std::map<FullBinaryTree, long> level_counts;
  const int trials = 3000;
  for (int i = 0; i < trials; ++i) {
    const auto b = finite_bridge(endpoint, 50000 + static_cast<std::uint64_t>(i));
    ++cond[b[3]][b[2]];
    ++level_counts[b[3]];
  }
  for (const auto& [t, cnt] : level_counts) {
    if (cnt < 400) continue;  // only test well-populated conditioning events
    CHECK(tv_to_exact(cond.at(t), cnt, exact_backward_kernel(t).as_map()) < 0.08);
  }
}

// ---- caterpillars and the zig-zag bridge ----

TEST_CASE("caterpillar construction") {
  CHECK(caterpillar_tree({}) == FullBinaryTree::trivial());
  CHECK(caterpillar_tree({0}) == FullBinaryTree::cherry());
  CHECK(caterpillar_tree({1}) == FullBinaryTree::cherry());
  // the last spine letter never affects the vertex set
  CHECK(caterpillar_tree({0, 1}) == full({"00", "01", "1"}));
  CHECK(caterpillar_tree({0, 0}) == full({"00", "01", "1"}));
  CHECK(caterpillar_tree({1, 0}) == full({"0", "10", "11"}));
  CHECK(caterpillar_tree({0, 1, 0}) == full({"00", "010", "011", "1"}));
  const FullBinaryTree deep = caterpillar_tree({1, 0, 1, 1, 0});
  CHECK(deep.height() == 5);
  CHECK(deep.leaf_count() == 6);
}

TEST_CASE("zig-zag bridge paths are nested caterpillars") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ZigzagBridge zb(12, seed);
    const auto traj = zb.trajectory();
    REQUIRE(traj.size() == 12);
    for (int n = 1; n <= 12; ++n) {
      const FullBinaryTree t = traj[static_cast<std::size_t>(n) - 1];
      REQUIRE(t == zb.tree(n));
      REQUIRE(t.leaf_count() == static_cast<std::size_t>(n));
      REQUIRE(t.height() == static_cast<std::size_t>(n) - 1);
      // each internal vertex hangs a leaf on at least one side
      for (const Word& v : t.vertices())
        if (!t.is_leaf(v)) REQUIRE((t.is_leaf(v.child(0)) || t.is_leaf(v.child(1))));
      // consecutive spines differ by deleting the newest input's letter
      if (n < 12) REQUIRE(one_deletion_apart(zb.spine(n), zb.spine(n + 1)));
    }
  }
}

TEST_CASE("zig-zag bridge prefixes are seed consistent") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const ZigzagBridge big(9, seed);
    for (int n = 1; n <= 9; ++n) CHECK(ZigzagBridge(n, seed).tree(n) == big.tree(n));
  }
  CHECK_THROWS_AS(ZigzagBridge(0, 1), EmptyInput);
  CHECK_THROWS_AS(ZigzagBridge(4, 1).tree(5), EmptyInput);
  CHECK_THROWS_AS(ZigzagBridge(4, 1).tree(0), EmptyInput);
}

TEST_CASE("exact zig-zag marginals are uniform over caterpillars") {
  CHECK(zigzag_exact_marginal(1) ==
        std::map<FullBinaryTree, Rational>{{FullBinaryTree::trivial(), Rational(1)}});
  CHECK(zigzag_exact_marginal(2) ==
        std::map<FullBinaryTree, Rational>{{FullBinaryTree::cherry(), Rational(1)}});

  const auto m3 = zigzag_exact_marginal(3);
  REQUIRE(m3.size() == 2);
  CHECK(m3.at(full({"00", "01", "1"})) == Rational(1, 2));
  CHECK(m3.at(full({"0", "10", "11"})) == Rational(1, 2));

  const auto m4 = zigzag_exact_marginal(4);
  REQUIRE(m4.size() == 4);
  CHECK(m4.at(full({"000", "001", "01", "1"})) == Rational(1, 4));
  CHECK(m4.at(full({"1", "00", "010", "011"})) == Rational(1, 4));
  CHECK(m4.at(full({"0", "100", "101", "11"})) == Rational(1, 4));
  CHECK(m4.at(full({"0", "10", "110", "111"})) == Rational(1, 4));
  CHECK(m4.count(full({"00", "01", "10", "11"})) == 0);

  for (int n = 2; n <= 7; ++n) {
    Rational sum(0);
    for (const auto& [t, q] : zigzag_exact_marginal(n)) sum += q;
    CHECK(sum == Rational(1));
  }
  CHECK_THROWS_AS(zigzag_exact_marginal(0), EmptyInput);
  CHECK_THROWS_AS(zigzag_exact_marginal(23), TooLarge);
}

TEST_CASE("exact zig-zag marginals against a first-principles enumeration") {
  // levels only matter through their order: enumerate all orderings of the
  // inputs 2..n and all letter vectors, each combination equally likely
  for (int n = 3; n <= 6; ++n) {
    const int k = n - 1;  // free inputs
    std::vector<int> order(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
    std::map<FullBinaryTree, Rational> law;
    long combos = 0;
    do {
      for (int mask = 0; mask < (1 << k); ++mask) {
        // spine letter of rank r comes from the input placed at rank r
        std::vector<int> bits(static_cast<std::size_t>(k));
        for (int r = 0; r < k; ++r)
          bits[static_cast<std::size_t>(r)] = (mask >> order[static_cast<std::size_t>(r)]) & 1;
        law[caterpillar_tree(bits)] += 1;
        ++combos;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& [t, q] : law) q = q / Rational(combos);
    CHECK(law == zigzag_exact_marginal(n));
  }
}

TEST_CASE("sampled zig-zag bridges track the exact marginals") {
  std::map<FullBinaryTree, long> c3, c4;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    const ZigzagBridge zb(4, 9000 + static_cast<std::uint64_t>(i));
    ++c3[zb.tree(3)];
    ++c4[zb.tree(4)];
  }
  CHECK(tv_to_exact(c3, trials, zigzag_exact_marginal(3)) < 0.05);
  CHECK(tv_to_exact(c4, trials, zigzag_exact_marginal(4)) < 0.05);
}

// ---- continuum models ----

TEST_CASE("the interval model satisfies the sampling properties") {
  IntervalZigzagModel m;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    m.draw(6, seed);
    CHECK(check_model_properties(m).empty());
    const LeftRightSeed s = rtree_seed(m, 6);
    CHECK(s.check().empty());
  }
  CHECK_THROWS_AS(rtree_seed(m, 0), EmptyInput);
  CHECK_THROWS_AS(rtree_seed(m, 7), EmptyInput);
}

TEST_CASE("continuum bridges are projectively consistent labeled paths") {
  IntervalZigzagModel m;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RTreeTrajectory traj = rtree_bridge(m, 7, seed);
    REQUIRE(traj.labeled.size() == 7);
    REQUIRE(traj.shapes.size() == 7);
    for (int k = 0; k < 7; ++k) {
      CHECK(traj.shapes[static_cast<std::size_t>(k)] ==
            traj.labeled[static_cast<std::size_t>(k)].shape());
      std::vector<int> want;
      for (int l = 1; l <= k + 1; ++l) want.push_back(l);
      CHECK(traj.labeled[static_cast<std::size_t>(k)].label_set() == want);
    }
    for (int k = 0; k + 1 < 7; ++k)
      CHECK(labeled_backward_step(traj.labeled[static_cast<std::size_t>(k) + 1]) ==
            traj.labeled[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("interval model marginals reproduce the zig-zag law") {
  IntervalZigzagModel m;
  std::map<FullBinaryTree, long> c4;
  const int trials = 3000;
  for (int i = 0; i < trials; ++i) {
    const RTreeTrajectory traj = rtree_bridge(m, 4, 40000 + static_cast<std::uint64_t>(i));
    ++c4[traj.shapes[3]];
  }
  CHECK(tv_to_exact(c4, trials, zigzag_exact_marginal(4)) < 0.05);
}

TEST_CASE("the completed word space model mirrors the radix-sort chain") {
  for (const char* spec : {"fair", "bernoulli:1/3", "harmonic"}) {
    const SourceMeasure nu = SourceMeasure::parse(spec);
    BinaryCompletionModel m(nu);
    CHECK(m.name() == std::string("binary:") + nu.format());
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const int n = 6;
      const RTreeTrajectory traj = rtree_bridge(m, n, seed);
      // the same streams, sorted directly, give the same contracted trees
      std::vector<WordStream> zs;
      for (int i = 0; i < n; ++i)
        zs.push_back(nu.stream(mix_seed(seed, 2 * static_cast<std::uint64_t>(i))));
      for (int k = 2; k <= n; ++k) {
        std::vector<WordStream> head;
        for (int i = 0; i < k; ++i) head.push_back(zs[static_cast<std::size_t>(i)].clone());
        const RadixResult r = radix_sort_tree(head, kDefaultDepthCap);
        const ContractResult c = patricia_contract_map(r.tree);
        const LabeledTree& lt = traj.labeled[static_cast<std::size_t>(k) - 1];
        REQUIRE(lt.shape() == c.tree);
        for (int i = 0; i < k; ++i)
          REQUIRE(lt.leaf_with(i + 1) == c.leaf_map.at(r.leaf_of_input[static_cast<std::size_t>(i)]));
      }
    }
  }
}

TEST_CASE("completed word space marginals match the contracted chain law") {
  BinaryCompletionModel m(SourceMeasure::fair());
  std::map<FullBinaryTree, long> c4;
  const int trials = 3500;
  for (int i = 0; i < trials; ++i) {
    const RTreeTrajectory traj = rtree_bridge(m, 4, 80000 + static_cast<std::uint64_t>(i));
    ++c4[traj.shapes[3]];
  }
  CHECK(tv_to_exact(c4, trials, patricia_fair_exact_marginal(4)) < 0.05);
}

namespace {

// A model whose meets never compare: the triplet property cannot hold.
struct NoMeetModel : RTreeModel {
  int n = 0;
  std::string name() const override { return "broken-meets"; }
  void draw(int k, std::uint64_t) override { n = k; }
  int sample_size() const override { return n; }
  bool meet_equal(int i, int j, int k, int l) const override {
    return std::minmax(i, j) == std::minmax(k, l);
  }
  bool meet_strictly_below(int, int, int, int) const override { return false; }
  bool meet_below_point(int, int, int) const override { return true; }
  Wind w(int i, int j) const override { return i < j ? Wind::left : Wind::right; }
};

// Valid meets on three fixed levels, but every winding points left.
struct OneSidedModel : RTreeModel {
  int n = 0;
  std::string name() const override { return "broken-windings"; }
  void draw(int k, std::uint64_t) override { n = k; }
  int sample_size() const override { return n; }
  double level(int i, int j) const { return std::min(i, j); }
  bool meet_equal(int i, int j, int k, int l) const override { return level(i, j) == level(k, l); }
  bool meet_strictly_below(int i, int j, int k, int l) const override {
    return level(i, j) < level(k, l);
  }
  bool meet_below_point(int i, int j, int k) const override { return level(i, j) <= k; }
  Wind w(int, int) const override { return Wind::left; }
};

}  // namespace

TEST_CASE("broken models are rejected with the violated property") {
  NoMeetModel bad_t;
  CHECK_THROWS_AS(rtree_bridge(bad_t, 3, 1), PropertyTViolated);
  OneSidedModel bad_lr;
  CHECK_THROWS_AS(rtree_bridge(bad_lr, 3, 1), PropertyLRViolated);
  IntervalZigzagModel ok;
  CHECK_THROWS_AS(rtree_bridge(ok, 0, 1), EmptyInput);
}
