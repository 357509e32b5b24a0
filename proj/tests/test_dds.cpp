#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
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

// Labels the shortlex-sorted leaves of t with the given values, in order.
LabeledTree labeled(const FullBinaryTree& t, const std::vector<int>& by_leaf) {
  const auto ls = t.leaves();
  REQUIRE(ls.size() == by_leaf.size());
  std::map<Word, int> m;
  for (std::size_t i = 0; i < ls.size(); ++i) m[ls[i]] = by_leaf[i];
  return LabeledTree(t, m);
}

std::vector<int> iota_labels(int n) {
  std::vector<int> v;
  for (int i = 1; i <= n; ++i) v.push_back(i);
  return v;
}

}  // namespace

// ---- systems read off labeled trees ----

TEST_CASE("single label system") {
  const FiniteDDS d = FiniteDDS::from_tree(LabeledTree::single(7));
  CHECK(d.labels() == std::vector<int>{7});
  CHECK(d.num_classes() == 1);
  CHECK(d.class_index(7, 7) == 0);
  CHECK(d.check_axioms().empty());
  CHECK(d == FiniteDDS({7}, {{{7, 7}, 0}}, 1, {}, {}, {}));
  CHECK(d.to_tree() == LabeledTree::single(7));
}

TEST_CASE("two label system spells out the root split") {
  const LabeledTree lt = labeled(FullBinaryTree::cherry(), {1, 2});
  const FiniteDDS d = FiniteDDS::from_tree(lt);
  CHECK(d.labels() == std::vector<int>{1, 2});
  REQUIRE(d.num_classes() == 3);
  // classes come out numbered by first appearance: <1,1>, <1,2>, <2,2>
  CHECK(d.class_index(1, 1) == 0);
  CHECK(d.class_index(1, 2) == 1);
  CHECK(d.class_index(2, 1) == 1);
  CHECK(d.class_index(2, 2) == 2);
  CHECK(d.class_id(0) == std::pair<int, int>{1, 1});
  CHECK(d.class_id(1) == std::pair<int, int>{1, 2});
  // the meet is above both leaves, label 1 to the left, label 2 to the right
  CHECK(d.lt(1, 0));
  CHECK(d.ltL(1, 0));
  CHECK_FALSE(d.ltR(1, 0));
  CHECK(d.lt(1, 2));
  CHECK(d.ltR(1, 2));
  CHECK_FALSE(d.lt(0, 1));
  CHECK_FALSE(d.lt(0, 2));
  CHECK(d.check_axioms().empty());
  CHECK(d.to_tree() == lt);
}

TEST_CASE("three label comb system") {
  const LabeledTree lt = labeled(full({"0", "10", "11"}), {1, 2, 3});
  const FiniteDDS d = FiniteDDS::from_tree(lt);
  REQUIRE(d.num_classes() == 5);
  // <1,2> and <1,3> share the root class
  CHECK(d.class_index(1, 2) == d.class_index(1, 3));
  CHECK(d.class_index(2, 3) != d.class_index(1, 2));
  const int root = d.class_index(1, 2);
  const int mid = d.class_index(2, 3);
  CHECK(d.lt(root, mid));
  CHECK(d.ltR(root, mid));
  CHECK(d.ltL(root, d.class_index(1, 1)));
  CHECK(d.ltL(mid, d.class_index(2, 2)));
  CHECK(d.ltR(mid, d.class_index(3, 3)));
  CHECK_FALSE(d.lt(mid, root));
  CHECK(d.check_axioms().empty());
  CHECK(d.to_tree() == lt);
}

TEST_CASE("a system on n labels has 2n-1 classes") {
  Rng rng(88);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const auto shapes = enumerate_full_trees(n);
    const FullBinaryTree t = shapes[rng.below(shapes.size())];
    const FiniteDDS d = FiniteDDS::from_tree(labeled(t, iota_labels(n)));
    CHECK(d.num_classes() == 2 * n - 1);
    CHECK(d.n() == n);
  }
}

TEST_CASE("every labeled tree with up to five leaves round-trips") {
  int cases = 0;
  for (int n = 1; n <= 5; ++n) {
    for (const FullBinaryTree& shape : enumerate_full_trees(n)) {
      std::vector<int> perm = iota_labels(n);
      do {
        const LabeledTree lt = labeled(shape, perm);
        const FiniteDDS d = FiniteDDS::from_tree(lt);
        REQUIRE(d.check_axioms().empty());
        REQUIRE(d.to_tree() == lt);
        REQUIRE(left_right_extend(seed_of(d)) == d);
        ++cases;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  CHECK(cases == 1 + 2 + 12 + 120 + 1680);
}

// ---- axiom checking ----

TEST_CASE("pairwise-consistent relations can still fail the triple axiom") {
  // three labels, every pair in its own class; each pair class sits above its
  // two members with definite sides, but no two pair classes are comparable
  const FiniteDDS d({1, 2, 3},
                    {{{1, 1}, 0}, {{2, 2}, 1}, {{3, 3}, 2}, {{1, 2}, 3}, {{1, 3}, 4}, {{2, 3}, 5}},
                    6,
                    {{3, 0}, {3, 1}, {4, 0}, {4, 2}, {5, 1}, {5, 2}},
                    {{3, 0}, {4, 0}, {5, 1}},
                    {{3, 1}, {4, 2}, {5, 2}});
  const auto bad = d.check_axioms();
  REQUIRE(bad.size() == 1);
  CHECK(bad[0] == "(C) fails for labels (1,2,3)");
  CHECK_THROWS_AS(d.to_tree(), AxiomViolation);
}

TEST_CASE("constructor rejects malformed input") {
  CHECK_THROWS_AS(FiniteDDS({}, {}, 1, {}, {}, {}), EmptyInput);
  CHECK_THROWS_AS(FiniteDDS({2, 1}, {{{1, 1}, 0}}, 1, {}, {}, {}), BadLabelSet);
  // missing pair class
  CHECK_THROWS_AS(FiniteDDS({1, 2}, {{{1, 1}, 0}, {{2, 2}, 1}}, 2, {}, {}, {}), BadFormat);
  // class index out of range
  CHECK_THROWS_AS(FiniteDDS({1}, {{{1, 1}, 5}}, 1, {}, {}, {}), BadFormat);
  // relation names a class out of range
  CHECK_THROWS_AS(FiniteDDS({1}, {{{1, 1}, 0}}, 1, {{0, 3}}, {}, {}), BadFormat);
  // unused class in the list
  CHECK_THROWS_AS(FiniteDDS({1}, {{{1, 1}, 0}}, 2, {}, {}, {}), BadFormat);
}

// ---- serialization ----

TEST_CASE("json round trip") {
  Rng rng(5150);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const auto shapes = enumerate_full_trees(n);
    const FullBinaryTree t = shapes[rng.below(shapes.size())];
    std::vector<int> perm = iota_labels(n);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    const FiniteDDS d = FiniteDDS::from_tree(labeled(t, perm));
    const Json j = d.to_json();
    CHECK(FiniteDDS::from_json(j) == d);
    // stable encoding: equal systems dump to equal bytes
    CHECK(FiniteDDS::from_json(j).to_json().dump() == j.dump());
  }
  CHECK_THROWS_AS(FiniteDDS::from_json(Json::array()), BadFormat);
  CHECK_THROWS_AS(FiniteDDS::from_json(Json{{"labels", {1}}}), BadFormat);
}

TEST_CASE("corrupted encodings are rejected") {
  Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(3));
    const auto shapes = enumerate_full_trees(n);
    const FullBinaryTree t = shapes[rng.below(shapes.size())];
    std::vector<int> perm = iota_labels(n);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    const FiniteDDS d = FiniteDDS::from_tree(labeled(t, perm));
    const Json j = d.to_json();

    auto detect = [&](const Json& jj) {
      try {
        const FiniteDDS dd = FiniteDDS::from_json(jj);
        CHECK_FALSE(dd.check_axioms().empty());
      } catch (const Error&) {
        // rejected at parse time, fine
      }
      ++checked;
    };

    // drop an ancestor edge: < no longer matches <L union <R
    Json j1 = j;
    j1["lt"].erase(j1["lt"].size() - 1);
    detect(j1);

    // drop a side edge
    Json j2 = j;
    j2["ltL"].erase(j2["ltL"].size() - 1);
    detect(j2);

    // add the reverse of an ancestor edge: order axioms break
    Json j3 = j;
    j3["lt"].push_back(Json::array({j["lt"][0][1], j["lt"][0][0]}));
    detect(j3);

    // reverse the label list
    Json j4 = j;
    std::vector<int> rev = d.labels();
    std::reverse(rev.begin(), rev.end());
    j4["labels"] = rev;
    detect(j4);

    // move every pair of the last class into the first: a class goes unused
    Json j5 = j;
    const auto last = j5["classes"].size() - 1;
    for (const auto& p : j5["classes"][last]["pairs"]) j5["classes"][0]["pairs"].push_back(p);
    j5["classes"][last]["pairs"] = Json::array();
    detect(j5);
  }
  CHECK(checked == 500);
}

// ---- label-set surgery ----

TEST_CASE("restriction to the full label set is the identity") {
  const FiniteDDS d = FiniteDDS::from_tree(labeled(full({"00", "01", "10", "11"}), {3, 1, 4, 2}));
  CHECK(d.restrict_to({1, 2, 3, 4}) == d);
  CHECK(d.restrict_to({4, 3, 2, 1, 1}) == d);  // order and repeats are immaterial
  CHECK(d.restrict_to({2}) == FiniteDDS::from_tree(LabeledTree::single(2)));
  CHECK_THROWS_AS(d.restrict_to({}), EmptySubset);
  CHECK_THROWS_AS(d.restrict_to({1, 99}), BadLabelSet);
}

TEST_CASE("restriction agrees with the label-aware backward step") {
  for (const FullBinaryTree& shape : enumerate_full_trees(4)) {
    std::vector<int> perm = iota_labels(4);
    do {
      const LabeledTree lt = labeled(shape, perm);
      const FiniteDDS d = FiniteDDS::from_tree(lt);
      CHECK(d.restrict_to({1, 2, 3}) == FiniteDDS::from_tree(labeled_backward_step(lt)));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("restriction is projective") {
  Rng rng(64);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 6;
    const auto shapes = enumerate_full_trees(n);
    const FullBinaryTree t = shapes[rng.below(shapes.size())];
    std::vector<int> perm = iota_labels(n);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    LabeledTree lt = labeled(t, perm);
    const FiniteDDS d = FiniteDDS::from_tree(lt);

    // drop labels 6 then 5 via tree surgery; restriction jumps straight there
    LabeledTree down = labeled_backward_step(labeled_backward_step(lt));
    CHECK(d.restrict_to({1, 2, 3, 4}) == FiniteDDS::from_tree(down));
    // and the two restriction routes agree with each other
    CHECK(d.restrict_to({1, 2, 3, 4, 5}).restrict_to({1, 2, 3, 4}) ==
          d.restrict_to({1, 2, 3, 4}));
  }
}

TEST_CASE("relabeling commutes with reading the tree") {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const auto shapes = enumerate_full_trees(n);
    const FullBinaryTree t = shapes[rng.below(shapes.size())];
    const LabeledTree lt = labeled(t, iota_labels(n));
    const FiniteDDS d = FiniteDDS::from_tree(lt);

    std::vector<int> sig = iota_labels(n);
    for (std::size_t i = sig.size(); i > 1; --i) std::swap(sig[i - 1], sig[rng.below(i)]);
    std::map<int, int> sigma;
    for (int i = 1; i <= n; ++i) sigma[i] = sig[static_cast<std::size_t>(i) - 1];

    std::map<Word, int> relabeled;
    for (const auto& [leaf, l] : lt.labels()) relabeled[leaf] = sigma.at(l);
    CHECK(d.permuted(sigma) == FiniteDDS::from_tree(LabeledTree(t, relabeled)));

    std::map<int, int> ident;
    for (int i = 1; i <= n; ++i) ident[i] = i;
    CHECK(d.permuted(ident) == d);
  }
  const FiniteDDS d = FiniteDDS::from_tree(labeled(FullBinaryTree::cherry(), {1, 2}));
  CHECK_THROWS_AS(d.permuted({{1, 2}}), BadLabelSet);
}

// ---- seeds ----

TEST_CASE("the seed of a system recovers where each label hangs") {
  const LabeledTree lt = labeled(full({"000", "001", "01", "1"}), {2, 4, 1, 3});
  const FiniteDDS d = FiniteDDS::from_tree(lt);
  const LeftRightSeed s = seed_of(d);
  CHECK(s.labels == d.labels());
  CHECK(s.num_classes == d.num_classes());
  CHECK(s.check().empty());
  // shortlex leaf order 1, 01, 000, 001 puts label 2 on the right branch of
  // the root and label 3 on the right branch of the deepest split
  CHECK(s.wind(3, 1) == Wind::right);
  CHECK(s.wind(1, 3) == Wind::left);
  CHECK(s.wind(2, 4) == Wind::right);
  CHECK(s.wind(4, 2) == Wind::left);
  CHECK(left_right_extend(s) == d);
}

TEST_CASE("tampered seeds are refused with a specific complaint") {
  const FiniteDDS d = FiniteDDS::from_tree(labeled(full({"00", "01", "10", "11"}), {1, 2, 3, 4}));
  const LeftRightSeed good = seed_of(d);
  REQUIRE(good.check().empty());

  LeftRightSeed s = good;
  s.w[{2, 1}] = s.w.at({1, 2});
  REQUIRE_FALSE(s.check().empty());
  CHECK(s.check().front().rfind("(B'') winding not antisymmetric", 0) == 0);
  CHECK_THROWS_AS(left_right_extend(s), SeedAxiomViolation);

  s = good;
  s.w.erase({1, 2});
  CHECK(s.check().front().rfind("(B'') winding missing", 0) == 0);
  CHECK_THROWS_AS(left_right_extend(s), SeedAxiomViolation);

  s = good;
  for (auto& row : s.less) std::fill(row.begin(), row.end(), 0);
  CHECK(s.check().front().rfind("(B')", 0) == 0);
  CHECK_THROWS_AS(left_right_extend(s), SeedAxiomViolation);

  s = good;
  s.less[0][0] = 1;
  CHECK(s.check().front() == "(order) < is not irreflexive");
  CHECK_THROWS_AS(left_right_extend(s), SeedAxiomViolation);

  s = good;
  std::swap(s.labels[0], s.labels[1]);
  CHECK(s.check().front() == "(A) labels must be strictly increasing");
  CHECK_THROWS_AS(left_right_extend(s), SeedAxiomViolation);

  // make one leaf class sit above another: every listed axiom still holds,
  // but no tree can realize it, which the extension detects after the fact
  s = good;
  s.less[static_cast<std::size_t>(s.cls(1, 1))][static_cast<std::size_t>(s.cls(2, 2))] = 1;
  CHECK(s.check().empty());
  CHECK_THROWS_AS(left_right_extend(s), SeedAxiomViolation);
}

// ---- the exchangeable zig-zag system ----

TEST_CASE("zig-zag draw basics") {
  CHECK(zigzag_dds(1, 3) == FiniteDDS({1}, {{{1, 1}, 0}}, 1, {}, {}, {}));
  CHECK(zigzag_dds(5, 11) == zigzag_dds(5, 11));
  CHECK(zigzag_dds(5, 11) != zigzag_dds(5, 12));
  CHECK_THROWS_AS(zigzag_dds(0, 1), EmptyInput);
  CHECK_THROWS_AS(zigzag_dds(65, 1), TooLarge);
}

TEST_CASE("zig-zag systems realize combs") {
  for (int n = 1; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const FiniteDDS d = zigzag_dds(n, 1000 * static_cast<std::uint64_t>(n) + seed);
      REQUIRE(d.check_axioms().empty());
      const FullBinaryTree t = d.to_tree().shape();
      REQUIRE(t.height() == static_cast<std::size_t>(n) - 1);
      for (const Word& v : t.vertices())
        if (!t.is_leaf(v)) REQUIRE((t.is_leaf(v.child(0)) || t.is_leaf(v.child(1))));
    }
  }
}

TEST_CASE("three-label zig-zag law is uniform over all labeled trees") {
  // enumerate the generator's choices exactly: 6 level orderings x 8 windings
  std::map<std::string, int> counts;
  std::vector<int> rank = {0, 1, 2};
  do {
    for (int mask = 0; mask < 8; ++mask) {
      // rebuild the seed the way the sampler does, levels given by ranks
      LeftRightSeed s;
      s.labels = {1, 2, 3};
      const double u[3] = {(rank[0] + 1) / 4.0, (rank[1] + 1) / 4.0, (rank[2] + 1) / 4.0};
      const Wind eps[3] = {(mask & 1) ? Wind::right : Wind::left,
                           (mask & 2) ? Wind::right : Wind::left,
                           (mask & 4) ? Wind::right : Wind::left};
      for (int i = 0; i < 3; ++i) s.class_of[{i + 1, i + 1}] = i;
      int next = 3;
      std::map<int, int> min_class;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const int h = u[i] < u[j] ? i : j;
          auto [it, fresh] = min_class.emplace(h, next);
          if (fresh) ++next;
          s.class_of[{i + 1, j + 1}] = it->second;
        }
      s.num_classes = next;
      s.less.assign(static_cast<std::size_t>(next),
                    std::vector<std::uint8_t>(static_cast<std::size_t>(next), 0));
      auto level = [&](int c) {
        if (c < 3) return u[c];
        for (const auto& [h, cc] : min_class)
          if (cc == c) return u[h];
        return 0.0;
      };
      for (int a = 3; a < next; ++a)
        for (int b = 0; b < next; ++b) {
          if (a == b) continue;
          s.less[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
              b < 3 ? level(a) <= level(b) : level(a) < level(b);
        }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (i == j) continue;
          s.w[{i + 1, j + 1}] = u[i] < u[j] ? eps[i] : flip(eps[j]);
        }
      ++counts[to_newick(left_right_extend(s).to_tree())];
    }
  } while (std::next_permutation(rank.begin(), rank.end()));

  // all 12 labeled trees on three leaves, four generator choices each
  REQUIRE(counts.size() == 12);
  for (const auto& [nw, c] : counts) CHECK(c == 4);

  // and the seeded sampler tracks that law
  std::map<std::string, long> freq;
  const int trials = 6000;
  for (int i = 0; i < trials; ++i) ++freq[to_newick(zigzag_dds(3, 777 + static_cast<std::uint64_t>(i)).to_tree())];
  REQUIRE(freq.size() == 12);
  double tv = 0;
  for (const auto& [nw, c] : freq) tv += std::abs(static_cast<double>(c) / trials - 1.0 / 12);
  tv /= 2;
  CHECK(tv < 0.05);
}

TEST_CASE("zig-zag draws are projectively consistent") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed)
    for (int n = 1; n <= 5; ++n) {
      std::vector<int> head = iota_labels(n);
      CHECK(zigzag_dds(n + 1, seed).restrict_to(head) == zigzag_dds(n, seed));
    }
}
