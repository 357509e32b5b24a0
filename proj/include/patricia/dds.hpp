#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "patricia/errors.hpp"
#include "patricia/labeled_tree.hpp"
#include "patricia/rng.hpp"
#include "patricia/serialize.hpp"
#include "patricia/tree.hpp"

namespace patricia {

// Winding direction attached to ordered label pairs: 'left' means the other
// point attaches on the left of the shared branch point.
enum class Wind : std::uint8_t { left, right };

inline Wind flip(Wind w) { return w == Wind::left ? Wind::right : Wind::left; }

inline std::string to_string(Wind w) { return w == Wind::left ? "left" : "right"; }

// A didendritic system over a finite label set: an equivalence on ordered
// label pairs together with three strict orders (ancestor, left, right) on
// the classes.  Tree-realizable systems are exactly those passing
// check_axioms(); to_tree()/from_tree() convert to and from labeled trees.
//
// Encoding notes: the pair equivalence is stored symmetrically (so symmetry
// of the relation is structural, not checked), class indices are normalized
// to first appearance scanning pairs (i,j), i <= j, in label order, and
// relations are dense class-by-class matrices.  At most 64 labels.
class FiniteDDS {
 public:
  FiniteDDS(std::vector<int> labels, std::map<std::pair<int, int>, int> class_of,
            int num_classes, const std::vector<std::pair<int, int>>& lt,
            const std::vector<std::pair<int, int>>& ltL,
            const std::vector<std::pair<int, int>>& ltR)
      : labels_(std::move(labels)) {
    check_labels(labels_);
    const int n = static_cast<int>(labels_.size());
    if (num_classes <= 0) throw BadFormat("need at least one class");
    cls_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto it = class_of.find({labels_[i], labels_[j]});
        if (it == class_of.end()) it = class_of.find({labels_[j], labels_[i]});
        if (it == class_of.end())
          throw BadFormat("pair (" + std::to_string(labels_[i]) + "," +
                          std::to_string(labels_[j]) + ") has no class");
        if (it->second < 0 || it->second >= num_classes)
          throw BadFormat("class index out of range");
        cls_[static_cast<std::size_t>(i) * n + j] = it->second;
      }
    c_ = num_classes;
    lt_.assign(static_cast<std::size_t>(c_) * c_, 0);
    ltL_.assign(static_cast<std::size_t>(c_) * c_, 0);
    ltR_.assign(static_cast<std::size_t>(c_) * c_, 0);
    auto fill = [&](std::vector<std::uint8_t>& rel, const std::vector<std::pair<int, int>>& src) {
      for (auto [a, b] : src) {
        if (a < 0 || a >= c_ || b < 0 || b >= c_)
          throw BadFormat("relation refers to a class out of range");
        rel[static_cast<std::size_t>(a) * c_ + b] = 1;
      }
    };
    fill(lt_, lt);
    fill(ltL_, ltL);
    fill(ltR_, ltR);
    normalize();
  }

  static FiniteDDS from_tree(const LabeledTree& t);

  const std::vector<int>& labels() const { return labels_; }
  int n() const { return static_cast<int>(labels_.size()); }
  int num_classes() const { return c_; }

  // Class of the pair (i, j) of labels.
  int class_index(int i, int j) const { return cls_[pos(i) * labels_.size() + pos(j)]; }

  // Canonical name of a class: its first pair (i, j), i <= j, in label order.
  std::pair<int, int> class_id(int c) const {
    const int n = static_cast<int>(labels_.size());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (cls_[static_cast<std::size_t>(i) * n + j] == c)
          return {labels_[i], labels_[j]};
    throw BadFormat("class " + std::to_string(c) + " names no pair");
  }

  bool lt(int a, int b) const { return lt_[static_cast<std::size_t>(a) * c_ + b] != 0; }
  bool ltL(int a, int b) const { return ltL_[static_cast<std::size_t>(a) * c_ + b] != 0; }
  bool ltR(int a, int b) const { return ltR_[static_cast<std::size_t>(a) * c_ + b] != 0; }

  // Empty result means the system satisfies all the didendritic axioms.
  std::vector<std::string> check_axioms() const;

  // The unique labeled tree realizing this system; throws AxiomViolation
  // (citing the failing axiom) if there is none.
  LabeledTree to_tree() const;

  FiniteDDS restrict_to(const std::vector<int>& subset) const;
  FiniteDDS permuted(const std::map<int, int>& sigma) const;

  Json to_json() const;
  static FiniteDDS from_json(const Json& j);

  bool operator==(const FiniteDDS& rhs) const {
    return labels_ == rhs.labels_ && cls_ == rhs.cls_ && lt_ == rhs.lt_ &&
           ltL_ == rhs.ltL_ && ltR_ == rhs.ltR_;
  }
  bool operator!=(const FiniteDDS& rhs) const { return !(*this == rhs); }

 private:
  FiniteDDS() = default;

  static void check_labels(const std::vector<int>& labels) {
    if (labels.empty()) throw EmptyInput("a system needs at least one label");
    if (labels.size() > 64)
      throw TooLarge("at most 64 labels, got " + std::to_string(labels.size()));
    for (std::size_t i = 1; i < labels.size(); ++i)
      if (labels[i] <= labels[i - 1])
        throw BadLabelSet("labels must be strictly increasing");
  }

  std::size_t pos(int label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label)
      throw BadLabelSet("unknown label " + std::to_string(label));
    return static_cast<std::size_t>(it - labels_.begin());
  }

  // Renumber classes to first appearance over pairs (i, j), i <= j, so that
  // equal systems have bytewise equal encodings.
  void normalize() {
    const int n = static_cast<int>(labels_.size());
    std::vector<int> remap(static_cast<std::size_t>(c_), -1);
    int next = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        int& m = remap[static_cast<std::size_t>(cls_[static_cast<std::size_t>(i) * n + j])];
        if (m < 0) m = next++;
      }
    if (next != c_)
      throw BadFormat("class list has " + std::to_string(c_ - next) + " unused classes");
    std::vector<int> cls2(cls_.size());
    for (std::size_t k = 0; k < cls_.size(); ++k)
      cls2[k] = remap[static_cast<std::size_t>(cls_[k])];
    cls_.swap(cls2);
    auto remap_rel = [&](std::vector<std::uint8_t>& rel) {
      std::vector<std::uint8_t> r2(rel.size(), 0);
      for (int a = 0; a < c_; ++a)
        for (int b = 0; b < c_; ++b)
          if (rel[static_cast<std::size_t>(a) * c_ + b])
            r2[static_cast<std::size_t>(remap[static_cast<std::size_t>(a)]) * c_ +
               remap[static_cast<std::size_t>(b)]] = 1;
      rel.swap(r2);
    };
    remap_rel(lt_);
    remap_rel(ltL_);
    remap_rel(ltR_);
  }

  std::vector<int> labels_;
  std::vector<int> cls_;  // n*n class indices, symmetric
  int c_ = 0;
  std::vector<std::uint8_t> lt_, ltL_, ltR_;  // c*c incidence matrices
};

// ---- construction from a labeled tree ----

inline FiniteDDS FiniteDDS::from_tree(const LabeledTree& t) {
  FiniteDDS d;
  d.labels_ = t.label_set();
  check_labels(d.labels_);
  const int n = static_cast<int>(d.labels_.size());
  std::map<Word, int> index_of;   // branch-point word -> class
  std::vector<Word> vertex_of;    // class -> word
  d.cls_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Word m = meet(t.leaf_with(d.labels_[static_cast<std::size_t>(i)]),
                          t.leaf_with(d.labels_[static_cast<std::size_t>(j)]));
      auto [it, fresh] = index_of.emplace(m, static_cast<int>(vertex_of.size()));
      if (fresh) vertex_of.push_back(m);
      d.cls_[static_cast<std::size_t>(i) * n + j] = it->second;
      d.cls_[static_cast<std::size_t>(j) * n + i] = it->second;
    }
  d.c_ = static_cast<int>(vertex_of.size());
  d.lt_.assign(static_cast<std::size_t>(d.c_) * d.c_, 0);
  d.ltL_.assign(static_cast<std::size_t>(d.c_) * d.c_, 0);
  d.ltR_.assign(static_cast<std::size_t>(d.c_) * d.c_, 0);
  for (int a = 0; a < d.c_; ++a)
    for (int b = 0; b < d.c_; ++b) {
      if (a == b) continue;
      const Word& u = vertex_of[static_cast<std::size_t>(a)];
      const Word& v = vertex_of[static_cast<std::size_t>(b)];
      if (is_strict_prefix(u, v)) {
        d.lt_[static_cast<std::size_t>(a) * d.c_ + b] = 1;
        if (v.bit(u.size()) == 0)
          d.ltL_[static_cast<std::size_t>(a) * d.c_ + b] = 1;
        else
          d.ltR_[static_cast<std::size_t>(a) * d.c_ + b] = 1;
      }
    }
  d.normalize();
  return d;
}

// ---- axioms ----

inline std::vector<std::string> FiniteDDS::check_axioms() const {
  std::vector<std::string> bad;
  const int n = static_cast<int>(labels_.size());
  auto pair_name = [&](int i, int j) {
    return "<" + std::to_string(labels_[static_cast<std::size_t>(i)]) + "," +
           std::to_string(labels_[static_cast<std::size_t>(j)]) + ">";
  };
  auto cls_at = [&](int i, int j) { return cls_[static_cast<std::size_t>(i) * n + j]; };

  // strict orders
  for (auto [rel, name] : {std::pair<const std::vector<std::uint8_t>*, const char*>{&lt_, "<"},
                           {&ltL_, "<L"},
                           {&ltR_, "<R"}}) {
    for (int a = 0; a < c_; ++a)
      if ((*rel)[static_cast<std::size_t>(a) * c_ + a]) {
        bad.push_back(std::string("(order) ") + name + " is not irreflexive");
        break;
      }
    bool trans_ok = true;
    for (int a = 0; a < c_ && trans_ok; ++a)
      for (int b = 0; b < c_ && trans_ok; ++b) {
        if (!(*rel)[static_cast<std::size_t>(a) * c_ + b]) continue;
        for (int cc = 0; cc < c_; ++cc)
          if ((*rel)[static_cast<std::size_t>(b) * c_ + cc] &&
              !(*rel)[static_cast<std::size_t>(a) * c_ + cc]) {
            bad.push_back(std::string("(order) ") + name + " is not transitive");
            trans_ok = false;
            break;
          }
      }
  }

  // (B): each off-diagonal class sits left of one member's leaf and right of
  // the other's.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int c = cls_at(i, j);
      const int li = cls_at(i, i), lj = cls_at(j, j);
      const bool lr = ltL(c, li) && ltR(c, lj);
      const bool rl = ltR(c, li) && ltL(c, lj);
      if (lr == rl) bad.push_back("(B) fails for " + pair_name(i, j));
    }

  // (C): one label of each triple splits away strictly above the other two.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const int ij = cls_at(i, j), ik = cls_at(i, k), jk = cls_at(j, k);
        int hits = 0;
        hits += (ij == ik && lt(ij, jk)) ? 1 : 0;
        hits += (ij == jk && lt(ij, ik)) ? 1 : 0;
        hits += (ik == jk && lt(ik, ij)) ? 1 : 0;
        if (hits != 1)
          bad.push_back("(C) fails for labels (" + std::to_string(labels_[static_cast<std::size_t>(i)]) +
                        "," + std::to_string(labels_[static_cast<std::size_t>(j)]) + "," +
                        std::to_string(labels_[static_cast<std::size_t>(k)]) + ")");
      }

  // (D): left and right are disjoint and together exhaust <.
  for (int a = 0; a < c_; ++a)
    for (int b = 0; b < c_; ++b) {
      const bool l = ltL(a, b), r = ltR(a, b);
      if (l && r) {
        bad.push_back("(D) fails: a class pair is both <L and <R");
        a = c_;
        break;
      }
      if ((l || r) != lt(a, b)) {
        bad.push_back("(D) fails: < does not match <L union <R");
        a = c_;
        break;
      }
    }

  // (E): being left (right) of b propagates to everything below b.
  for (int a = 0; a < c_; ++a)
    for (int b = 0; b < c_; ++b) {
      if (!ltL(a, b) && !ltR(a, b)) continue;
      for (int cc = 0; cc < c_; ++cc) {
        if (!lt(b, cc)) continue;
        if (ltL(a, b) && !ltL(a, cc)) bad.push_back("(E) fails below " + std::to_string(b));
        if (ltR(a, b) && !ltR(a, cc)) bad.push_back("(E) fails below " + std::to_string(b));
        if (!bad.empty() && bad.back().rfind("(E)", 0) == 0) {
          a = c_;
          b = c_;
          break;
        }
      }
    }

  return bad;
}

// ---- realization ----

namespace detail {

// Insertion step shared by to_tree and left_right_extend.  The oracle answers
// class questions about pairs of labels; exactly one decomposition case can
// apply at each level.
template <class Oracle>
LabeledTree dds_insert(const LabeledTree& t, int x, const Oracle& o) {
  const auto s = t.label_set();
  if (s.size() == 1) {
    const int a = s[0];
    return o.new_goes_left(x, a) ? join_labeled(LabeledTree::single(x), t)
                                 : join_labeled(t, LabeledTree::single(x));
  }
  const LabeledTree t0 = labeled_subtree_at(t, Word("0"));
  const LabeledTree t1 = labeled_subtree_at(t, Word("1"));
  const int a = t0.labels().begin()->second;
  const int b = t1.labels().begin()->second;
  if (o.same_class(x, a, x, b) && o.less(x, a, a, b)) {
    // x splits off above the whole of t
    return o.new_goes_left(x, a) ? join_labeled(LabeledTree::single(x), t)
                                 : join_labeled(t, LabeledTree::single(x));
  }
  if (o.same_class(a, b, a, x) && o.less(a, b, b, x))
    return join_labeled(t0, dds_insert(t1, x, o));
  if (o.same_class(b, a, b, x) && o.less(b, a, a, x))
    return join_labeled(dds_insert(t0, x, o), t1);
  throw AxiomViolation("triple (" + std::to_string(x) + "," + std::to_string(a) + "," +
                       std::to_string(b) + ") matches no decomposition case");
}

}  // namespace detail

inline LabeledTree FiniteDDS::to_tree() const {
  auto bad = check_axioms();
  if (!bad.empty()) throw AxiomViolation(bad.front());
  struct Oracle {
    const FiniteDDS* d;
    bool same_class(int i, int a, int j, int b) const {
      return d->class_index(i, a) == d->class_index(j, b);
    }
    bool less(int i, int a, int j, int b) const {
      return d->lt(d->class_index(i, a), d->class_index(j, b));
    }
    bool new_goes_left(int x, int a) const {
      return d->ltL(d->class_index(x, a), d->class_index(x, x));
    }
  } oracle{this};
  LabeledTree t = LabeledTree::single(labels_.front());
  for (std::size_t i = 1; i < labels_.size(); ++i)
    t = detail::dds_insert(t, labels_[i], oracle);
  if (from_tree(t) != *this)
    throw AxiomViolation("system is not realized by any labeled tree");
  return t;
}

// ---- label-set surgery ----

inline FiniteDDS FiniteDDS::restrict_to(const std::vector<int>& subset) const {
  if (subset.empty()) throw EmptySubset("restriction to no labels");
  std::vector<int> sub = subset;
  std::sort(sub.begin(), sub.end());
  sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
  std::vector<std::size_t> at;
  for (int l : sub) at.push_back(pos(l));  // throws BadLabelSet if missing

  FiniteDDS d;
  d.labels_ = sub;
  const int m = static_cast<int>(sub.size());
  const int n = static_cast<int>(labels_.size());
  // retain only classes meeting the restricted pair set
  std::vector<int> remap(static_cast<std::size_t>(c_), -1);
  int next = 0;
  d.cls_.assign(static_cast<std::size_t>(m) * m, -1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int c = cls_[at[static_cast<std::size_t>(i)] * n + at[static_cast<std::size_t>(j)]];
      int& r = remap[static_cast<std::size_t>(c)];
      if (r < 0) r = next++;
      d.cls_[static_cast<std::size_t>(i) * m + j] = r;
    }
  d.c_ = next;
  d.lt_.assign(static_cast<std::size_t>(next) * next, 0);
  d.ltL_.assign(static_cast<std::size_t>(next) * next, 0);
  d.ltR_.assign(static_cast<std::size_t>(next) * next, 0);
  for (int a = 0; a < c_; ++a) {
    if (remap[static_cast<std::size_t>(a)] < 0) continue;
    for (int b = 0; b < c_; ++b) {
      if (remap[static_cast<std::size_t>(b)] < 0) continue;
      const std::size_t to = static_cast<std::size_t>(remap[static_cast<std::size_t>(a)]) * next +
                             remap[static_cast<std::size_t>(b)];
      if (lt(a, b)) d.lt_[to] = 1;
      if (ltL(a, b)) d.ltL_[to] = 1;
      if (ltR(a, b)) d.ltR_[to] = 1;
    }
  }
  d.normalize();
  return d;
}

inline FiniteDDS FiniteDDS::permuted(const std::map<int, int>& sigma) const {
  if (sigma.size() != labels_.size())
    throw BadLabelSet("permutation must cover the label set exactly");
  std::map<int, int> inv;
  for (const auto& [from, to] : sigma) {
    pos(from);  // membership check
    if (!inv.emplace(to, from).second)
      throw BadLabelSet("permutation maps two labels to " + std::to_string(to));
  }
  FiniteDDS d;
  for (const auto& [to, from] : inv) d.labels_.push_back(to);
  check_labels(d.labels_);
  const int n = static_cast<int>(labels_.size());
  d.cls_.assign(static_cast<std::size_t>(n) * n, -1);
  int i = 0;
  for (const auto& [ti, fi] : inv) {
    int j = 0;
    for (const auto& [tj, fj] : inv) {
      d.cls_[static_cast<std::size_t>(i) * n + j] =
          cls_[pos(fi) * static_cast<std::size_t>(n) + pos(fj)];
      ++j;
    }
    ++i;
  }
  d.c_ = c_;
  d.lt_ = lt_;
  d.ltL_ = ltL_;
  d.ltR_ = ltR_;
  d.normalize();
  return d;
}

// ---- serialization ----

inline Json FiniteDDS::to_json() const {
  Json j;
  j["labels"] = labels_;
  const int n = static_cast<int>(labels_.size());
  Json classes = Json::array();
  for (int c = 0; c < c_; ++c) {
    Json pairs = Json::array();
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k)
        if (cls_[static_cast<std::size_t>(i) * n + k] == c)
          pairs.push_back({labels_[static_cast<std::size_t>(i)], labels_[static_cast<std::size_t>(k)]});
    auto id = class_id(c);
    classes.push_back(Json{{"id", {id.first, id.second}}, {"pairs", pairs}});
  }
  j["classes"] = classes;
  auto rel_out = [&](const std::vector<std::uint8_t>& rel) {
    Json out = Json::array();
    for (int a = 0; a < c_; ++a)
      for (int b = 0; b < c_; ++b)
        if (rel[static_cast<std::size_t>(a) * c_ + b]) out.push_back({a, b});
    return out;
  };
  j["lt"] = rel_out(lt_);
  j["ltL"] = rel_out(ltL_);
  j["ltR"] = rel_out(ltR_);
  return j;
}

inline FiniteDDS FiniteDDS::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("classes"))
    throw BadFormat("expected an object with \"labels\" and \"classes\"");
  std::vector<int> labels = j["labels"].get<std::vector<int>>();
  std::map<std::pair<int, int>, int> class_of;
  int c = 0;
  for (const auto& ce : j["classes"]) {
    if (!ce.contains("pairs")) throw BadFormat("class entry without \"pairs\"");
    for (const auto& p : ce["pairs"]) {
      if (!p.is_array() || p.size() != 2) throw BadFormat("pair entries must be [i,j]");
      class_of[{p[0].get<int>(), p[1].get<int>()}] = c;
    }
    ++c;
  }
  auto rel_in = [&](const char* key) {
    std::vector<std::pair<int, int>> out;
    if (j.contains(key))
      for (const auto& p : j[key]) out.push_back({p[0].get<int>(), p[1].get<int>()});
    return out;
  };
  return FiniteDDS(std::move(labels), std::move(class_of), c, rel_in("lt"), rel_in("ltL"),
                   rel_in("ltR"));
}

// ---- seeds: equivalence, ancestor order and windings only ----

// The data needed to grow a full system: the pair equivalence with its
// ancestor order, plus a winding for every ordered pair of distinct labels.
// left_right_extend() reconstructs the unique left/right refinement.
struct LeftRightSeed {
  std::vector<int> labels;                      // strictly increasing
  std::map<std::pair<int, int>, int> class_of;  // unordered pairs; (i,j) or (j,i) keyed
  int num_classes = 0;
  std::vector<std::vector<std::uint8_t>> less;  // num_classes x num_classes
  std::map<std::pair<int, int>, Wind> w;        // ordered pairs of distinct labels

  int cls(int i, int j) const {
    auto it = class_of.find({i, j});
    if (it == class_of.end()) it = class_of.find({j, i});
    if (it == class_of.end())
      throw BadFormat("seed pair (" + std::to_string(i) + "," + std::to_string(j) +
                      ") has no class");
    return it->second;
  }

  Wind wind(int i, int j) const {
    auto it = w.find({i, j});
    if (it == w.end())
      throw BadFormat("seed winding (" + std::to_string(i) + "," + std::to_string(j) +
                      ") missing");
    return it->second;
  }

  // Empty result means the seed axioms hold.
  std::vector<std::string> check() const {
    std::vector<std::string> bad;
    if (labels.empty()) return {"(A) empty label set"};
    for (std::size_t i = 1; i < labels.size(); ++i)
      if (labels[i] <= labels[i - 1]) return {"(A) labels must be strictly increasing"};
    const int n = static_cast<int>(labels.size());
    const int c = num_classes;
    if (c <= 0) return {"(A) need at least one class"};
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const int cc = cls(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
        if (cc < 0 || cc >= c) return {"(A) class index out of range"};
      }
    if (static_cast<int>(less.size()) != c) return {"(A) order matrix has wrong size"};
    for (const auto& row : less)
      if (static_cast<int>(row.size()) != c) return {"(A) order matrix has wrong size"};

    auto diag = [&](int i) { return cls(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(i)]); };
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (diag(i) == diag(j)) bad.push_back("(A) two leaf classes coincide");

    for (int a = 0; a < c; ++a)
      if (less[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)]) {
        bad.push_back("(order) < is not irreflexive");
        break;
      }
    for (int a = 0; a < c; ++a)
      for (int b = 0; b < c; ++b) {
        if (!less[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
        for (int d = 0; d < c; ++d)
          if (less[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)] &&
              !less[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)]) {
            bad.push_back("(order) < is not transitive");
            a = b = c;
            d = c;
          }
      }

    // (B'): an off-diagonal class lies strictly above both members' leaves.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const int cc = cls(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
        if (!less[static_cast<std::size_t>(cc)][static_cast<std::size_t>(diag(i))] ||
            !less[static_cast<std::size_t>(cc)][static_cast<std::size_t>(diag(j))])
          bad.push_back("(B') fails for labels (" + std::to_string(labels[static_cast<std::size_t>(i)]) +
                        "," + std::to_string(labels[static_cast<std::size_t>(j)]) + ")");
      }

    // (C)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          const int li = labels[static_cast<std::size_t>(i)], lj = labels[static_cast<std::size_t>(j)],
                    lk = labels[static_cast<std::size_t>(k)];
          const int ij = cls(li, lj), ik = cls(li, lk), jk = cls(lj, lk);
          int hits = 0;
          hits += (ij == ik && less[static_cast<std::size_t>(ij)][static_cast<std::size_t>(jk)]) ? 1 : 0;
          hits += (ij == jk && less[static_cast<std::size_t>(ij)][static_cast<std::size_t>(ik)]) ? 1 : 0;
          hits += (ik == jk && less[static_cast<std::size_t>(ik)][static_cast<std::size_t>(ij)]) ? 1 : 0;
          if (hits != 1)
            bad.push_back("(C) fails for labels (" + std::to_string(li) + "," + std::to_string(lj) +
                          "," + std::to_string(lk) + ")");
        }

    // (B''): windings are total and antisymmetric.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const int li = labels[static_cast<std::size_t>(i)], lj = labels[static_cast<std::size_t>(j)];
        auto it = w.find({li, lj});
        auto jt = w.find({lj, li});
        if (it == w.end() || jt == w.end()) {
          bad.push_back("(B'') winding missing for a label pair");
          i = n;
          break;
        }
        if (it->second != flip(jt->second))
          bad.push_back("(B'') winding not antisymmetric for (" + std::to_string(li) + "," +
                        std::to_string(lj) + ")");
      }

    // (E'): equal classes looking down the same branch wind the same way.
    if (bad.empty()) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            if (i == j || i == k || j == k) continue;
            const int li = labels[static_cast<std::size_t>(i)], lj = labels[static_cast<std::size_t>(j)],
                      lk = labels[static_cast<std::size_t>(k)];
            const int ij = cls(li, lj), ik = cls(li, lk), jk = cls(lj, lk);
            if (ij == ik && less[static_cast<std::size_t>(ij)][static_cast<std::size_t>(jk)] &&
                wind(li, lj) != wind(li, lk))
              bad.push_back("(E') windings disagree for (" + std::to_string(li) + ";" +
                            std::to_string(lj) + "," + std::to_string(lk) + ")");
          }
    }
    return bad;
  }
};

// Grows the unique didendritic system refining a seed; SeedAxiomViolation if
// the seed axioms fail or no labeled tree realizes the seed.
inline FiniteDDS left_right_extend(const LeftRightSeed& seed) {
  auto bad = seed.check();
  if (!bad.empty()) throw SeedAxiomViolation(bad.front());
  struct Oracle {
    const LeftRightSeed* s;
    bool same_class(int i, int a, int j, int b) const { return s->cls(i, a) == s->cls(j, b); }
    bool less(int i, int a, int j, int b) const {
      return s->less[static_cast<std::size_t>(s->cls(i, a))][static_cast<std::size_t>(s->cls(j, b))] != 0;
    }
    bool new_goes_left(int x, int a) const { return s->wind(x, a) == Wind::left; }
  } oracle{&seed};
  LabeledTree t = LabeledTree::single(seed.labels.front());
  try {
    for (std::size_t i = 1; i < seed.labels.size(); ++i)
      t = detail::dds_insert(t, seed.labels[i], oracle);
  } catch (const AxiomViolation& e) {
    throw SeedAxiomViolation(e.what());
  }
  FiniteDDS d = FiniteDDS::from_tree(t);
  // The produced system must restrict back to the seed exactly.
  const int n = static_cast<int>(seed.labels.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int li = seed.labels[static_cast<std::size_t>(i)], lj = seed.labels[static_cast<std::size_t>(j)];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const int lk = seed.labels[static_cast<std::size_t>(k)], ll = seed.labels[static_cast<std::size_t>(l)];
          const bool eq_seed = seed.cls(li, lj) == seed.cls(lk, ll);
          const bool eq_sys = d.class_index(li, lj) == d.class_index(lk, ll);
          const bool lt_seed = seed.less[static_cast<std::size_t>(seed.cls(li, lj))]
                                        [static_cast<std::size_t>(seed.cls(lk, ll))] != 0;
          const bool lt_sys = d.lt(d.class_index(li, lj), d.class_index(lk, ll));
          if (eq_seed != eq_sys || lt_seed != lt_sys)
            throw SeedAxiomViolation("order structure is not realizable by a labeled tree");
        }
      if (li != lj) {
        const bool left_sys = d.ltL(d.class_index(li, lj), d.class_index(li, li));
        if ((seed.wind(li, lj) == Wind::left) != left_sys)
          throw SeedAxiomViolation("windings are not realizable by a labeled tree");
      }
    }
  return d;
}

// The seed carried by a full system: forget left/right, keep windings.
inline LeftRightSeed seed_of(const FiniteDDS& d) {
  LeftRightSeed s;
  s.labels = d.labels();
  s.num_classes = d.num_classes();
  const int n = d.n();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      s.class_of[{s.labels[static_cast<std::size_t>(i)], s.labels[static_cast<std::size_t>(j)]}] =
          d.class_index(s.labels[static_cast<std::size_t>(i)], s.labels[static_cast<std::size_t>(j)]);
  s.less.assign(static_cast<std::size_t>(s.num_classes),
                std::vector<std::uint8_t>(static_cast<std::size_t>(s.num_classes), 0));
  for (int a = 0; a < s.num_classes; ++a)
    for (int b = 0; b < s.num_classes; ++b)
      if (d.lt(a, b)) s.less[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
  for (int i : s.labels)
    for (int j : s.labels)
      if (i != j)
        s.w[{i, j}] = d.ltL(d.class_index(i, j), d.class_index(i, i)) ? Wind::left : Wind::right;
  return s;
}

// ---- the exchangeable zig-zag system ----

// Random system over labels 1..n: each label gets a uniform level U_i and a
// fair winding; pairs are classed by whichever member has the smaller level,
// classes order by their levels, and the winding of (i,j) is taken from the
// smaller-level member.  DegenerateSample on level ties (probability ~0).
inline FiniteDDS zigzag_dds(int n, std::uint64_t seed) {
  if (n < 1) throw EmptyInput("zigzag_dds needs n >= 1");
  if (n > 64) throw TooLarge("at most 64 labels");
  Rng rng(seed);
  std::vector<double> u(static_cast<std::size_t>(n));
  std::vector<Wind> eps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    u[static_cast<std::size_t>(i)] = rng.unit();
    eps[static_cast<std::size_t>(i)] = rng.bit() == 0 ? Wind::left : Wind::right;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u[static_cast<std::size_t>(i)] == u[static_cast<std::size_t>(j)])
        throw DegenerateSample("level tie between labels " + std::to_string(i + 1) + " and " +
                               std::to_string(j + 1));
  if (n == 1) {
    return FiniteDDS({1}, {{{1, 1}, 0}}, 1, {}, {}, {});
  }

  LeftRightSeed s;
  for (int i = 1; i <= n; ++i) s.labels.push_back(i);
  // diagonal classes first, then one class per label that is the smaller
  // level of some pair
  for (int i = 0; i < n; ++i) s.class_of[{i + 1, i + 1}] = i;
  int next = n;
  std::map<int, int> min_class;  // label position -> class of pairs whose min it is
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int h = u[static_cast<std::size_t>(i)] < u[static_cast<std::size_t>(j)] ? i : j;
      auto [it, fresh] = min_class.emplace(h, next);
      if (fresh) ++next;
      s.class_of[{i + 1, j + 1}] = it->second;
    }
  s.num_classes = next;
  s.less.assign(static_cast<std::size_t>(next), std::vector<std::uint8_t>(static_cast<std::size_t>(next), 0));
  auto level = [&](int c) {
    if (c < n) return u[static_cast<std::size_t>(c)];
    for (const auto& [h, cc] : min_class)
      if (cc == c) return u[static_cast<std::size_t>(h)];
    return 0.0;
  };
  for (int a = 0; a < next; ++a)
    for (int b = 0; b < next; ++b) {
      if (a == b) continue;
      if (a < n) continue;  // leaf classes are order-maximal
      if (b < n)
        s.less[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = level(a) <= level(b);
      else
        s.less[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = level(a) < level(b);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      s.w[{i + 1, j + 1}] = u[static_cast<std::size_t>(i)] < u[static_cast<std::size_t>(j)]
                                ? eps[static_cast<std::size_t>(i)]
                                : flip(eps[static_cast<std::size_t>(j)]);
    }
  return left_right_extend(s);
}

}  // namespace patricia
