#pragma once

#include <map>
#include <string>
#include <vector>

#include "patricia/errors.hpp"
#include "patricia/tree.hpp"
#include "patricia/word.hpp"

namespace patricia {

// A full binary tree whose leaves carry distinct integer labels.
class LabeledTree {
 public:
  LabeledTree(FullBinaryTree shape, std::map<Word, int> labels)
      : shape_(std::move(shape)), label_(std::move(labels)) {
    const auto ls = shape_.leaves();
    if (label_.size() != ls.size())
      throw BadLabelSet("tree has " + std::to_string(ls.size()) + " leaves but " +
                        std::to_string(label_.size()) + " labels");
    for (const Word& y : ls)
      if (!label_.count(y))
        throw BadLabelSet("leaf " + y.display() + " is unlabeled");
    for (const auto& [y, l] : label_) {
      if (!leaf_.emplace(l, y).second)
        throw BadLabelSet("label " + std::to_string(l) + " used twice");
    }
  }

  static LabeledTree single(int label) {
    return LabeledTree(FullBinaryTree::trivial(), {{Word(), label}});
  }

  const FullBinaryTree& shape() const { return shape_; }
  const std::map<Word, int>& labels() const { return label_; }
  std::size_t leaf_count() const { return label_.size(); }

  int label_at(const Word& leaf) const {
    auto it = label_.find(leaf);
    if (it == label_.end()) throw NotALeaf(leaf.display() + " is not a labeled leaf");
    return it->second;
  }

  bool has_label(int l) const { return leaf_.count(l) != 0; }

  const Word& leaf_with(int l) const {
    auto it = leaf_.find(l);
    if (it == leaf_.end()) throw BadLabelSet("no leaf labeled " + std::to_string(l));
    return it->second;
  }

  std::vector<int> label_set() const {
    std::vector<int> out;
    for (const auto& [l, y] : leaf_) out.push_back(l);
    return out;  // std::map keeps them sorted
  }

  bool operator==(const LabeledTree& rhs) const {
    return shape_ == rhs.shape_ && label_ == rhs.label_;
  }
  bool operator!=(const LabeledTree& rhs) const { return !(*this == rhs); }

 private:
  FullBinaryTree shape_;
  std::map<Word, int> label_;
  std::map<int, Word> leaf_;
};

// {e} u 0L u 1R with the labels carried along.
inline LabeledTree join_labeled(const LabeledTree& left, const LabeledTree& right) {
  std::map<Word, int> labels;
  for (const auto& [y, l] : left.labels()) labels[Word("0") + y] = l;
  for (const auto& [y, l] : right.labels()) labels[Word("1") + y] = l;
  return LabeledTree(join_trees(left.shape(), right.shape()), std::move(labels));
}

// The labeled subtree hanging below vertex v, re-rooted.
inline LabeledTree labeled_subtree_at(const LabeledTree& t, const Word& v) {
  std::map<Word, int> labels;
  for (const auto& [y, l] : t.labels())
    if (is_prefix(v, y)) labels[y.suffix_from(v.size())] = l;
  return LabeledTree(FullBinaryTree(subtree_at(t.shape(), v)), std::move(labels));
}

}  // namespace patricia
