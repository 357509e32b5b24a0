#pragma once

#include <string>

#include <json.hpp>

#include "patricia/errors.hpp"
#include "patricia/labeled_tree.hpp"
#include "patricia/tree.hpp"
#include "patricia/word.hpp"

namespace patricia {

// ordered_json keeps object keys in insertion order, which keeps every
// serialization byte-stable for a given input.
using Json = nlohmann::ordered_json;

// {"vertices": ["", "0", "1", ...]} — shortlex order, root spelled "".
inline Json tree_to_json(const BinaryTree& t) {
  Json j;
  j["vertices"] = Json::array();
  for (const Word& w : t.vertices()) j["vertices"].push_back(w.bits());
  return j;
}

inline Json labeled_tree_to_json(const LabeledTree& t) {
  Json j = tree_to_json(t.shape());
  Json labels = Json::object();
  for (const auto& [y, l] : t.labels()) labels[y.bits()] = l;
  j["labels"] = labels;
  return j;
}

inline BinaryTree tree_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
    throw BadFormat("expected an object with a \"vertices\" array");
  std::vector<Word> verts;
  for (const auto& e : j["vertices"]) {
    if (!e.is_string()) throw BadFormat("vertex entries must be strings");
    verts.push_back(Word(e.get<std::string>()));
  }
  return BinaryTree(std::move(verts));
}

inline FullBinaryTree full_tree_from_json(const Json& j) {
  return FullBinaryTree(tree_from_json(j));
}

inline LabeledTree labeled_tree_from_json(const Json& j) {
  FullBinaryTree shape = full_tree_from_json(j);
  if (!j.contains("labels") || !j["labels"].is_object())
    throw BadFormat("expected a \"labels\" object");
  std::map<Word, int> labels;
  for (const auto& [k, v] : j["labels"].items()) {
    if (!v.is_number_integer()) throw BadFormat("labels must be integers");
    labels[Word(k)] = v.get<int>();
  }
  return LabeledTree(std::move(shape), std::move(labels));
}

// ---- newick ----

namespace detail {
inline void newick_rec(const FullBinaryTree& t, const Word& v,
                       const std::map<Word, int>* labels, std::string& out) {
  if (t.is_leaf(v)) {
    if (labels)
      out += std::to_string(labels->at(v));
    else
      out += '*';
    return;
  }
  out += '(';
  newick_rec(t, v.child(0), labels, out);
  out += ',';
  newick_rec(t, v.child(1), labels, out);
  out += ')';
}
}  // namespace detail

// Leaves print as "*", internal vertices as (left,right).
inline std::string to_newick(const FullBinaryTree& t) {
  std::string out;
  detail::newick_rec(t, Word(), nullptr, out);
  out += ';';
  return out;
}

// Leaves print their labels.
inline std::string to_newick(const LabeledTree& t) {
  std::string out;
  detail::newick_rec(t.shape(), Word(), &t.labels(), out);
  out += ';';
  return out;
}

// ---- graphviz ----

// Vertices in shortlex order; for every internal vertex the edge to the left
// child is emitted before the edge to the right child.
inline std::string to_dot(const BinaryTree& t, const std::string& name = "tree") {
  std::string out = "digraph " + name + " {\n";
  for (const Word& w : t.vertices())
    out += "  n" + w.bits() + " [label=\"" + w.display() + "\"];\n";
  for (const Word& w : t.vertices())
    for (int b : {0, 1})
      if (t.contains(w.child(b)))
        out += "  n" + w.bits() + " -> n" + w.child(b).bits() + ";\n";
  out += "}\n";
  return out;
}

}  // namespace patricia
