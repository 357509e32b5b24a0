#pragma once

#include <cassert>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "patricia/errors.hpp"

namespace patricia {

// A finite binary word: an element of {0,1}*.  The empty word is the root of
// every tree here.  Words order canonically by shortlex (operator<), so
// std::set<Word> / sorted vectors are automatically in canonical order.
class Word {
 public:
  Word() = default;

  explicit Word(std::string_view bits) : b_(bits) {
    for (char c : b_)
      if (c != '0' && c != '1')
        throw BadFormat("word may contain only '0'/'1', got \"" + b_ + "\"");
  }

  // Accepts "e" as a spelling of the empty word (the CLI convention; JSON
  // uses "" directly).
  static Word parse(std::string_view s) {
    if (s == "e") return Word();
    return Word(s);
  }

  std::size_t size() const { return b_.size(); }
  bool empty() const { return b_.empty(); }

  // i-th letter, 0-based, as 0/1.
  int bit(std::size_t i) const {
    assert(i < b_.size());
    return b_[i] - '0';
  }

  Word prefix(std::size_t len) const {
    assert(len <= b_.size());
    return Word(b_.substr(0, len), raw_tag{});
  }

  Word parent() const {
    assert(!b_.empty());
    return prefix(b_.size() - 1);
  }

  // v1..v_{m-1} v̄_m — the other child of the parent.
  Word sibling() const {
    assert(!b_.empty());
    std::string s = b_;
    s.back() ^= 1;  // '0' <-> '1'
    return Word(std::move(s), raw_tag{});
  }

  Word child(int b) const {
    assert(b == 0 || b == 1);
    return Word(b_ + static_cast<char>('0' + b), raw_tag{});
  }

  // Drops the first k letters.
  Word suffix_from(std::size_t k) const {
    assert(k <= b_.size());
    return Word(b_.substr(k), raw_tag{});
  }

  // Removes the letter at position pos (0-based), splicing the rest together.
  Word splice_out(std::size_t pos) const {
    assert(pos < b_.size());
    std::string s = b_.substr(0, pos) + b_.substr(pos + 1);
    return Word(std::move(s), raw_tag{});
  }

  Word operator+(const Word& rhs) const { return Word(b_ + rhs.b_, raw_tag{}); }

  const std::string& bits() const { return b_; }

  // Human-facing spelling: "e" for the empty word.
  std::string display() const { return b_.empty() ? "e" : b_; }

  bool operator==(const Word& rhs) const { return b_ == rhs.b_; }
  bool operator!=(const Word& rhs) const { return b_ != rhs.b_; }

  // Shortlex: by length, then lexicographically.  This is the canonical
  // vertex order used for serialization and set storage.
  bool operator<(const Word& rhs) const {
    if (b_.size() != rhs.b_.size()) return b_.size() < rhs.b_.size();
    return b_ < rhs.b_;
  }

 private:
  struct raw_tag {};
  Word(std::string bits, raw_tag) : b_(std::move(bits)) {}
  std::string b_;
};

enum class PrefixRel { equal, lt, gt, incomparable };

// Position of u and v in the strict-prefix partial order: lt means u < v
// (u is a strict prefix of v).
inline PrefixRel prefix_rel(const Word& u, const Word& v) {
  const std::string& a = u.bits();
  const std::string& b = v.bits();
  const std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i)
    if (a[i] != b[i]) return PrefixRel::incomparable;
  if (a.size() == b.size()) return PrefixRel::equal;
  return a.size() < b.size() ? PrefixRel::lt : PrefixRel::gt;
}

// u ≤ v in the prefix order.
inline bool is_prefix(const Word& u, const Word& v) {
  PrefixRel r = prefix_rel(u, v);
  return r == PrefixRel::equal || r == PrefixRel::lt;
}

inline bool is_strict_prefix(const Word& u, const Word& v) {
  return prefix_rel(u, v) == PrefixRel::lt;
}

// Longest common prefix (the meet in the prefix order).
inline Word meet(const Word& u, const Word& v) {
  const std::string& a = u.bits();
  const std::string& b = v.bits();
  const std::size_t m = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < m && a[i] == b[i]) ++i;
  return u.prefix(i);
}

// Total order on *incomparable* words: compare the letters just after the
// meet.  Comparable distinct words have no lexicographic rank relative to
// each other here, hence the error.  Returns -1/0/+1.
inline int lex_compare(const Word& u, const Word& v) {
  switch (prefix_rel(u, v)) {
    case PrefixRel::equal:
      return 0;
    case PrefixRel::lt:
    case PrefixRel::gt:
      throw IncomparabilityViolated("lex_compare(" + u.display() + ", " +
                                    v.display() + "): one is a prefix of the other");
    case PrefixRel::incomparable:
      break;
  }
  const std::size_t k = meet(u, v).size();
  return u.bit(k) < v.bit(k) ? -1 : 1;
}

inline bool lex_less(const Word& u, const Word& v) { return lex_compare(u, v) < 0; }

}  // namespace patricia
