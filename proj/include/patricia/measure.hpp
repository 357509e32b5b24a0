#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "patricia/errors.hpp"
#include "patricia/rational.hpp"
#include "patricia/rng.hpp"
#include "patricia/word.hpp"

namespace patricia {

// Default bound on how deep any operation will look into an infinite word
// before giving up with DepthCapExceeded.
inline constexpr std::size_t kDefaultDepthCap = 4096;

class WordStream;

// A diffuse probability measure on {0,1}^infinity, from the family the
// simulators support:
//
//   fair                 independent fair bits
//   bernoulli:<p>        independent bits, P(1) = p, p in (0,1)
//   harmonic             independent bits, P(position j = 1) = 1/(j+1), 1-based
//   harmonic+<k>         harmonic shifted k positions (arises from condition())
//   prefix:<w>,<inner>   forced prefix w, then <inner> for the tail
//
// parse/format round-trip; condition(y) gives the law conditioned on the
// cylinder of y (again a member of the family).
class SourceMeasure {
 public:
  enum class Kind { fair, bernoulli, harmonic, prefixed };

  static SourceMeasure fair() { return SourceMeasure(Kind::fair); }

  static SourceMeasure bernoulli(const Rational& p) {
    if (!(p > 0 && p < 1))
      throw BadMeasureSpec("bernoulli parameter must lie strictly between 0 and 1, got " +
                           patricia::to_string(p));
    SourceMeasure m(Kind::bernoulli);
    m.p_ = p;
    return m;
  }

  static SourceMeasure harmonic(std::size_t offset = 0) {
    SourceMeasure m(Kind::harmonic);
    m.offset_ = offset;
    return m;
  }

  static SourceMeasure prefixed(const Word& prefix, SourceMeasure inner) {
    if (prefix.empty()) return inner;
    if (inner.kind_ == Kind::prefixed) {
      // flatten nested prefixes
      return prefixed(prefix + inner.prefix_, *inner.inner_);
    }
    SourceMeasure m(Kind::prefixed);
    m.prefix_ = prefix;
    m.inner_ = std::make_shared<SourceMeasure>(std::move(inner));
    return m;
  }

  static SourceMeasure parse(const std::string& spec);
  std::string format() const;

  Kind kind() const { return kind_; }
  const Rational& bernoulli_p() const { return p_; }
  std::size_t harmonic_offset() const { return offset_; }
  const Word& prefix() const { return prefix_; }
  const SourceMeasure& inner() const { return *inner_; }

  // P(bit at 0-based position i equals 1).  For prefixed measures this is 0
  // or 1 on the forced positions.
  Rational one_prob(std::size_t i) const {
    switch (kind_) {
      case Kind::fair:
        return Rational(1, 2);
      case Kind::bernoulli:
        return p_;
      case Kind::harmonic:
        return Rational(1, BigInt(i) + BigInt(offset_) + 2);
      case Kind::prefixed:
        if (i < prefix_.size()) return Rational(prefix_.bit(i));
        return inner_->one_prob(i - prefix_.size());
    }
    return Rational(0);  // unreachable
  }

  // Mass of the cylinder of y: the probability that the stream starts with y.
  Rational cylinder_prob(const Word& y) const {
    Rational q(1);
    for (std::size_t i = 0; i < y.size(); ++i) {
      Rational p1 = one_prob(i);
      q *= y.bit(i) == 1 ? p1 : 1 - p1;
    }
    return q;
  }

  // Law of the whole stream conditioned on starting with y.  Throws
  // ZeroMassLeaf when the cylinder of y has measure zero.
  SourceMeasure condition(const Word& y) const {
    switch (kind_) {
      case Kind::fair:
      case Kind::bernoulli:
        return prefixed(y, *this);
      case Kind::harmonic:
        return prefixed(y, harmonic(offset_ + y.size()));
      case Kind::prefixed: {
        switch (prefix_rel(y, prefix_)) {
          case PrefixRel::equal:
          case PrefixRel::lt:
            return *this;  // cylinder of y has full mass
          case PrefixRel::gt:
            return prefixed(prefix_, inner_->condition(y.suffix_from(prefix_.size())));
          case PrefixRel::incomparable:
            throw ZeroMassLeaf("cylinder of " + y.display() +
                               " has zero mass under " + format());
        }
      }
    }
    throw ZeroMassLeaf("unreachable");
  }

  WordStream stream(std::uint64_t seed) const;

  bool operator==(const SourceMeasure& rhs) const {
    if (kind_ != rhs.kind_) return false;
    switch (kind_) {
      case Kind::fair:
        return true;
      case Kind::bernoulli:
        return p_ == rhs.p_;
      case Kind::harmonic:
        return offset_ == rhs.offset_;
      case Kind::prefixed:
        return prefix_ == rhs.prefix_ && *inner_ == *rhs.inner_;
    }
    return false;
  }

 private:
  explicit SourceMeasure(Kind k) : kind_(k) {}

  Kind kind_;
  Rational p_;               // bernoulli
  std::size_t offset_ = 0;   // harmonic
  Word prefix_;              // prefixed
  std::shared_ptr<const SourceMeasure> inner_;  // prefixed
};

namespace detail {

// Digit-wise decimal parse; avoids BigInt's string constructor, which reads
// leading zeros as octal.
inline BigInt parse_digits(const std::string& s) {
  if (s.empty()) throw BadMeasureSpec("empty number");
  BigInt v(0);
  for (char c : s) {
    if (c < '0' || c > '9') throw BadMeasureSpec("bad digit in \"" + s + "\"");
    v = v * 10 + (c - '0');
  }
  return v;
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num = parse_digits(s.substr(0, slash));
    BigInt den = parse_digits(s.substr(slash + 1));
    if (den == 0) throw BadMeasureSpec("zero denominator in \"" + s + "\"");
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    BigInt num = parse_digits(s.substr(0, dot) + s.substr(dot + 1));
    BigInt den(1);
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(num, den);
  }
  return Rational(parse_digits(s));
}

}  // namespace detail

inline SourceMeasure SourceMeasure::parse(const std::string& spec) {
  if (spec == "fair") return fair();
  if (spec == "harmonic") return harmonic();
  if (spec.rfind("harmonic+", 0) == 0) {
    const std::string k = spec.substr(9);
    if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos)
      throw BadMeasureSpec("bad harmonic offset in \"" + spec + "\"");
    return harmonic(std::stoull(k));
  }
  if (spec.rfind("bernoulli:", 0) == 0)
    return bernoulli(detail::parse_rational(spec.substr(10)));
  if (spec.rfind("prefix:", 0) == 0) {
    const std::string rest = spec.substr(7);
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw BadMeasureSpec("prefix form needs \"prefix:<bits>,<inner>\", got \"" + spec + "\"");
    Word w;
    try {
      w = Word::parse(rest.substr(0, comma));
    } catch (const BadFormat& e) {
      throw BadMeasureSpec(e.what());
    }
    return prefixed(w, parse(rest.substr(comma + 1)));
  }
  throw BadMeasureSpec("unknown measure \"" + spec + "\"");
}

inline std::string SourceMeasure::format() const {
  switch (kind_) {
    case Kind::fair:
      return "fair";
    case Kind::bernoulli:
      return "bernoulli:" + patricia::to_string(p_);
    case Kind::harmonic:
      return offset_ == 0 ? "harmonic" : "harmonic+" + std::to_string(offset_);
    case Kind::prefixed:
      return "prefix:" + prefix_.display() + "," + inner_->format();
  }
  return "";
}

// A lazily generated element of {0,1}^infinity drawn from a SourceMeasure.
// Generated bits are cached; two streams with the same (measure, seed) yield
// identical bits, independently of access order.
class WordStream {
 public:
  WordStream(const SourceMeasure& m, std::uint64_t seed)
      : measure_(m), seed_(seed), gen_(seed) {
    // Flatten to (forced prefix, product tail) so bit generation is a tight
    // loop.  The tail is one of fair / bernoulli / harmonic.
    const SourceMeasure* tail = &measure_;
    while (tail->kind() == SourceMeasure::Kind::prefixed) {
      forced_ = forced_ + tail->prefix();
      tail = &tail->inner();
    }
    tail_kind_ = tail->kind();
    if (tail_kind_ == SourceMeasure::Kind::bernoulli) {
      // floor(p * 2^64)
      BigInt t = (numerator(tail->bernoulli_p()) << 64) / denominator(tail->bernoulli_p());
      threshold_ = t.convert_to<std::uint64_t>();
    } else if (tail_kind_ == SourceMeasure::Kind::harmonic) {
      offset_ = tail->harmonic_offset();
    }
  }

  const SourceMeasure& measure() const { return measure_; }
  std::uint64_t seed() const { return seed_; }

  int bit(std::size_t i) const {
    if (i < forced_.size()) return forced_.bit(i);
    const std::size_t k = i - forced_.size();
    while (cache_.size() <= k) cache_.push_back(draw(cache_.size()));
    return cache_[k];
  }

  Word prefix(std::size_t n) const {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<char>('0' + bit(i));
    return Word(s);
  }

  // How deep this stream has been examined.
  std::size_t bits_pulled() const { return forced_.size() + cache_.size(); }

  // A fresh stream that will reproduce the same bits from scratch.
  WordStream clone() const { return WordStream(measure_, seed_); }

 private:
  int draw(std::size_t k) const {
    switch (tail_kind_) {
      case SourceMeasure::Kind::fair:
        return gen_.bit();
      case SourceMeasure::Kind::bernoulli:
        return gen_.chance(threshold_) ? 1 : 0;
      case SourceMeasure::Kind::harmonic: {
        // P(1) = 1/(k + offset + 2); threshold = floor(2^64 / d)
        const unsigned __int128 one = 1;
        const std::uint64_t d = static_cast<std::uint64_t>(k + offset_ + 2);
        const std::uint64_t th = static_cast<std::uint64_t>((one << 64) / d);
        return gen_.chance(th) ? 1 : 0;
      }
      case SourceMeasure::Kind::prefixed:
        break;  // flattened away in the constructor
    }
    return 0;
  }

  SourceMeasure measure_;
  std::uint64_t seed_;
  Word forced_;
  SourceMeasure::Kind tail_kind_;
  std::uint64_t threshold_ = 0;  // bernoulli
  std::size_t offset_ = 0;       // harmonic
  mutable SplitMix gen_;
  mutable std::basic_string<signed char> cache_;
};

inline WordStream SourceMeasure::stream(std::uint64_t seed) const {
  return WordStream(*this, seed);
}

// Longest common prefix of two streams.  Throws DepthCapExceeded if they
// agree through depth_cap letters.
inline Word stream_meet(const WordStream& a, const WordStream& b,
                        std::size_t depth_cap = kDefaultDepthCap) {
  for (std::size_t i = 0; i < depth_cap; ++i)
    if (a.bit(i) != b.bit(i)) return a.prefix(i);
  throw DepthCapExceeded("streams agree through depth " + std::to_string(depth_cap));
}

}  // namespace patricia
