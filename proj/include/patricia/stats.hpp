#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "patricia/bridges.hpp"
#include "patricia/errors.hpp"
#include "patricia/kernels.hpp"
#include "patricia/measure.hpp"
#include "patricia/rational.hpp"
#include "patricia/rng.hpp"
#include "patricia/serialize.hpp"
#include "patricia/tree.hpp"

namespace patricia {

// Runs f(0), ..., f(count-1), spread over `jobs` threads.  f(i) must write
// only to its own slot of any shared output so the result is identical for
// every jobs value.
template <class F>
void for_each_index(long count, int jobs, F&& f) {
  if (jobs <= 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// ---- goodness of fit ----

struct GofResult {
  double tv = 0;        // total variation distance, empirical vs expected
  double chi2 = 0;
  int df = 0;
  double p_value = 1;
  long total = 0;
};

// Compares empirical counts with an exact distribution over the key union.
template <class K>
GofResult goodness_of_fit(const std::map<K, long>& counts, long total,
                          const std::map<K, Rational>& exact) {
  GofResult r;
  r.total = total;
  if (total <= 0) throw EmptyInput("no observations");
  std::map<K, std::pair<long, Rational>> cells;
  for (const auto& [k, c] : counts) cells[k].first = c;
  for (const auto& [k, q] : exact) cells[k].second = q;
  bool impossible = false;
  for (const auto& [k, cell] : cells) {
    const double emp = static_cast<double>(cell.first) / static_cast<double>(total);
    const double q = to_double(cell.second);
    r.tv += std::abs(emp - q);
    if (cell.second == 0) {
      if (cell.first > 0) impossible = true;
      continue;
    }
    const double e = q * static_cast<double>(total);
    const double d = static_cast<double>(cell.first) - e;
    r.chi2 += d * d / e;
    ++r.df;
  }
  r.tv /= 2;
  r.df -= 1;
  if (impossible) {
    r.chi2 = std::numeric_limits<double>::infinity();
    r.p_value = 0;
    return r;
  }
  if (r.df >= 1) {
    boost::math::chi_squared dist(r.df);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi2));
  }
  return r;
}

// TV distance between two empirical distributions.
template <class K>
double empirical_tv(const std::map<K, long>& a, long ta, const std::map<K, long>& b, long tb) {
  if (ta <= 0 || tb <= 0) throw EmptyInput("no observations");
  std::map<K, std::pair<long, long>> cells;
  for (const auto& [k, c] : a) cells[k].first = c;
  for (const auto& [k, c] : b) cells[k].second = c;
  double tv = 0;
  for (const auto& [k, ab] : cells)
    tv += std::abs(static_cast<double>(ab.first) / static_cast<double>(ta) -
                   static_cast<double>(ab.second) / static_cast<double>(tb));
  return tv / 2;
}

// ---- exact backward kernel ----

struct KernelTable {
  FullBinaryTree endpoint;
  std::vector<std::pair<FullBinaryTree, Rational>> masses;  // ascending tree order

  Rational mass_of(const FullBinaryTree& s) const {
    for (const auto& [tree, q] : masses)
      if (tree == s) return q;
    return Rational(0);
  }

  std::map<FullBinaryTree, Rational> as_map() const {
    std::map<FullBinaryTree, Rational> out;
    for (const auto& [tree, q] : masses) out[tree] = q;
    return out;
  }
};

// Distribution of one backward step from t: leaves are deleted uniformly and
// distinct leaves may produce the same predecessor, so each predecessor's
// mass is (number of leaves mapping to it) / (number of leaves).
inline KernelTable exact_backward_kernel(const FullBinaryTree& t) {
  if (t.size() == 1) throw NotALeaf("the trivial tree has no predecessor");
  const auto ls = t.leaves();
  std::map<FullBinaryTree, long> cnt;
  for (const Word& v : ls) ++cnt[kappa_bar(t, v)];
  KernelTable out{t, {}};
  for (const auto& [s, c] : cnt)
    out.masses.push_back({s, Rational(c, static_cast<long>(ls.size()))});
  return out;
}

// Streams distributed as the source conditioned on the radix tree being t:
// one stream per leaf cylinder, leaves in shortlex order.
inline std::vector<WordStream> conditional_resample(const BinaryTree& t, const SourceMeasure& nu,
                                                    std::uint64_t seed) {
  require_radix_shaped(t);
  std::vector<WordStream> out;
  std::uint64_t i = 0;
  for (const Word& y : t.leaves()) out.push_back(nu.condition(y).stream(mix_seed(seed, i++)));
  return out;
}

// ---- experiment reports ----

struct ExperimentReport {
  std::string name;
  Json params = Json::object();
  std::uint64_t seed = 0;
  long trials = 0;
  Json stats = Json::object();
  bool pass = true;

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["params"] = params;
    j["seed"] = seed;
    j["trials"] = trials;
    j["stats"] = stats;
    j["pass"] = pass;
    return j;
  }

  // Flat key,value rows; nested stats keys join with '.'.
  std::string to_csv() const {
    std::string out = "key,value\n";
    out += "name," + name + "\n";
    out += "seed," + std::to_string(seed) + "\n";
    out += "trials," + std::to_string(trials) + "\n";
    auto emit = [&out](const std::string& prefix, const Json& v, auto&& self) -> void {
      if (v.is_object()) {
        for (const auto& [k, sub] : v.items()) self(prefix + "." + k, sub, self);
      } else if (v.is_array()) {
        int i = 0;
        for (const auto& sub : v) self(prefix + "." + std::to_string(i++), sub, self);
      } else {
        out += prefix + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
      }
    };
    emit("param", params, emit);
    emit("stat", stats, emit);
    out += std::string("pass,") + (pass ? "true" : "false") + "\n";
    return out;
  }
};

// Chi-square and TV test of uniformity over all full trees with n leaves.
inline ExperimentReport uniformity_test(const std::vector<FullBinaryTree>& samples, int n) {
  const auto all = enumerate_full_trees(n);
  std::map<FullBinaryTree, Rational> exact;
  for (const auto& t : all) exact[t] = Rational(1, static_cast<long>(all.size()));
  std::map<FullBinaryTree, long> counts;
  for (const auto& s : samples) {
    if (s.leaf_count() != static_cast<std::size_t>(n))
      throw WrongLeafCount("sample has " + std::to_string(s.leaf_count()) + " leaves, expected " +
                           std::to_string(n));
    ++counts[s];
  }
  const GofResult g = goodness_of_fit(counts, static_cast<long>(samples.size()), exact);
  ExperimentReport r;
  r.name = "uniformity";
  r.params["n"] = n;
  r.trials = static_cast<long>(samples.size());
  r.stats["tv"] = g.tv;
  r.stats["chi2"] = g.chi2;
  r.stats["df"] = g.df;
  r.stats["p_value"] = g.p_value;
  r.pass = g.p_value > 0.001;
  return r;
}

// ---- the conditioning gap demonstration ----

// Two three-input starting trees whose contractions coincide, and a common
// four-leaf target: the probability of reaching the target differs between
// the two starts, so the contracted chain is not Markov.
inline BinaryTree dynkin_start_a() {
  return span_tree({Word("00"), Word("01"), Word("1")});
}
inline BinaryTree dynkin_start_b() {
  return span_tree({Word("000"), Word("001"), Word("1")});
}
inline FullBinaryTree dynkin_target() {
  return FullBinaryTree(span_tree({Word("000"), Word("001"), Word("01"), Word("1")}));
}

struct DynkinResult {
  double freq_a = 0;        // estimate started from dynkin_start_a
  double freq_b = 0;        // estimate started from dynkin_start_b
  double target_a = 0.25;   // exact values
  double target_b = 0.375;
  long trials = 0;
};

// Monte Carlo estimates of P(next contracted tree = target | radix tree now),
// for the two starts, under the fair-coin source.
inline DynkinResult dynkin_gap(long trials, std::uint64_t seed, int jobs = 1) {
  if (trials <= 0) throw EmptyInput("need at least one trial");
  const SourceMeasure fair = SourceMeasure::fair();
  const std::vector<Word> target_leaves = dynkin_target().leaves();

  // conditional stream measures for both starts, fixed up front
  std::vector<SourceMeasure> cond_a, cond_b;
  for (const Word& y : dynkin_start_a().leaves()) cond_a.push_back(fair.condition(y));
  for (const Word& y : dynkin_start_b().leaves()) cond_b.push_back(fair.condition(y));

  std::vector<std::uint8_t> hit_a(static_cast<std::size_t>(trials)),
      hit_b(static_cast<std::size_t>(trials));
  for_each_index(trials, jobs, [&](long i) {
    const std::uint64_t base = mix_seed(seed, static_cast<std::uint64_t>(i));
    auto run_leg = [&](const std::vector<SourceMeasure>& cond, std::uint64_t salt) {
      static thread_local RadixChain chain(SourceMeasure::fair(), 0);
      chain.reset(0);
      for (std::size_t k = 0; k < cond.size(); ++k)
        chain.grow_with(cond[k].stream(mix_seed(base, salt + k)));
      chain.grow_with(fair.stream(mix_seed(base, salt + cond.size())));
      std::vector<Word> got;
      for (int s = 0; s < chain.n(); ++s) got.push_back(chain.patricia_leaf_word(s));
      std::sort(got.begin(), got.end());
      return got == target_leaves;
    };
    hit_a[static_cast<std::size_t>(i)] = run_leg(cond_a, 0) ? 1 : 0;
    hit_b[static_cast<std::size_t>(i)] = run_leg(cond_b, 16) ? 1 : 0;
  });
  long na = 0, nb = 0;
  for (long i = 0; i < trials; ++i) {
    na += hit_a[static_cast<std::size_t>(i)];
    nb += hit_b[static_cast<std::size_t>(i)];
  }
  DynkinResult r;
  r.freq_a = static_cast<double>(na) / static_cast<double>(trials);
  r.freq_b = static_cast<double>(nb) / static_cast<double>(trials);
  r.trials = trials;
  return r;
}

// ---- fast growth simulation for heights ----

// Pointer-free growth chain for large sizes: grafting at vertex v is done in
// place (v becomes the new branch; its old content moves to a fresh node), so
// a step is O(1) and no parent links are needed.
class RemySim {
 public:
  explicit RemySim(std::uint64_t seed) : rng_(seed) {
    c0_.push_back(-1);
    c1_.push_back(-1);
  }

  long leaves() const { return (static_cast<long>(c0_.size()) + 1) / 2; }

  void step() {
    const std::size_t v = static_cast<std::size_t>(rng_.below(c0_.size()));
    const int c = rng_.bit();
    const int moved = static_cast<int>(c0_.size());
    c0_.push_back(c0_[v]);
    c1_.push_back(c1_[v]);
    const int fresh = static_cast<int>(c0_.size());
    c0_.push_back(-1);
    c1_.push_back(-1);
    c0_[v] = c == 0 ? moved : fresh;
    c1_[v] = c == 0 ? fresh : moved;
  }

  void grow_to(long n_leaves) {
    while (leaves() < n_leaves) step();
  }

  long height() const {
    // depth-first over the child arrays
    long best = 0;
    std::vector<std::pair<int, long>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [v, d] = stack.back();
      stack.pop_back();
      const int l = c0_[static_cast<std::size_t>(v)], r = c1_[static_cast<std::size_t>(v)];
      if (l < 0) {
        best = std::max(best, d);
        continue;
      }
      stack.push_back({l, d + 1});
      stack.push_back({r, d + 1});
    }
    return best;
  }

 private:
  Rng rng_;
  std::vector<int> c0_, c1_;
};

// ---- contracted height without materializing trees ----

// Height of the contraction of the radix tree of the given streams, computed
// by iterative bucketing: chains cost no depth, each two-sided split costs
// one.  No depth cap: separation is pulled as far as the streams need.
inline std::size_t streams_patricia_height(const std::vector<const WordStream*>& zs) {
  if (zs.empty()) throw EmptyInput("no streams");
  std::size_t best = 0;
  struct Task {
    std::vector<const WordStream*> group;
    std::size_t depth;
    std::size_t branches;
  };
  std::vector<Task> work{{zs, 0, 0}};
  while (!work.empty()) {
    Task t = std::move(work.back());
    work.pop_back();
    for (;;) {
      if (t.group.size() == 1) {
        best = std::max(best, t.branches);
        break;
      }
      std::vector<const WordStream*> side[2];
      for (const WordStream* z : t.group) side[z->bit(t.depth)].push_back(z);
      if (side[0].empty() || side[1].empty()) {
        ++t.depth;  // chain vertex: free after contraction
        continue;
      }
      work.push_back({std::move(side[1]), t.depth + 1, t.branches + 1});
      t.group = std::move(side[0]);
      ++t.depth;
      ++t.branches;
    }
  }
  return best;
}

// Position of the first 1 (1-based), or cap+1 if none within cap letters.
inline std::size_t first_one_position(const WordStream& z, std::size_t cap) {
  for (std::size_t i = 0; i < cap; ++i)
    if (z.bit(i) == 1) return i + 1;
  return cap + 1;
}

// ---- the favorable event for the harmonic source ----

// Threshold t(n) = floor(sqrt(2n / ln n) - 1).
inline int neininger_threshold(long n) {
  if (n < 2) throw EmptyInput("threshold needs n >= 2");
  return static_cast<int>(std::floor(
      std::sqrt(2.0 * static_cast<double>(n) / std::log(static_cast<double>(n))) - 1.0));
}

struct NeiningerResult {
  long n = 0;
  int t = 0;
  long trials = 0;
  double freq = 0;          // empirical P(every first-1 position <= t is hit)
  double union_bound = 0;   // exact lower bound 1 - sum (1 - 1/(l(l+1)))^n
  double floor_bound = 0;   // the cruder 1 - sqrt(2/ln n)
  bool heights_ok = true;   // contracted height reached t on every event
};

// Frequency of the event that every first-1 position 1..t occurs among n
// harmonic streams; when it does, the contracted tree is at least t deep
// (checked by building the height).
inline NeiningerResult neininger_event(long n, int t, long trials, std::uint64_t seed,
                                       int jobs = 1) {
  if (n < 2 || t < 1 || trials < 1) throw EmptyInput("bad event parameters");
  NeiningerResult r;
  r.n = n;
  r.t = t;
  r.trials = trials;
  const SourceMeasure nu = SourceMeasure::harmonic();
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(trials)),
      ht_ok(static_cast<std::size_t>(trials), 1);
  for_each_index(trials, jobs, [&](long i) {
    const std::uint64_t base = mix_seed(seed, static_cast<std::uint64_t>(i));
    std::vector<WordStream> zs;
    zs.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) zs.push_back(nu.stream(mix_seed(base, static_cast<std::uint64_t>(k))));
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(t) + 2, 0);
    bool deeper = false;
    for (const auto& z : zs) {
      const std::size_t l = first_one_position(z, static_cast<std::size_t>(t) + 1);
      if (l <= static_cast<std::size_t>(t))
        seen[l] = 1;
      else
        deeper = true;  // first 1 beyond t (or at t+1)
    }
    bool all = true;
    for (int l = 1; l <= t; ++l) all = all && seen[static_cast<std::size_t>(l)];
    hit[static_cast<std::size_t>(i)] = all ? 1 : 0;
    if (all) {
      std::vector<const WordStream*> ptrs;
      for (const auto& z : zs) ptrs.push_back(&z);
      const std::size_t ht = streams_patricia_height(ptrs);
      // every position 1..t hit gives branches along the all-0 spine; with
      // any deeper input the height must reach t, else t-1
      const std::size_t need = deeper ? static_cast<std::size_t>(t) : static_cast<std::size_t>(t) - 1;
      if (ht < need) ht_ok[static_cast<std::size_t>(i)] = 0;
    }
  });
  long good = 0;
  for (long i = 0; i < trials; ++i) {
    good += hit[static_cast<std::size_t>(i)];
    r.heights_ok = r.heights_ok && ht_ok[static_cast<std::size_t>(i)] != 0;
  }
  r.freq = static_cast<double>(good) / static_cast<double>(trials);
  double miss = 0;
  for (int l = 1; l <= t; ++l) {
    const double p = 1.0 / (static_cast<double>(l) * (l + 1));
    miss += std::pow(1.0 - p, static_cast<double>(n));
  }
  r.union_bound = 1.0 - miss;
  r.floor_bound = 1.0 - std::sqrt(2.0 / std::log(static_cast<double>(n)));
  return r;
}

// ---- height experiments ----

// Mean heights with the appropriate normalization per chain family:
// "patricia" reports (ht - log2 n)/sqrt(2 log2 n) of the contracted tree,
// "remy" reports ht/sqrt(n), "zigzag-bridge" reports ht/n (exactly (n-1)/n).
// Under the harmonic source the patricia rows also track the favorable-event
// frequency at t(n).
inline ExperimentReport height_experiment(const std::string& chain, const SourceMeasure& nu,
                                          std::vector<long> n_list, long trials,
                                          std::uint64_t seed, int jobs = 1) {
  if (n_list.empty() || trials < 1) throw EmptyInput("nothing to measure");
  std::sort(n_list.begin(), n_list.end());
  const std::size_t nn = n_list.size();
  ExperimentReport rep;
  rep.name = "heights-" + chain;
  rep.seed = seed;
  rep.trials = trials;
  rep.params["chain"] = chain;
  rep.params["n_list"] = n_list;
  if (chain == "patricia") rep.params["measure"] = nu.format();

  std::vector<std::vector<long>> ht(static_cast<std::size_t>(trials),
                                    std::vector<long>(nn, 0));
  const bool harmonic_event =
      chain == "patricia" && nu.kind() == SourceMeasure::Kind::harmonic;
  std::vector<std::vector<std::uint8_t>> event(
      harmonic_event ? static_cast<std::size_t>(trials) : 0, std::vector<std::uint8_t>(nn, 0));

  if (chain == "patricia") {
    for_each_index(trials, jobs, [&](long i) {
      const std::uint64_t base = mix_seed(seed, static_cast<std::uint64_t>(i));
      std::vector<WordStream> zs;
      zs.reserve(static_cast<std::size_t>(n_list.back()));
      std::vector<const WordStream*> ptrs;
      for (std::size_t c = 0, k = 0; c < nn; ++c) {
        for (; k < static_cast<std::size_t>(n_list[c]); ++k)
          zs.push_back(nu.stream(mix_seed(base, k)));
        ptrs.clear();
        for (const auto& z : zs) ptrs.push_back(&z);
        ht[static_cast<std::size_t>(i)][c] = static_cast<long>(streams_patricia_height(ptrs));
        if (harmonic_event) {
          const int t = neininger_threshold(n_list[c]);
          std::vector<std::uint8_t> seen(static_cast<std::size_t>(t) + 1, 0);
          for (const auto& z : zs) {
            const std::size_t l = first_one_position(z, static_cast<std::size_t>(t));
            if (l <= static_cast<std::size_t>(t)) seen[l] = 1;
          }
          bool all = true;
          for (int l = 1; l <= t; ++l) all = all && seen[static_cast<std::size_t>(l)];
          event[static_cast<std::size_t>(i)][c] = all ? 1 : 0;
        }
      }
    });
  } else if (chain == "remy") {
    for_each_index(trials, jobs, [&](long i) {
      RemySim sim(mix_seed(seed, static_cast<std::uint64_t>(i)));
      for (std::size_t c = 0; c < nn; ++c) {
        sim.grow_to(n_list[c]);
        ht[static_cast<std::size_t>(i)][c] = sim.height();
      }
    });
  } else if (chain == "zigzag-bridge") {
    for_each_index(trials, jobs, [&](long i) {
      ZigzagBridge b(static_cast<int>(n_list.back()), mix_seed(seed, static_cast<std::uint64_t>(i)));
      for (std::size_t c = 0; c < nn; ++c)
        ht[static_cast<std::size_t>(i)][c] =
            static_cast<long>(b.tree(static_cast<int>(n_list[c])).height());
    });
  } else {
    throw BadFormat("unknown chain \"" + chain + "\" (patricia|remy|zigzag-bridge)");
  }

  Json rows = Json::array();
  for (std::size_t c = 0; c < nn; ++c) {
    double mean = 0, sq = 0;
    for (long i = 0; i < trials; ++i) {
      const double h = static_cast<double>(ht[static_cast<std::size_t>(i)][c]);
      mean += h;
      sq += h * h;
    }
    mean /= static_cast<double>(trials);
    const double var = sq / static_cast<double>(trials) - mean * mean;
    Json row;
    row["n"] = n_list[c];
    row["mean_ht"] = mean;
    row["sd_ht"] = std::sqrt(std::max(0.0, var));
    if (chain == "patricia") {
      const double lg = std::log2(static_cast<double>(n_list[c]));
      row["normalized"] = (mean - lg) / std::sqrt(2 * lg);
      if (harmonic_event) {
        long cnt = 0;
        for (long i = 0; i < trials; ++i) cnt += event[static_cast<std::size_t>(i)][c];
        row["t"] = neininger_threshold(n_list[c]);
        row["event_freq"] = static_cast<double>(cnt) / static_cast<double>(trials);
      }
    } else if (chain == "remy") {
      row["ht_over_sqrt_n"] = mean / std::sqrt(static_cast<double>(n_list[c]));
    } else {
      row["ht_over_n"] = mean / static_cast<double>(n_list[c]);
      bool exact = true;
      for (long i = 0; i < trials; ++i)
        exact = exact && ht[static_cast<std::size_t>(i)][c] == n_list[c] - 1;
      row["exact_n_minus_1"] = exact;
    }
    rows.push_back(row);
  }
  rep.stats["rows"] = rows;
  return rep;
}

// ---- persistence ----

// Vertices present in every tree of the trajectory from step m (1-based) on.
// The intersection of prefix-closed sets is a tree again.
template <class Tree>
BinaryTree persistence_set(const std::vector<Tree>& traj, std::size_t m) {
  if (m < 1 || m > traj.size()) throw EmptyInput("window start out of range");
  std::vector<Word> acc = traj[m - 1].vertices();
  for (std::size_t k = m; k < traj.size(); ++k) {
    const auto& v = traj[k].vertices();
    std::vector<Word> next;
    std::set_intersection(acc.begin(), acc.end(), v.begin(), v.end(), std::back_inserter(next));
    acc.swap(next);
  }
  return BinaryTree(std::move(acc));
}

// ---- exact contracted marginal under the fair source ----

// Law of the contracted radix tree of n fair streams: the root split puts k
// streams left with probability binom(n,k)/(2^n - 2), and the sides are
// independent copies.
inline std::map<FullBinaryTree, Rational> patricia_fair_exact_marginal(int n) {
  if (n < 1) throw EmptyInput("marginal needs n >= 1");
  if (n > 12) throw TooLarge("marginal capped at n = 12");
  static std::map<int, std::map<FullBinaryTree, Rational>> memo;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::map<FullBinaryTree, Rational> out;
  if (n == 1) {
    out[FullBinaryTree::trivial()] = 1;
  } else {
    BigInt denom = (BigInt(1) << n) - 2;
    // binomials binom(n, k)
    std::vector<BigInt> binom(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k <= n; ++k)
      binom[static_cast<std::size_t>(k)] =
          binom[static_cast<std::size_t>(k - 1)] * (n - k + 1) / k;
    for (int k = 1; k < n; ++k) {
      const Rational split(binom[static_cast<std::size_t>(k)], denom);
      for (const auto& [lt, lp] : patricia_fair_exact_marginal(k))
        for (const auto& [rt, rp] : patricia_fair_exact_marginal(n - k))
          out[join_trees(lt, rt)] += split * lp * rp;
    }
  }
  memo[n] = out;
  return memo[n];
}

}  // namespace patricia
