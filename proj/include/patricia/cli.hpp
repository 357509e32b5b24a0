#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patricia/bridges.hpp"
#include "patricia/dds.hpp"
#include "patricia/errors.hpp"
#include "patricia/kernels.hpp"
#include "patricia/measure.hpp"
#include "patricia/serialize.hpp"
#include "patricia/stats.hpp"
#include "patricia/tree.hpp"

namespace patricia {

namespace cli_detail {

// Comma-separated leaf words -> their spanned tree ("00,01,1").
inline FullBinaryTree tree_from_leaf_list(const std::string& s) {
  std::vector<Word> leaves;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) leaves.push_back(Word(cur));
  if (leaves.empty()) throw BadFormat("empty leaf list");
  return FullBinaryTree(span_tree(leaves));
}

inline std::vector<long> parse_n_list(const std::string& s) {
  std::vector<long> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) out.push_back(std::stol(cur));
  if (out.empty()) throw BadFormat("empty n list");
  return out;
}

// One-line run header so every output names the config that produced it.
inline std::string config_line(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += " ";
    s += k + "=" + v;
  }
  return s;
}

inline Json step_record(const std::string& chain, std::uint64_t seed, std::size_t n,
                        const BinaryTree& t) {
  Json j;
  j["chain"] = chain;
  j["seed"] = seed;
  j["n"] = n;
  j["vertices"] = tree_to_json(t)["vertices"];
  return j;
}

// Reads a whole stream (used for '-' = stdin inputs).
inline std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json load_json(const std::string& path, std::istream& stdin_stream) {
  std::string text;
  if (path == "-" || path.empty()) {
    text = slurp(stdin_stream);
  } else {
    std::ifstream f(path);
    if (!f) throw BadFormat("cannot open " + path);
    text = slurp(f);
  }
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw BadFormat(std::string("invalid JSON: ") + e.what());
  }
}

struct TreeSeq {
  std::string chain;
  std::uint64_t seed = 0;
  std::vector<BinaryTree> trees;             // plain shapes, one per step
  std::vector<std::map<Word, int>> labels;   // parallel to trees when labeled
};

inline TreeSeq simulate_sequence(const std::string& chain, const SourceMeasure& nu, int steps,
                                 std::uint64_t seed, std::size_t depth_cap) {
  TreeSeq out;
  out.chain = chain;
  out.seed = seed;
  auto push_full = [&out](const std::vector<FullBinaryTree>& ts) {
    for (const auto& t : ts) out.trees.push_back(t);
  };
  if (chain == "patricia") {
    push_full(patricia_chain(nu, steps, seed, depth_cap).patricia);
  } else if (chain == "radix") {
    for (auto& t : patricia_chain(nu, steps, seed, depth_cap).radix) out.trees.push_back(t);
  } else if (chain == "remy") {
    push_full(remy_chain(steps, seed));
  } else if (chain == "zigzag-bridge") {
    push_full(ZigzagBridge(steps, seed).trajectory());
  } else if (chain.rfind("bridge-from:", 0) == 0) {
    push_full(finite_bridge(tree_from_leaf_list(chain.substr(12)), seed));
  } else if (chain.rfind("rtree:", 0) == 0) {
    const std::string model_spec = chain.substr(6);
    std::unique_ptr<RTreeModel> model;
    if (model_spec == "interval") {
      model = std::make_unique<IntervalZigzagModel>();
    } else if (model_spec.rfind("binary:", 0) == 0) {
      model = std::make_unique<BinaryCompletionModel>(SourceMeasure::parse(model_spec.substr(7)),
                                                      depth_cap);
    } else {
      throw BadFormat("unknown rtree model \"" + model_spec + "\" (interval|binary:<measure>)");
    }
    RTreeTrajectory traj = rtree_bridge(*model, steps, seed);
    for (std::size_t k = 0; k < traj.labeled.size(); ++k) {
      out.trees.push_back(traj.shapes[k]);
      out.labels.push_back(traj.labeled[k].labels());
    }
  } else {
    throw BadFormat("unknown chain \"" + chain + "\"");
  }
  return out;
}

inline void emit_sequence(const TreeSeq& seq, const std::string& format,
                          const std::string& header, std::ostream& out) {
  if (format == "jsonl") {
    Json h;
    h["config"] = header;
    out << h.dump() << "\n";
    for (std::size_t k = 0; k < seq.trees.size(); ++k) {
      Json j = step_record(seq.chain, seq.seed, k + 1, seq.trees[k]);
      if (!seq.labels.empty()) {
        Json lab = Json::object();
        for (const auto& [w, l] : seq.labels[k]) lab[w.bits()] = l;
        j["labels"] = lab;
      }
      out << j.dump() << "\n";
    }
  } else if (format == "dot") {
    out << "// " << header << "\n";
    for (std::size_t k = 0; k < seq.trees.size(); ++k)
      out << to_dot(seq.trees[k], "step_" + std::to_string(k + 1)) << "\n";
  } else if (format == "newick") {
    out << "[" << header << "]\n";
    for (std::size_t k = 0; k < seq.trees.size(); ++k) {
      if (!seq.labels.empty())
        out << to_newick(LabeledTree(FullBinaryTree(seq.trees[k]), seq.labels[k])) << "\n";
      else
        out << to_newick(FullBinaryTree(seq.trees[k])) << "\n";
    }
  } else {
    throw BadFormat("unknown format \"" + format + "\" (jsonl|dot|newick)");
  }
}

// ---- verify modes ----

inline int verify_kernel(int n_max, long trials, std::uint64_t seed, int jobs, std::ostream& out) {
  bool all_ok = true;
  std::uint64_t salt = 0;
  for (int n = 2; n <= n_max; ++n) {
    for (const auto& t : enumerate_full_trees(n)) {
      const KernelTable exact = exact_backward_kernel(t);
      std::vector<std::size_t> leaf_pick(static_cast<std::size_t>(trials));
      const auto ls = t.leaves();
      for_each_index(trials, jobs, [&](long i) {
        Rng rng(mix_seed(seed, salt + static_cast<std::uint64_t>(i)));
        leaf_pick[static_cast<std::size_t>(i)] = rng.below(ls.size());
      });
      salt += static_cast<std::uint64_t>(trials);
      std::map<FullBinaryTree, long> counts;
      for (long i = 0; i < trials; ++i)
        ++counts[kappa_bar(t, ls[leaf_pick[static_cast<std::size_t>(i)]])];
      const GofResult g = goodness_of_fit(counts, trials, exact.as_map());
      const bool ok = g.tv < 0.01;
      all_ok = all_ok && ok;
      out << "kernel n=" << n << " endpoint=" << to_newick(t) << " tv=" << g.tv << " "
          << (ok ? "ok" : "FAIL") << "\n";
    }
  }
  return all_ok ? 0 : 1;
}

inline int verify_remy_uniform(int n, long trials, std::uint64_t seed, int jobs,
                               std::ostream& out) {
  std::vector<FullBinaryTree> samples(static_cast<std::size_t>(trials), FullBinaryTree::trivial());
  for_each_index(trials, jobs, [&](long i) {
    samples[static_cast<std::size_t>(i)] =
        remy_chain(n, mix_seed(seed, static_cast<std::uint64_t>(i))).back();
  });
  ExperimentReport rep = uniformity_test(samples, n);
  rep.seed = seed;
  const double tv = rep.stats["tv"].get<double>();
  rep.pass = rep.pass && tv < 0.02;
  out << rep.to_json().dump(2) << "\n";
  return rep.pass ? 0 : 1;
}

inline int verify_dynkin(long trials, std::uint64_t seed, int jobs, std::ostream& out) {
  const DynkinResult r = dynkin_gap(trials, seed, jobs);
  Json j;
  j["name"] = "dynkin";
  j["trials"] = r.trials;
  j["seed"] = seed;
  j["target_a"] = r.target_a;
  j["target_b"] = r.target_b;
  j["freq_a"] = r.freq_a;
  j["freq_b"] = r.freq_b;
  const double gap_tol = std::max(0.005, 4.0 / std::sqrt(static_cast<double>(trials)));
  const bool pass =
      std::abs(r.freq_a - r.target_a) <= gap_tol && std::abs(r.freq_b - r.target_b) <= gap_tol;
  j["pass"] = pass;
  out << j.dump(2) << "\n";
  return pass ? 0 : 1;
}

// Exact marginal of the backward bridge at every level, by pushing the
// endpoint's point mass through the one-step kernels.
inline std::vector<std::map<FullBinaryTree, Rational>> bridge_exact_levels(
    const FullBinaryTree& endpoint) {
  std::vector<std::map<FullBinaryTree, Rational>> levels;
  levels.push_back({{endpoint, Rational(1)}});
  while (levels.back().begin()->first.size() > 1) {
    std::map<FullBinaryTree, Rational> next;
    for (const auto& [t, p] : levels.back())
      for (const auto& [s, q] : exact_backward_kernel(t).masses) next[s] += p * q;
    levels.push_back(std::move(next));
  }
  std::reverse(levels.begin(), levels.end());
  return levels;
}

inline int verify_bridge_kernel(const FullBinaryTree& endpoint, long trials, std::uint64_t seed,
                                int jobs, std::ostream& out) {
  const auto exact = bridge_exact_levels(endpoint);
  const std::size_t nlev = exact.size();
  std::vector<std::vector<FullBinaryTree>> samples(
      static_cast<std::size_t>(trials),
      std::vector<FullBinaryTree>(nlev, FullBinaryTree::trivial()));
  for_each_index(trials, jobs, [&](long i) {
    auto b = finite_bridge(endpoint, mix_seed(seed, static_cast<std::uint64_t>(i)));
    samples[static_cast<std::size_t>(i)] = std::move(b);
  });
  bool all_ok = true;
  for (std::size_t lev = 0; lev + 1 < nlev; ++lev) {
    std::map<FullBinaryTree, long> counts;
    for (long i = 0; i < trials; ++i) ++counts[samples[static_cast<std::size_t>(i)][lev]];
    const GofResult g = goodness_of_fit(counts, trials, exact[lev]);
    const bool ok = g.tv < 0.01;
    all_ok = all_ok && ok;
    out << "bridge level n=" << lev + 1 << " tv=" << g.tv << " " << (ok ? "ok" : "FAIL") << "\n";
  }
  return all_ok ? 0 : 1;
}

}  // namespace cli_detail

// Whole CLI as a function of (args, streams): same args give the same bytes,
// which the determinism tests exercise directly.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   std::istream& in = std::cin) {
  using namespace cli_detail;
  CLI::App app{"tree-valued Markov chain laboratory"};
  app.require_subcommand(1);

  std::string chain = "patricia", measure = "fair", format = "jsonl", out_path;
  int steps = 16, n = 0, jobs = 1;  // n = 0 means "mode default"
  long trials = 0;
  std::uint64_t seed = kDefaultSeed;
  std::size_t depth_cap = kDefaultDepthCap;
  std::string n_list_str, input_path, mode;

  int rc = 0;
  std::ofstream file_sink;
  auto sink = [&]() -> std::ostream& {
    if (out_path.empty()) return out;
    file_sink.open(out_path);
    if (!file_sink) throw BadFormat("cannot open " + out_path);
    return file_sink;
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a chain and emit its trajectory");
  sim->add_option("--chain", chain,
                  "patricia|radix|remy|zigzag-bridge|bridge-from:<leaves>|"
                  "rtree:interval|rtree:binary:<measure>");
  sim->add_option("--measure", measure, "source measure spec");
  sim->add_option("--steps", steps, "number of steps")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--format", format, "jsonl|dot|newick");
  sim->add_option("--depth-cap", depth_cap, "stream separation depth cap");
  sim->add_option("--out", out_path, "output path (default stdout)");
  sim->callback([&] {
    const SourceMeasure nu = SourceMeasure::parse(measure);
    const TreeSeq seq = simulate_sequence(chain, nu, steps, seed, depth_cap);
    const std::string header = config_line({{"cmd", "simulate"},
                                            {"chain", chain},
                                            {"measure", nu.format()},
                                            {"steps", std::to_string(steps)},
                                            {"seed", std::to_string(seed)}});
    emit_sequence(seq, format, header, sink());
  });

  // enumerate
  auto* enu = app.add_subcommand("enumerate", "list all full binary trees with n leaves");
  enu->add_option("--n", n, "number of leaves")->required()->check(CLI::PositiveNumber);
  enu->add_option("--format", format, "jsonl|newick");
  enu->add_option("--out", out_path, "output path (default stdout)");
  enu->callback([&] {
    auto& os = sink();
    for (const auto& t : enumerate_full_trees(n)) {
      if (format == "jsonl")
        os << tree_to_json(t).dump() << "\n";
      else if (format == "newick")
        os << to_newick(t) << "\n";
      else
        throw BadFormat("unknown format \"" + format + "\" (jsonl|newick)");
    }
  });

  // verify
  auto* ver = app.add_subcommand("verify", "statistical checks against exact laws");
  ver->add_option("mode", mode, "kernel|remy-uniform|dynkin|bridge-kernel")->required();
  ver->add_option("--trials", trials, "Monte Carlo trials (0 = mode default)");
  ver->add_option("--seed", seed, "RNG seed");
  ver->add_option("--n", n, "size bound / sample size");
  ver->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  ver->add_option("--endpoint", chain, "leaf list for bridge-kernel (default 00,01,10,11)");
  ver->callback([&] {
    auto& os = sink();
    if (mode == "kernel") {
      rc = verify_kernel(std::min(n ? n : 4, 5), trials ? trials : 20000, seed, jobs, os);
    } else if (mode == "remy-uniform") {
      rc = verify_remy_uniform(n ? n : 5, trials ? trials : 100000, seed, jobs, os);
    } else if (mode == "dynkin") {
      rc = verify_dynkin(trials ? trials : 1000000, seed, jobs, os);
    } else if (mode == "bridge-kernel") {
      const FullBinaryTree endpoint =
          tree_from_leaf_list(chain == "patricia" ? "00,01,10,11" : chain);
      rc = verify_bridge_kernel(endpoint, trials ? trials : 100000, seed, jobs, os);
    } else {
      throw CLI::ValidationError("verify", "unknown mode \"" + mode + "\"");
    }
  });

  // heights
  auto* hts = app.add_subcommand("heights", "height growth experiments");
  hts->add_option("--chain", chain, "patricia|remy|zigzag-bridge");
  hts->add_option("--measure", measure, "source measure spec (patricia)");
  hts->add_option("--n-list", n_list_str, "comma-separated sizes")->required();
  hts->add_option("--trials", trials, "trials per size")->required();
  hts->add_option("--seed", seed, "RNG seed");
  hts->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  hts->add_option("--format", format, "json|csv");
  hts->add_option("--out", out_path, "output path (default stdout)");
  hts->callback([&] {
    const ExperimentReport rep = height_experiment(
        chain == "patricia" || chain == "remy" || chain == "zigzag-bridge" ? chain : "patricia",
        SourceMeasure::parse(measure), parse_n_list(n_list_str), trials, seed, jobs);
    auto& os = sink();
    if (format == "csv")
      os << rep.to_csv();
    else
      os << rep.to_json().dump(2) << "\n";
    rc = rep.pass ? 0 : 1;
  });

  // dds
  auto* dds = app.add_subcommand("dds", "didendritic system tooling");
  dds->add_option("action", mode, "check|to-tree|from-tree|sample")->required();
  dds->add_option("file", input_path, "input JSON path ('-' = stdin)");
  dds->add_option("--n", n, "sample size");
  dds->add_option("--seed", seed, "RNG seed");
  dds->add_option("--out", out_path, "output path (default stdout)");
  dds->callback([&] {
    auto& os = sink();
    if (mode == "check") {
      const FiniteDDS d = FiniteDDS::from_json(load_json(input_path, in));
      const auto violations = d.check_axioms();
      for (const auto& v : violations) os << v << "\n";
      if (violations.empty())
        os << "ok\n";
      else
        rc = 1;
    } else if (mode == "to-tree") {
      const FiniteDDS d = FiniteDDS::from_json(load_json(input_path, in));
      try {
        os << labeled_tree_to_json(d.to_tree()).dump(2) << "\n";
      } catch (const AxiomViolation& e) {
        err << "axiom-violation: " << e.what() << "\n";
        rc = 1;
      }
    } else if (mode == "from-tree") {
      const LabeledTree t = labeled_tree_from_json(load_json(input_path, in));
      os << FiniteDDS::from_tree(t).to_json().dump(2) << "\n";
    } else if (mode == "sample") {
      os << zigzag_dds(n ? n : 3, seed).to_json().dump(2) << "\n";
    } else {
      throw CLI::ValidationError("dds", "unknown action \"" + mode + "\"");
    }
  });

  // export
  auto* exp = app.add_subcommand("export", "re-emit a stored tree in another format");
  exp->add_option("file", input_path, "tree JSON path ('-' = stdin)");
  exp->add_option("--format", format, "json|dot|newick");
  exp->add_option("--out", out_path, "output path (default stdout)");
  exp->callback([&] {
    const Json j = load_json(input_path, in);
    auto& os = sink();
    if (j.contains("labels")) {
      const LabeledTree t = labeled_tree_from_json(j);
      if (format == "newick")
        os << to_newick(t) << "\n";
      else if (format == "dot")
        os << to_dot(t.shape(), "tree") << "\n";
      else if (format == "json" || format == "jsonl")
        os << labeled_tree_to_json(t).dump(2) << "\n";
      else
        throw BadFormat("unknown format \"" + format + "\" (json|dot|newick)");
    } else {
      const BinaryTree t = tree_from_json(j);
      if (format == "newick")
        os << to_newick(FullBinaryTree(t)) << "\n";
      else if (format == "dot")
        os << to_dot(t, "tree") << "\n";
      else if (format == "json" || format == "jsonl")
        os << tree_to_json(t).dump(2) << "\n";
      else
        throw BadFormat("unknown format \"" + format + "\" (json|dot|newick)");
    }
  });

  // CLI11 wants argc/argv; build them from the args vector.
  std::vector<std::string> argv_store = args;
  std::vector<char*> argv;
  static char prog[] = "patricia";
  argv.push_back(prog);
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";  // what() already carries the "Code: " prefix
    return 3;
  }
  return rc;
}

}  // namespace patricia
