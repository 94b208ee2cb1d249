#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lambdatree/lambdatree.hpp"

using namespace lambdatree;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kNo = 1, kBadInput = 2, kInternal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

json stats_json(const SolveStats& s) {
  return {{"tier", algorithm_name(s.tier)},
          {"n", s.n},
          {"delta", s.max_degree},
          {"pieces", s.pieces},
          {"removed_leaves", s.removed_leaves},
          {"splits", s.splits},
          {"quick", s.quick},
          {"delta_computations", s.engine.tables},
          {"flows", s.engine.flows},
          {"matchings", s.engine.matchings},
          {"vq_base", s.engine.vq_base},
          {"v1", s.cls[1]},
          {"v2", s.cls[2]},
          {"v3", s.cls[3]},
          {"v4", s.cls[4]},
          {"v5", s.cls[5]},
          {"vm1", s.vm1},
          {"v3_steps", {s.engine.v3_step[0], s.engine.v3_step[1], s.engine.v3_step[2]}},
          {"v4_reject", s.engine.v4_reject},
          {"v4_cases", {s.engine.v4_case[0], s.engine.v4_case[1], s.engine.v4_case[2]}},
          {"v4_fallback", s.engine.v4_fallback},
          {"v5_fact1", s.engine.v5_fact1},
          {"v5_fact2", s.engine.v5_fact2},
          {"seconds", s.seconds}};
}

struct SolveOpts {
  std::string input;
  int p = 2;
  int lambda = -1;
  std::string algorithm = "auto";
  std::string split = "safe";
  bool witness = false, as_json = false, stats = false, no_quick = false;
  long long vm_cap = -1, vm2_cap = -1, v45_split = -1;
  int band_level = -1;
};

int cmd_solve(const SolveOpts& o) {
  Tree t = parse_tree(read_file(o.input));
  if (o.p < 1) throw PreconditionError("--p must be at least 1");
  SolveConfig cfg;
  cfg.algorithm = parse_algorithm(o.algorithm);
  cfg.quick_checks = !o.no_quick;
  cfg.split = o.split == "always" ? SplitMode::always : o.split == "never" ? SplitMode::never : SplitMode::safe;
  if (o.split != "safe" && o.split != "always" && o.split != "never") throw PreconditionError("bad --split");
  cfg.partition.vm_cap = o.vm_cap;
  cfg.partition.vm2_cap = o.vm2_cap;
  cfg.partition.v45_split = o.v45_split;
  cfg.partition.band_level = o.band_level;
  const bool decision = o.lambda >= 0;
  SolveResult r = decision ? decide_lambda(t, o.p, o.lambda, o.witness, cfg) : solve_lp1(t, o.p, cfg);
  if (o.as_json) {
    json j;
    if (decision) j["feasible"] = r.feasible;
    j["lambda"] = r.lambda;
    if (r.witness) j["labels"] = r.witness->labels;
    if (o.stats) j["stats"] = stats_json(r.stats);
    std::cout << j.dump() << '\n';
    return kOk;
  }
  if (decision) std::cout << (r.feasible ? "yes" : "no") << '\n';
  else std::cout << "lambda " << r.lambda << '\n';
  if (o.witness && r.witness) std::cout << "labels " << join(r.witness->labels) << '\n';
  if (o.stats) {
    json s = stats_json(r.stats);
    for (auto it = s.begin(); it != s.end(); ++it) std::cout << "stat " << it.key() << ' ' << it.value().dump() << '\n';
  }
  return kOk;
}

int cmd_verify(const std::string& input, const std::string& labels, int p, int q) {
  Tree t = parse_tree(read_file(input));
  std::ifstream probe(labels);
  std::string text = probe ? read_file(labels) : labels;
  int lambda = 0;
  Labeling f = labeling_from_json(text, &lambda);
  if (q > p) throw PreconditionError("--q must not exceed --p");
  auto bad = first_violation(t, f, p, q);
  if (!bad && f.span() > lambda) {
    std::cout << "span " << f.span() << " exceeds lambda " << lambda << '\n';
    return kNo;
  }
  if (bad) {
    std::cout << "violated: " << bad->describe(f) << '\n';
    return kNo;
  }
  std::cout << "valid\n";
  return kOk;
}

int cmd_oracle(const std::string& input, int p, int q, bool as_json) {
  Tree t = parse_tree(read_file(input));
  if (t.size() > oracle_cap())
    throw PreconditionError("oracle is capped at n=" + std::to_string(oracle_cap()) + " (LAMBDATREE_ORACLE_CAP)");
  OracleResult r = brute_force_lambda(t, p, q);
  if (as_json) std::cout << labeling_to_json(r.witness, r.lambda) << '\n';
  else std::cout << "lambda " << r.lambda << "\nlabels " << join(r.witness.labels) << '\n';
  return kOk;
}

struct BenchOpts {
  std::vector<long long> sizes;
  int delta = 25;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms{"linear"};
  int repeats = 1;
  std::string kind = "random";
};

int cmd_bench(const BenchOpts& o) {
  std::cout << "n,delta,algorithm,ns,delta_computations,v1,v2,v3,v4,v5\n";
  for (long long n : o.sizes) {
    Tree t = generate_tree(parse_tree_kind(o.kind), static_cast<int>(n), o.delta, o.seed);
    for (const auto& name : o.algorithms) {
      SolveConfig cfg;
      cfg.algorithm = parse_algorithm(name);
      std::vector<long long> times;
      SolveResult r;
      for (int i = 0; i < std::max(1, o.repeats); ++i) {
        auto start = std::chrono::steady_clock::now();
        r = solve_l21(t, cfg);
        times.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
      }
      std::sort(times.begin(), times.end());
      const auto& s = r.stats;
      std::cout << n << ',' << t.max_degree() << ',' << name << ',' << times[times.size() / 2] << ','
                << s.engine.tables << ',' << s.cls[1] << ',' << s.cls[2] << ',' << s.cls[3] << ',' << s.cls[4] << ','
                << s.cls[5] << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L(p,1)-labeling of trees"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "optimal span, or a yes/no decision with --lambda");
  solve->add_option("--input", so.input, "tree file")->required();
  solve->add_option("--p", so.p, "edge separation");
  solve->add_option("--lambda", so.lambda, "decide this span instead of optimizing");
  solve->add_option("--algorithm", so.algorithm, "ck|fast|linear|auto");
  solve->add_flag("--witness", so.witness, "print a labeling");
  solve->add_flag("--json", so.as_json, "JSON output");
  solve->add_flag("--stats", so.stats, "print solver statistics");
  solve->add_flag("--no-quick", so.no_quick, "skip the major-vertex shortcuts");
  solve->add_option("--split", so.split, "path splitting: safe|always|never");
  solve->add_option("--vm-cap", so.vm_cap, "small-subtree size cap");
  solve->add_option("--vm2-cap", so.vm2_cap, "small-head split size");
  solve->add_option("--v45-split", so.v45_split, "light-load bound separating V4 from V5");
  solve->add_option("--band-level", so.band_level, "band level used by V4/V5");

  std::string v_input, v_labels;
  int v_p = 2, v_q = 1;
  auto* verify = app.add_subcommand("verify", "check a labeling");
  verify->add_option("--input", v_input, "tree file")->required();
  verify->add_option("--labels", v_labels, "labeling JSON (file or inline)")->required();
  verify->add_option("--p", v_p, "separation at distance 1");
  verify->add_option("--q", v_q, "separation at distance 2");

  std::string g_kind;
  int g_n = 0, g_delta = 0;
  std::uint64_t g_seed = 1;
  auto* gen = app.add_subcommand("gen", "generate a tree");
  gen->add_option("--kind", g_kind, "path|star|caterpillar|broom|random|v45_stress")->required();
  gen->add_option("--n", g_n, "vertex count")->required();
  gen->add_option("--delta", g_delta, "max degree, 0 leaves it free where the kind allows");
  gen->add_option("--seed", g_seed, "random seed");

  std::string o_input;
  int o_p = 2, o_q = 1;
  bool o_json = false;
  auto* orc = app.add_subcommand("oracle", "exhaustive span for small trees");
  orc->add_option("--input", o_input, "tree file")->required();
  orc->add_option("--p", o_p, "separation at distance 1");
  orc->add_option("--q", o_q, "separation at distance 2");
  orc->add_flag("--json", o_json, "JSON output");

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "time the solver, CSV on stdout");
  bench->add_option("--sizes", bo.sizes, "comma-separated vertex counts")->required()->delimiter(',');
  bench->add_option("--delta", bo.delta, "max degree");
  bench->add_option("--seed", bo.seed, "random seed");
  bench->add_option("--algorithms", bo.algorithms, "comma-separated tiers")->delimiter(',');
  bench->add_option("--repeats", bo.repeats, "runs per size, median reported");
  bench->add_option("--kind", bo.kind, "generator kind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*solve) return cmd_solve(so);
    if (*verify) return cmd_verify(v_input, v_labels, v_p, v_q);
    if (*gen) {
      std::cout << to_text(generate_tree(parse_tree_kind(g_kind), g_n, g_delta, g_seed));
      return kOk;
    }
    if (*orc) return cmd_oracle(o_input, o_p, o_q, o_json);
    if (*bench) return cmd_bench(bo);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
