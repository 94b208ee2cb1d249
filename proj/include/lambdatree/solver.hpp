#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "delta_engine.hpp"
#include "error.hpp"
#include "labeling.hpp"
#include "partition.hpp"
#include "preprocess.hpp"
#include "tree.hpp"

namespace lambdatree {

enum class Algorithm { ck, fast, linear, automatic };

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "ck") return Algorithm::ck;
  if (s == "fast") return Algorithm::fast;
  if (s == "linear") return Algorithm::linear;
  if (s == "auto") return Algorithm::automatic;
  throw PreconditionError("unknown algorithm '" + s + "'");
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ck: return "ck";
    case Algorithm::fast: return "fast";
    case Algorithm::linear: return "linear";
    default: return "auto";
  }
}

struct SolveConfig {
  Algorithm algorithm = Algorithm::automatic;
  bool quick_checks = true;
  SplitMode split = SplitMode::safe;
  PartitionConfig partition;
  int auto_min_delta = 18;  // auto uses the linear tier from this max degree on
};

struct SolveStats {
  int n = 0;
  int max_degree = 0;
  Algorithm tier = Algorithm::automatic;
  EngineStats engine;
  long long cls[6] = {0, 0, 0, 0, 0, 0};  // index 1..5; pruned/split-off vertices count as class 1
  long long v4_light_max = 0;             // largest |C(v) ∩ (small heads - leaves)| over V4 vertices
  long long vm1 = 0;
  long long v2_dtilde_sum = 0;
  int pieces = 0;
  int removed_leaves = 0;
  int splits = 0;
  std::string quick;  // "accept"/"reject" when a quick check decided
  double seconds = 0;
};

struct SolveResult {
  bool feasible = false;
  int lambda = 0;
  std::optional<Labeling> witness;
  SolveStats stats;
};

/// Decision shortcuts for p = 2, lambda = Delta+1: three majors in a closed
/// neighbourhood rule it out; at most Delta-6 majors in total guarantee it.
inline std::optional<bool> quick_checks(const Tree& t) {
  const int n = t.size(), d = t.max_degree();
  if (n < 2) return std::nullopt;
  long long majors = 0;
  for (int v = 0; v < n; ++v) majors += t.degree(v) == d;
  for (int v = 0; v < n; ++v) {
    int m = t.degree(v) == d;
    for (int w : t.neighbors(v)) m += t.degree(w) == d;
    if (m >= 3) return false;
  }
  if (majors <= d - 6) return true;
  return std::nullopt;
}

/// Table for one vertex in the linear tier, dispatched on its class.
inline DeltaTable delta_table_for(const RootedTree& rt, int v, const TableStore& tables, const Partition& part, int p,
                                  int lambda, EngineStats* stats = nullptr) {
  const int level = level_bound(rt.subtree_size(v), lambda, p);
  if (p == 2 && part.vq[v]) {
    if (stats) ++stats->vq_base, ++stats->tables;
    return vq_base_delta(lambda, level);
  }
  switch (part.cls[v]) {
    case VClass::v3: return compute_delta_v3(rt, v, part.w_star[v], tables, level, p, lambda, stats);
    case VClass::v4:
      return compute_delta_v4(rt, v, part.w_star[v], tables, level, part.band_level, p, lambda, stats);
    case VClass::v5:
      return compute_delta_v5(rt, v, part.w_star[v], tables, level, part.band_level, p, lambda, stats);
    default: return flow_delta_table(rt, v, tables, level, p, lambda, stats);
  }
}

namespace detail {

inline DeltaTable fast_table(const RootedTree& rt, int v, const TableStore& tables, int p, int lambda,
                             EngineStats* stats) {
  DeltaTable t = DeltaTable::uncompressed(lambda, p);
  if (p == 2 && rt.child_count(v) > 0 && rt.base().degree(v) == lambda - 1) {
    bool all_leaves = true;
    for (int w : rt.children(v)) all_leaves = all_leaves && rt.child_count(w) == 0;
    if (all_leaves) {
      if (stats) ++stats->vq_base, ++stats->tables;
      return vq_base_delta(lambda);
    }
  }
  for (int b = 0; b <= lambda; ++b) {
    auto row = maintain_matching_delta(rt, v, b, tables, p, lambda, stats);
    for (int a = 0; a <= lambda; ++a) t.set_cell(a, b, row[a]);
  }
  if (stats) ++stats->tables;
  return t;
}

inline DeltaTable ck_table(const RootedTree& rt, int v, const TableStore& tables, int p, int lambda,
                           EngineStats* stats) {
  DeltaTable t = DeltaTable::uncompressed(lambda, p);
  for (int a = 0; a <= lambda; ++a)
    for (int b = 0; b <= lambda; ++b) t.set_cell(a, b, matching_pair_delta(rt, v, a, b, tables, p, lambda, stats));
  if (stats) ++stats->tables;
  return t;
}

/// Level each vertex's table was built at (the band used for extraction).
inline int table_level(Algorithm tier, const RootedTree& rt, int v, int p, int lambda) {
  return tier == Algorithm::linear ? level_bound(rt.subtree_size(v), lambda, p) : -1;
}

/// Bottom-up DP over a piece rooted at a leaf. Returns the store (root excluded).
inline TableStore compute_tables(const RootedTree& rt, Algorithm tier, const Partition* part, int p, int lambda,
                                 EngineStats* stats) {
  TableStore store(rt, leaf_delta(p, lambda, tier == Algorithm::linear ? 0 : -1));
  const auto& order = rt.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (v == rt.root() || rt.child_count(v) == 0) continue;
    switch (tier) {
      case Algorithm::ck: store.set(v, ck_table(rt, v, store, p, lambda, stats)); break;
      case Algorithm::fast: store.set(v, fast_table(rt, v, store, p, lambda, stats)); break;
      default: store.set(v, delta_table_for(rt, v, store, *part, p, lambda, stats)); break;
    }
  }
  return store;
}

/// Labels a piece top-down from its tables; the root is a leaf with one child.
inline std::vector<int> extract_labels(const RootedTree& rt, const TableStore& tables, Algorithm tier, int p,
                                       int lambda) {
  const int r = rt.root();
  const int top = rt.children(r)[0];
  const DeltaTable& tt = tables.get(top);
  std::vector<int> f(rt.size(), -1);
  for (int a = 0; a <= lambda && f[r] < 0; ++a)
    for (int b = 0; b <= lambda; ++b)
      if (tt.at(a, b)) {
        f[r] = a;
        f[top] = b;
        break;
      }
  if (f[r] < 0) throw InvariantViolation("extraction started on an infeasible piece");
  AssignmentNetwork net;
  for (int v : rt.order()) {
    if (v == r || rt.child_count(v) == 0) continue;
    int level = table_level(tier, rt, v, p, lambda);
    net.build({lambda, p, level, f[v], f[rt.parent(v)]}, rt.children(v), tables);
    if (!net.solve()) throw InvariantViolation("no child assignment at vertex " + std::to_string(v));
    for (auto [w, c] : net.assignment(rt.children(v), tables)) f[w] = c;
  }
  return f;
}

}  // namespace detail

namespace detail {

inline SolveResult decide_lambda_as_numbered(const Tree& t, int p, int lambda, bool want_witness,
                                            const SolveConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  SolveResult res;
  res.lambda = lambda;
  const int n = t.size();
  const int d = t.max_degree();
  res.stats.n = n;
  res.stats.max_degree = d;
  Algorithm tier = cfg.algorithm;
  if (tier == Algorithm::automatic) tier = d < cfg.auto_min_delta ? Algorithm::fast : Algorithm::linear;
  res.stats.tier = tier;
  auto finish = [&] {
    res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  };
  if (p < 1) throw PreconditionError("p must be positive");
  if (lambda < 0) return finish();

  if (n == 1) {
    res.feasible = true;
    if (want_witness) res.witness = Labeling{{0}};
    res.stats.cls[1] = 1;
    return finish();
  }
  if (n == 2) {
    res.feasible = lambda >= p;
    if (res.feasible && want_witness) res.witness = Labeling{{0, p}};
    res.stats.cls[1] = 2;
    return finish();
  }
  if (lambda < d + p - 1) {
    res.stats.cls[1] = n;
    return finish();
  }
  if (!want_witness && cfg.quick_checks && p == 2 && lambda == d + 1 &&
      (cfg.algorithm == Algorithm::automatic || cfg.algorithm == Algorithm::linear)) {
    if (auto q = quick_checks(t)) {
      res.feasible = *q;
      res.stats.quick = *q ? "accept" : "reject";
      res.stats.cls[1] = n;
      return finish();
    }
  }

  PreprocessResult pre = preprocess(t, p, lambda, cfg.split);
  res.stats.pieces = static_cast<int>(pre.pieces.size());
  res.stats.removed_leaves = pre.removed_leaves;
  res.stats.splits = pre.splits;
  res.stats.cls[1] += pre.removed_leaves + pre.removed_path_vertices;
  std::vector<int> f;
  if (want_witness) f.assign(n, -1);
  res.feasible = true;
  for (const auto& piece : pre.pieces) {
    const Tree& pt = piece.tree;
    const int m = pt.size();
    if (m <= 2) {
      res.stats.cls[1] += m;
      if (m == 2 && lambda < p) res.feasible = false;
      if (want_witness) {
        f[piece.original[0]] = 0;
        if (m == 2) f[piece.original[1]] = p;
      }
      if (!res.feasible) break;
      continue;
    }
    RootedTree rt = root_at_leaf(pt);
    std::optional<Partition> part;
    if (tier == Algorithm::linear) {
      part = partition_vertices(rt, p, lambda, cfg.partition);
      for (int c = 1; c <= 5; ++c) res.stats.cls[c] += part->count[c];
      res.stats.vm1 += part->vm1_count();
      for (int v = 0; v < m; ++v) {
        if (part->cls[v] == VClass::v2 && v != rt.root()) res.stats.v2_dtilde_sum += part->dtilde[v];
        if (part->cls[v] == VClass::v4) res.stats.v4_light_max = std::max<long long>(res.stats.v4_light_max, part->d2[v] - 1);
      }
    } else {
      res.stats.cls[1] += m;
    }
    TableStore tables = detail::compute_tables(rt, tier, part ? &*part : nullptr, p, lambda, &res.stats.engine);
    int top = rt.children(rt.root())[0];
    if (!tables.get(top).any()) {
      res.feasible = false;
      break;
    }
    if (want_witness) {
      auto local = detail::extract_labels(rt, tables, tier, p, lambda);
      for (int v = 0; v < m; ++v) f[piece.original[v]] = local[v];
    }
  }
  if (res.feasible && want_witness) {
    restore_labeling(t, pre, f, p, lambda);
    Labeling lab{std::move(f)};
    if (auto bad = first_violation(t, lab, p, 1))
      throw InvariantViolation("extracted labeling breaks " + bad->describe(lab));
    res.witness = std::move(lab);
  }
  return finish();
}

constexpr int kRenumberMin = 1 << 12;

}  // namespace detail

namespace detail {

// large inputs are solved in breadth-first numbering for memory locality
template <class Body>
SolveResult run_renumbered(const Tree& t, Body body) {
  if (t.size() < kRenumberMin) return body(t);
  std::vector<int> order;
  Tree u = t.bfs_renumbered(order);
  SolveResult res = body(u);
  if (res.witness) {
    std::vector<int> f(t.size());
    for (int i = 0; i < t.size(); ++i) f[order[i]] = res.witness->labels[i];
    res.witness = Labeling{std::move(f)};
  }
  return res;
}

}  // namespace detail

/// Decides whether t has an L(p,1)-labeling with span at most lambda.
inline SolveResult decide_lambda(const Tree& t, int p, int lambda, bool want_witness, const SolveConfig& cfg = {}) {
  auto start = std::chrono::steady_clock::now();
  SolveResult res = detail::run_renumbered(
      t, [&](const Tree& u) { return detail::decide_lambda_as_numbered(u, p, lambda, want_witness, cfg); });
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// Smallest lambda in the L(p,1) range, scanning upward; the witness comes with it.
inline SolveResult solve_lp1(const Tree& t, int p, const SolveConfig& cfg = {}) {
  auto start = std::chrono::steady_clock::now();
  LambdaBounds bounds = lambda_bounds(t, p);
  SolveResult res = detail::run_renumbered(t, [&](const Tree& u) {
    for (int lambda = bounds.lower; lambda <= bounds.upper; ++lambda) {
      SolveResult r = detail::decide_lambda_as_numbered(u, p, lambda, true, cfg);
      if (r.feasible) return r;
    }
    throw InvariantViolation("no feasible span up to the upper bound " + std::to_string(bounds.upper));
  });
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// L(2,1): Delta+1 or Delta+2.
inline SolveResult solve_l21(const Tree& t, const SolveConfig& cfg = {}) { return solve_lp1(t, 2, cfg); }

}  // namespace lambdatree
