#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "labeling.hpp"
#include "tree.hpp"

namespace lambdatree {

/// Leaf pruning threshold: a leaf whose neighbour has degree below this is removable.
inline int leaf_removal_threshold(int p, int lambda) { return lambda - 2 * p + 3; }

/// True when any labels of v0,v1 (one side) and v4,v5 (other side, possibly
/// complemented) extend to the deleted path vertices v2,v3. This is what makes
/// the path split feasibility-preserving; it always holds for lambda >= 4p.
inline bool split_safe(int p, int lambda) {
  if (lambda >= 4 * p) return true;
  static std::mutex mu;
  static std::map<std::pair<int, int>, bool> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, lambda);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto far = [p](int x, int y) { return std::abs(x - y) >= p; };
  auto completes = [&](int f0, int f1, int f4, int f5) {
    for (int f2 = 0; f2 <= lambda; ++f2) {
      if (!far(f2, f1) || f2 == f0 || f2 == f4) continue;
      for (int f3 = 0; f3 <= lambda; ++f3)
        if (far(f3, f2) && far(f3, f4) && f3 != f1 && f3 != f5) return true;
    }
    return false;
  };
  bool ok = true;
  for (int f0 = 0; f0 <= lambda && ok; ++f0)
    for (int f1 = 0; f1 <= lambda && ok; ++f1) {
      if (!far(f0, f1)) continue;
      for (int f4 = 0; f4 <= lambda && ok; ++f4)
        for (int f5 = 0; f5 <= lambda && ok; ++f5) {
          if (!far(f4, f5)) continue;
          if (!completes(f0, f1, f4, f5) && !completes(f0, f1, lambda - f4, lambda - f5)) ok = false;
        }
    }
  cache[key] = ok;
  return ok;
}

namespace detail {

/// Boundary relations of runs of degree-2 vertices. A run r_0..r_{L-1} between
/// x and y admits labels iff (f(x), f(r_0), f(r_{L-1}), f(y)) lies in R_L; the
/// sets of partial states are eventually periodic in L, so every R_L is known
/// after one cycle.
class RunRelations {
 public:
  static constexpr int kMaxLabels = 16;

  RunRelations(int p, int lambda) : p_(p), k_(lambda + 1) {
    const int k = k_;
    std::vector<char> s(static_cast<std::size_t>(k) * k * k * k, 0);
    for (int x = 0; x < k; ++x)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          if (far(x, a) && far(a, b) && x != b) s[idx(x, a, a, b)] = 1;
    std::map<std::vector<char>, int> seen;
    while (!seen.count(s)) {
      seen.emplace(s, static_cast<int>(states_.size()));
      states_.push_back(s);
      std::vector<char> next(s.size(), 0);
      for (int x = 0; x < k; ++x)
        for (int a = 0; a < k; ++a)
          for (int c = 0; c < k; ++c)
            for (int d = 0; d < k; ++d) {
              if (!s[idx(x, a, c, d)]) continue;
              for (int e = 0; e < k; ++e)
                if (far(d, e) && e != c) next[idx(x, a, d, e)] = 1;
            }
      s = std::move(next);
    }
    cycle_start_ = seen[s];
  }

  /// R_len as a bitmap over (x, first, last, y); len >= 2.
  std::vector<char> relation(long long len) const {
    const auto& s = state(len - 2);
    std::vector<char> r(s.size(), 0);
    for (int x = 0; x < k_; ++x)
      for (int a = 0; a < k_; ++a)
        for (int c = 0; c < k_; ++c)
          for (int d = 0; d < k_; ++d) {
            if (!s[idx(x, a, c, d)]) continue;
            for (int y = 0; y < k_; ++y)
              if (far(d, y) && y != c) r[idx(x, a, d, y)] = 1;
          }
    return r;
  }

  /// Shortest run length in {2,3} with the same boundary relation as len, or 0.
  int equivalent_short(long long len) {
    auto it = short_.find(len);
    if (it != short_.end()) return it->second;
    auto r = relation(len);
    int ans = 0;
    for (int l = 2; l <= 3 && !ans; ++l)
      if (relation(l) == r) ans = l;
    short_[len] = ans;
    return ans;
  }

 private:
  bool far(int u, int v) const { return std::abs(u - v) >= p_; }
  std::size_t idx(int x, int a, int c, int d) const {
    return ((static_cast<std::size_t>(x) * k_ + a) * k_ + c) * k_ + d;
  }
  const std::vector<char>& state(long long i) const {
    const long long n = static_cast<long long>(states_.size());
    if (i < n) return states_[i];
    const long long period = n - cycle_start_;
    return states_[cycle_start_ + (i - cycle_start_) % period];
  }

  int p_, k_;
  std::vector<std::vector<char>> states_;  // states_[i] = partial states (x, r_0, r_i, r_{i+1})
  int cycle_start_ = 0;
  std::unordered_map<long long, int> short_;
};

/// Run length in {2,3} equivalent to len for this (p, lambda), or 0 when there is none.
inline int equivalent_short_run(int p, int lambda, long long len) {
  if (lambda + 1 > RunRelations::kMaxLabels || len < 4) return 0;
  static std::mutex mu;
  static std::map<std::pair<int, int>, RunRelations> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, lambda);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, RunRelations(p, lambda)).first;
  return it->second.equivalent_short(len);
}

}  // namespace detail

/// safe: split long paths where splitting provably preserves feasibility,
/// otherwise shorten them to an equivalent run of length 2 or 3;
/// always: split unconditionally; never: leave paths alone.
enum class SplitMode { safe, always, never };

struct PreprocessOp {
  enum Kind : std::uint8_t { remove_leaf, split, shorten } kind;
  // remove_leaf: a = leaf, b = its neighbour
  // split: a = index into PreprocessResult::split_paths
  // shorten: a = index into PreprocessResult::runs, b = run length left behind
  int a = -1;
  int b = -1;
};

struct PreprocessPiece {
  Tree tree;
  std::vector<int> original;  // local id -> input id
};

struct PreprocessResult {
  std::vector<PreprocessPiece> pieces;
  int removed_leaves = 0;
  int splits = 0;
  int shortened = 0;
  long long removed_path_vertices = 0;
  std::vector<PreprocessOp> log;
  std::vector<std::array<int, 6>> split_paths;  // v0..v5, v2 and v3 removed
  std::vector<std::vector<int>> runs;           // shortened runs as x, r_0..r_{L-1}, y

  std::vector<Tree> trees() const {
    std::vector<Tree> out;
    for (const auto& pc : pieces) out.push_back(pc.tree);
    return out;
  }
};

namespace detail {

/// Current graph during preprocessing or restoring: the input tree induced on
/// live vertices plus edges that bridge shortened runs.
class LiveGraph {
 public:
  LiveGraph(const Tree& t, std::vector<char> live) : t_(&t), live_(std::move(live)) {}

  bool live(int v) const { return live_[v] != 0; }
  void set_live(int v, bool on) { live_[v] = on; }
  int add_bridge(int u, int w) {
    int id = static_cast<int>(bridge_on_.size());
    bridge_on_.push_back(1);
    if (extra_.empty()) extra_.resize(t_->size());
    extra_[u].push_back({w, id});
    extra_[w].push_back({u, id});
    return id;
  }
  void set_bridge(int id, bool on) { bridge_on_[id] = on; }

  template <class F>
  void for_each_neighbor(int v, F&& fn) const {
    for (int w : t_->neighbors(v))
      if (live_[w]) fn(w);
    if (extra_.empty()) return;
    for (auto [w, id] : extra_[v])
      if (bridge_on_[id] && live_[w]) fn(w);
  }

 private:
  const Tree* t_;
  std::vector<char> live_;
  std::vector<std::vector<std::pair<int, int>>> extra_;
  std::vector<char> bridge_on_;
};

}  // namespace detail

/// Leaf pruning and long-path reduction, iterated to a fixpoint.
inline PreprocessResult preprocess(const Tree& t, int p, int lambda, SplitMode mode = SplitMode::safe) {
  const int n = t.size();
  PreprocessResult res;
  if (n <= 2) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    res.pieces.push_back({t, ids});
    return res;
  }
  const int thr = leaf_removal_threshold(p, lambda);
  const bool do_split = mode == SplitMode::always || (mode == SplitMode::safe && split_safe(p, lambda));
  const bool do_shorten = mode == SplitMode::safe && !do_split;
  detail::LiveGraph g(t, std::vector<char>(n, 1));
  res.log.reserve(n);
  std::vector<int> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = t.degree(v);
  auto other_neighbor = [&](int v, int skip) {
    int found = -1;
    g.for_each_neighbor(v, [&](int w) {
      if (found < 0 && w != skip) found = w;
    });
    return found;
  };

  auto step1 = [&] {
    bool changed = false;
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
      if (g.live(v) && deg[v] == 1) queue.push_back(v);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int v = queue[i];
      if (!g.live(v) || deg[v] != 1) continue;
      int u = other_neighbor(v, -1);
      if (deg[u] >= thr) continue;
      g.set_live(v, false);
      deg[v] = 0;
      --deg[u];
      res.log.push_back({PreprocessOp::remove_leaf, v, u});
      ++res.removed_leaves;
      changed = true;
      if (deg[u] == 1) queue.push_back(u);
    }
    return changed;
  };

  auto step2_pass = [&] {
    bool changed = false;
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
      if (!g.live(s) || seen[s] || deg[s] != 2) continue;
      // walk to one end of the run containing s
      int prev = -1, cur = s;
      for (int steps = 0; steps < n; ++steps) {
        int next = -1;
        g.for_each_neighbor(cur, [&](int w) {
          if (w != prev && deg[w] == 2) next = w;
        });
        if (next < 0 || next == s) break;
        prev = cur;
        cur = next;
      }
      std::vector<int> run;
      prev = -1;
      for (int v = cur; v >= 0;) {
        run.push_back(v);
        seen[v] = 1;
        int next = -1;
        g.for_each_neighbor(v, [&](int w) {
          if (w != prev && deg[w] == 2 && !seen[w]) next = w;
        });
        prev = v;
        v = next;
      }
      if (run.size() < 4) continue;
      if (run.front() > run.back()) std::reverse(run.begin(), run.end());
      const int len = static_cast<int>(run.size());
      int before = other_neighbor(run[0], run[1]);
      int after = other_neighbor(run[len - 1], run[len - 2]);
      if (do_split) {
        for (int i = 0; len - i >= 4; i += 4) {
          int v0 = i == 0 ? before : run[i - 1];
          int v5 = i + 4 < len ? run[i + 4] : after;
          int v1 = run[i], v2 = run[i + 1], v3 = run[i + 2], v4 = run[i + 3];
          g.set_live(v2, false);
          g.set_live(v3, false);
          deg[v2] = deg[v3] = 0;
          --deg[v1];
          --deg[v4];
          res.log.push_back({PreprocessOp::split, static_cast<int>(res.split_paths.size()), -1});
          res.split_paths.push_back({v0, v1, v2, v3, v4, v5});
          ++res.splits;
          res.removed_path_vertices += 2;
          changed = true;
        }
      } else if (do_shorten) {
        int keep = detail::equivalent_short_run(p, lambda, len);
        if (keep == 0) continue;
        PreprocessOp op{PreprocessOp::shorten, static_cast<int>(res.runs.size()), keep};
        std::vector<int> full{before};
        full.insert(full.end(), run.begin(), run.end());
        full.push_back(after);
        res.runs.push_back(std::move(full));
        for (int i = keep - 1; i <= len - 2; ++i) {
          g.set_live(run[i], false);
          deg[run[i]] = 0;
        }
        g.add_bridge(run[keep - 2], run[len - 1]);
        res.removed_path_vertices += len - keep;
        res.log.push_back(op);
        ++res.shortened;
        changed = true;
      }
    }
    return changed;
  };

  for (;;) {
    step1();
    bool any = false;
    if (do_split || do_shorten)
      while (step2_pass()) any = true;
    if (!any) break;
  }

  // collect the pieces
  std::vector<int> comp(n, -1);
  std::vector<int> local(n, -1);
  for (int s = 0; s < n; ++s) {
    if (!g.live(s) || comp[s] >= 0) continue;
    int id = static_cast<int>(res.pieces.size());
    std::vector<int> verts{s};
    comp[s] = id;
    for (std::size_t i = 0; i < verts.size(); ++i)
      g.for_each_neighbor(verts[i], [&](int w) {
        if (comp[w] < 0) {
          comp[w] = id;
          verts.push_back(w);
        }
      });
    std::sort(verts.begin(), verts.end());
    for (int i = 0; i < static_cast<int>(verts.size()); ++i) local[verts[i]] = i;
    std::vector<std::pair<int, int>> edges;
    for (int v : verts)
      g.for_each_neighbor(v, [&](int w) {
        if (v < w) edges.emplace_back(local[v], local[w]);
      });
    int m = static_cast<int>(verts.size());
    res.pieces.push_back({Tree(m, std::move(edges)), std::move(verts)});
  }
  return res;
}

namespace detail {

/// Labels that x may not take next to the labelled live vertices of g.
inline std::vector<char> forbidden_labels(const LiveGraph& g, const std::vector<int>& f, int x, int p, int lambda) {
  std::vector<char> bad(lambda + 1, 0);
  g.for_each_neighbor(x, [&](int w) {
    if (f[w] >= 0)
      for (int y = std::max(0, f[w] - p + 1); y <= std::min(lambda, f[w] + p - 1); ++y) bad[y] = 1;
    g.for_each_neighbor(w, [&](int z) {
      if (z != x && f[z] >= 0 && f[z] <= lambda) bad[f[z]] = 1;
    });
  });
  return bad;
}

/// Labels r_1..r_{L-2} of a run given f(x), f(r_0), f(r_{L-1}), f(y).
/// Completion sets depend only on the distance to the end and repeat, so
/// memory stays O(period * lambda^2).
inline bool fill_run(const std::vector<int>& run, std::vector<int>& f, int p, int lambda) {
  const int k = lambda + 1;
  const int len = static_cast<int>(run.size()) - 2;  // run[1..len] are r_0..r_{L-1}
  const int x = f[run[0]], y = f[run[len + 1]], a = f[run[1]], d = f[run[len]];
  auto far = [p](int u, int v) { return std::abs(u - v) >= p; };
  // done[j][c*k+e]: a pair (r_{i-1}, r_i) = (c, e) at distance j from the end completes
  std::vector<std::vector<char>> done;
  std::map<std::vector<char>, int> seen;
  std::vector<char> cur(static_cast<std::size_t>(k) * k, 0);
  for (int c = 0; c < k; ++c)
    if (c != y && far(c, d)) cur[c * k + d] = 1;
  while (!seen.count(cur) && static_cast<int>(done.size()) < len) {
    seen.emplace(cur, static_cast<int>(done.size()));
    done.push_back(cur);
    std::vector<char> next(cur.size(), 0);
    for (int c = 0; c < k; ++c)
      for (int e = 0; e < k; ++e) {
        if (!far(c, e)) continue;
        for (int g2 = 0; g2 < k && !next[c * k + e]; ++g2)
          if (far(e, g2) && g2 != c && cur[e * k + g2]) next[c * k + e] = 1;
      }
    cur = std::move(next);
  }
  const int start = seen.count(cur) ? seen[cur] : 0;
  const int period = static_cast<int>(done.size()) - start;
  auto ok = [&](int j, int c, int e) {
    if (j >= static_cast<int>(done.size())) j = start + (j - start) % period;
    return done[j][c * k + e] != 0;
  };
  int before = x, last = a;
  for (int i = 1; i <= len - 1; ++i) {
    int pick = -1;
    for (int e = 0; e < k && pick < 0; ++e)
      if (far(last, e) && e != before && ok(len - 1 - i, last, e)) pick = e;
    if (pick < 0) return false;
    if (i < len - 1) f[run[i + 1]] = pick;
    else if (pick != d) return false;
    before = last;
    last = pick;
  }
  return true;
}

}  // namespace detail

/// Extends a labeling of the pieces (input ids, -1 where removed) back to the
/// whole input tree by undoing the preprocessing log in reverse.
inline void restore_labeling(const Tree& t, const PreprocessResult& pre, std::vector<int>& f, int p, int lambda) {
  const int n = t.size();
  std::vector<char> live(n, 0);
  for (int v = 0; v < n; ++v) live[v] = f[v] >= 0;
  detail::LiveGraph g(t, std::move(live));
  std::vector<int> bridge(pre.runs.size(), -1);
  for (const auto& op : pre.log)
    if (op.kind == PreprocessOp::shorten) {
      const auto& run = pre.runs[op.a];
      int len = static_cast<int>(run.size()) - 2;
      bridge[op.a] = g.add_bridge(run[op.b - 1], run[len]);
    }
  // labels used around a vertex, cached while only leaves are being restored
  const bool masks = lambda < 64;
  std::vector<std::uint64_t> used(masks ? n : 0);
  std::vector<int> used_epoch(masks ? n : 0, -1);
  int epoch = 0;
  for (std::size_t i = pre.log.size(); i-- > 0;) {
    const PreprocessOp& op = pre.log[i];
    if (op.kind == PreprocessOp::remove_leaf) {
      int v = op.a, u = op.b;
      if (masks && f[u] >= 0) {
        if (used_epoch[u] != epoch) {
          std::uint64_t m = 0;
          g.for_each_neighbor(u, [&](int z) {
            if (f[z] >= 0 && f[z] <= lambda) m |= std::uint64_t{1} << f[z];
          });
          used[u] = m;
          used_epoch[u] = epoch;
        }
        std::uint64_t bad = used[u];
        for (int y = std::max(0, f[u] - p + 1); y <= std::min(lambda, f[u] + p - 1); ++y) bad |= std::uint64_t{1} << y;
        int y = 0;
        while (y <= lambda && (bad >> y & 1)) ++y;
        if (y > lambda) throw InvariantViolation("no label left for a pruned leaf");
        g.set_live(v, true);
        f[v] = y;
        used[u] |= std::uint64_t{1} << y;
        continue;
      }
      g.set_live(v, true);
      auto bad = detail::forbidden_labels(g, f, v, p, lambda);
      int y = static_cast<int>(std::find(bad.begin(), bad.end(), 0) - bad.begin());
      if (y > lambda) throw InvariantViolation("no label left for a pruned leaf");
      f[v] = y;
      continue;
    }
    ++epoch;
    if (op.kind == PreprocessOp::shorten) {
      const auto& run = pre.runs[op.a];
      const int len = static_cast<int>(run.size()) - 2;
      g.set_bridge(bridge[op.a], false);
      for (int j = op.b; j <= len - 1; ++j) g.set_live(run[j], true);
      if (!detail::fill_run(run, f, p, lambda)) throw InvariantViolation("cannot relabel a shortened path");
      continue;
    }
    const auto& path = pre.split_paths[op.a];
    int v2 = path[2], v3 = path[3], v4 = path[4];
    g.set_live(v2, true);
    g.set_live(v3, true);
    auto try_fill = [&] {
      auto bad2 = detail::forbidden_labels(g, f, v2, p, lambda);
      for (int y2 = 0; y2 <= lambda; ++y2) {
        if (bad2[y2]) continue;
        f[v2] = y2;
        auto bad3 = detail::forbidden_labels(g, f, v3, p, lambda);
        for (int y3 = 0; y3 <= lambda; ++y3)
          if (!bad3[y3]) {
            f[v3] = y3;
            return true;
          }
        f[v2] = -1;
      }
      return false;
    };
    if (try_fill()) continue;
    // complement the labelled side hanging off v4 and retry
    std::vector<int> side{v4};
    std::vector<char> in(n, 0);
    in[v4] = in[v3] = 1;
    for (std::size_t j = 0; j < side.size(); ++j)
      g.for_each_neighbor(side[j], [&](int w) {
        if (!in[w] && f[w] >= 0) {
          in[w] = 1;
          side.push_back(w);
        }
      });
    for (int w : side) f[w] = lambda - f[w];
    if (try_fill()) continue;
    for (int w : side) f[w] = lambda - f[w];
    throw InvariantViolation("cannot relabel the two vertices removed by a path split");
  }
}

}  // namespace lambdatree
