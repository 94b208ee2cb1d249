#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "error.hpp"

namespace lambdatree {

/// Integral max-flow network (Dinic). Arc e and its reverse e^1 are stored in pairs.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes = 0) { reset(nodes); }

  void reset(int nodes) {
    n_ = nodes;
    head_.assign(nodes, -1);
    to_.clear();
    next_.clear();
    cap_.clear();
    flow_.clear();
  }

  int add_node() {
    head_.push_back(-1);
    return n_++;
  }

  int add_arc(int u, int v, std::int64_t cap) {
    if (cap < 0) throw PreconditionError("negative capacity");
    int e = static_cast<int>(to_.size());
    push(u, v, cap);
    push(v, u, 0);
    return e;
  }

  int node_count() const { return n_; }
  int arc_count() const { return static_cast<int>(to_.size()); }
  int head(int e) const { return to_[e]; }
  int tail(int e) const { return to_[e ^ 1]; }
  std::int64_t cap(int e) const { return cap_[e]; }
  std::int64_t flow(int e) const { return flow_[e]; }
  std::int64_t residual(int e) const { return cap_[e] - flow_[e]; }

  template <class F>
  void for_each_out(int u, F&& f) const {
    for (int e = head_[u]; e >= 0; e = next_[e])
      if ((e & 1) == 0) f(e);
  }

  std::int64_t max_flow(int s, int t) {
    std::int64_t total = 0;
    level_.assign(n_, -1);
    iter_.resize(n_);
    while (bfs(s, t)) {
      for (int v = 0; v < n_; ++v) iter_[v] = head_[v];
      for (;;) {
        std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max());
        if (f == 0) break;
        total += f;
      }
    }
    return total;
  }

  /// Nodes that can still reach t in the residual graph without passing
  /// through s. For a label node c this is exactly "reachable by a
  /// psi-alternating path from a label with slack on its arc to t".
  std::vector<char> reaches_sink(int s, int t) const {
    std::vector<char> good(n_, 0);
    std::vector<int> queue{t};
    good[t] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int y = queue[i];
      if (y == s) continue;
      // arcs x->y with residual capacity: stored as e where to_[e] == y,
      // found through the paired arc e^1 leaving y.
      for (int r = head_[y]; r >= 0; r = next_[r]) {
        int e = r ^ 1;
        int x = to_[r];
        if (!good[x] && cap_[e] - flow_[e] > 0) {
          good[x] = 1;
          queue.push_back(x);
        }
      }
    }
    return good;
  }

  /// Label nodes reachable from the slack set X' (see reaches_sink).
  std::vector<int> residual_reachable(const std::vector<int>& label_nodes, int s, int t) const {
    auto good = reaches_sink(s, t);
    std::vector<int> out;
    for (int c : label_nodes)
      if (good[c]) out.push_back(c);
    return out;
  }

 private:
  void push(int u, int v, std::int64_t cap) {
    to_.push_back(v);
    cap_.push_back(cap);
    flow_.push_back(0);
    next_.push_back(head_[u]);
    head_[u] = static_cast<int>(to_.size()) - 1;
  }

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int>& q = queue_;
    q.assign(1, s);
    level_[s] = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      int u = q[i];
      for (int e = head_[u]; e >= 0; e = next_[e])
        if (cap_[e] - flow_[e] > 0 && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[u] + 1;
          q.push_back(to_[e]);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(int u, int t, std::int64_t f) {
    if (u == t) return f;
    for (int& e = iter_[u]; e >= 0; e = next_[e]) {
      int v = to_[e];
      if (cap_[e] - flow_[e] > 0 && level_[v] == level_[u] + 1) {
        std::int64_t d = dfs(v, t, std::min(f, cap_[e] - flow_[e]));
        if (d > 0) {
          flow_[e] += d;
          flow_[e ^ 1] -= d;
          return d;
        }
      }
    }
    return 0;
  }

  int n_ = 0;
  std::vector<int> head_, to_, next_;
  std::vector<std::int64_t> cap_, flow_;
  std::vector<int> level_, iter_, queue_;
};

}  // namespace lambdatree
