#pragma once

#include <limits>
#include <vector>

#include "error.hpp"

namespace lambdatree {

/// Left side = children, right side = labels.
class BipartiteGraph {
 public:
  BipartiteGraph(int left = 0, int right = 0) { reset(left, right); }

  void reset(int left, int right) {
    left_ = left;
    right_ = right;
    adj_.assign(left, {});
  }
  /// Caller guarantees (l, r) is not already present.
  void add_edge(int l, int r) {
    if (l < 0 || l >= left_ || r < 0 || r >= right_) throw PreconditionError("bipartite edge out of range");
    adj_[l].push_back(r);
  }
  int left_count() const { return left_; }
  int right_count() const { return right_; }
  const std::vector<int>& adj(int l) const { return adj_[l]; }

 private:
  int left_ = 0;
  int right_ = 0;
  std::vector<std::vector<int>> adj_;
};

/// -1 marks an unmatched vertex.
struct Matching {
  std::vector<int> pair_of_left;
  std::vector<int> pair_of_right;
  int size = 0;
};

/// Hopcroft-Karp; adjacency is scanned in insertion order so results are deterministic.
inline Matching max_matching(const BipartiteGraph& g) {
  const int L = g.left_count(), R = g.right_count();
  const int INF = std::numeric_limits<int>::max();
  Matching m;
  m.pair_of_left.assign(L, -1);
  m.pair_of_right.assign(R, -1);
  std::vector<int> dist(L), it(L), queue(L);

  auto bfs = [&] {
    int head = 0, tail = 0;
    bool found = false;
    for (int l = 0; l < L; ++l) {
      if (m.pair_of_left[l] < 0) {
        dist[l] = 0;
        queue[tail++] = l;
      } else {
        dist[l] = INF;
      }
    }
    while (head < tail) {
      int l = queue[head++];
      for (int r : g.adj(l)) {
        int l2 = m.pair_of_right[r];
        if (l2 < 0) {
          found = true;
        } else if (dist[l2] == INF) {
          dist[l2] = dist[l] + 1;
          queue[tail++] = l2;
        }
      }
    }
    return found;
  };

  // iterative DFS along the layered graph
  std::vector<int> stack;
  auto dfs = [&](int root) {
    stack.assign(1, root);
    while (!stack.empty()) {
      int l = stack.back();
      bool advanced = false;
      for (; it[l] < static_cast<int>(g.adj(l).size()); ++it[l]) {
        int r = g.adj(l)[it[l]];
        int l2 = m.pair_of_right[r];
        if (l2 < 0) {
          // augment along the stack
          for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i) {
            int x = stack[i];
            int rx = g.adj(x)[it[x]];
            m.pair_of_left[x] = rx;
            m.pair_of_right[rx] = x;
          }
          return true;
        }
        if (dist[l2] == dist[l] + 1) {
          stack.push_back(l2);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        dist[l] = INF;
        stack.pop_back();
        if (!stack.empty()) ++it[stack.back()];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (int l = 0; l < L; ++l)
      if (m.pair_of_left[l] < 0 && dfs(l)) ++m.size;
  }
  return m;
}

/// Right vertices reachable from unmatched right vertices by alternating paths
/// (non-matching edge right->left, then matching edge left->right).
inline std::vector<char> alternating_reachable(const BipartiteGraph& g, const Matching& m) {
  const int L = g.left_count(), R = g.right_count();
  std::vector<std::vector<int>> radj(R);
  for (int l = 0; l < L; ++l)
    for (int r : g.adj(l)) radj[r].push_back(l);
  std::vector<char> reach(R, 0), seen_left(L, 0);
  std::vector<int> queue;
  for (int r = 0; r < R; ++r)
    if (m.pair_of_right[r] < 0) {
      reach[r] = 1;
      queue.push_back(r);
    }
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int r = queue[i];
    for (int l : radj[r]) {
      if (seen_left[l] || m.pair_of_left[l] == r) continue;
      seen_left[l] = 1;
      int r2 = m.pair_of_left[l];
      if (r2 >= 0 && !reach[r2]) {
        reach[r2] = 1;
        queue.push_back(r2);
      }
    }
  }
  return reach;
}

}  // namespace lambdatree
