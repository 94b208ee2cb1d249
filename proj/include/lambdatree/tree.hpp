#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lambdatree {

/// Immutable undirected tree in CSR form. Vertex ids are 0..n-1.
class Tree {
 public:
  Tree() : Tree(1, {}) {}

  /// Throws PreconditionError unless `edges` forms a spanning tree on n vertices.
  Tree(int n, std::vector<std::pair<int, int>> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw PreconditionError("tree needs at least one vertex");
    if (static_cast<int>(edges_.size()) != n_ - 1)
      throw PreconditionError("tree on " + std::to_string(n_) + " vertices needs " +
                              std::to_string(n_ - 1) + " edges");
    std::vector<int> uf(n_);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    offset_.assign(n_ + 1, 0);
    for (auto [u, v] : edges_) {
      if (u < 0 || v < 0 || u >= n_ || v >= n_) throw PreconditionError("vertex id out of range");
      if (u == v) throw PreconditionError("self-loop");
      int ru = find(u), rv = find(v);
      if (ru == rv) throw PreconditionError("edge set contains a cycle");
      uf[ru] = rv;
      ++offset_[u + 1];
      ++offset_[v + 1];
    }
    for (int i = 0; i < n_; ++i) offset_[i + 1] += offset_[i];
    adj_.resize(offset_[n_]);
    std::vector<int> pos(offset_.begin(), offset_.end() - 1);
    for (auto [u, v] : edges_) {
      adj_[pos[u]++] = v;
      adj_[pos[v]++] = u;
    }
    for (int v = 0; v < n_; ++v) {
      std::sort(adj_.begin() + offset_[v], adj_.begin() + offset_[v + 1]);
      max_degree_ = std::max(max_degree_, degree(v));
    }
  }

  int size() const { return n_; }
  int max_degree() const { return max_degree_; }
  int degree(int v) const { return offset_[v + 1] - offset_[v]; }
  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offset_[v], adj_.data() + offset_[v + 1]};
  }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool is_leaf(int v) const { return degree(v) == 1; }

  bool adjacent(int u, int v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Copy renumbered in breadth-first order from vertex 0; order[new id] = old id.
  Tree bfs_renumbered(std::vector<int>& order) const {
    std::vector<int> id(n_, -1);
    order.assign(1, 0);
    order.reserve(n_);
    id[0] = 0;
    Tree u;
    u.n_ = n_;
    u.max_degree_ = max_degree_;
    u.edges_.reserve(n_ - 1);
    u.offset_.assign(n_ + 1, 0);
    u.adj_.resize(adj_.size());
    std::vector<int> parent(n_, -1);
    int fill = 0;
    constexpr int ahead = 16;
    for (int i = 0; i < n_; ++i) {
      if (i + ahead < static_cast<int>(order.size())) {
        int x = order[i + ahead];
        __builtin_prefetch(&offset_[x]);
        if (i + ahead / 2 < static_cast<int>(order.size())) {
          int y = order[i + ahead / 2];
          __builtin_prefetch(&adj_[offset_[y]]);
        }
      }
      if (i + 4 < static_cast<int>(order.size()))
        for (int w : neighbors(order[i + 4])) __builtin_prefetch(&id[w]);
      int v = order[i];
      u.offset_[i] = fill;
      if (parent[i] >= 0) u.adj_[fill++] = parent[i];
      for (int w : neighbors(v))
        if (id[w] < 0) {
          int j = static_cast<int>(order.size());
          id[w] = j;
          order.push_back(w);
          parent[j] = i;
          u.edges_.emplace_back(i, j);
          u.adj_[fill++] = j;
        }
    }
    u.offset_[n_] = fill;
    return u;
  }

 private:
  int n_ = 0;
  int max_degree_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> offset_;
  std::vector<int> adj_;
};

/// Parses the edge-list format: first line n, then n-1 lines "u v".
inline Tree parse_tree(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
    lines.pop_back();
  if (lines.empty()) throw ParseError("empty input", 1);

  auto read_ints = [](const std::string& s, int line, int want) {
    std::istringstream in(s);
    std::vector<long long> vals;
    long long x;
    while (in >> x) vals.push_back(x);
    in.clear();
    std::string rest;
    if ((in >> rest) || static_cast<int>(vals.size()) != want)
      throw ParseError("expected " + std::to_string(want) + " integer(s)", line);
    return vals;
  };

  long long n = read_ints(lines[0], 1, 1)[0];
  if (n < 1 || n > 100'000'000) throw ParseError("vertex count out of range", 1);
  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    int line = static_cast<int>(i) + 1;
    auto vals = read_ints(lines[i], line, 2);
    if (vals[0] < 0 || vals[1] < 0 || vals[0] >= n || vals[1] >= n)
      throw ParseError("vertex id out of range", line);
    int u = static_cast<int>(vals[0]), v = static_cast<int>(vals[1]);
    if (u == v) throw ParseError("self-loop", line);
    int ru = find(u), rv = find(v);
    if (ru == rv) {
      for (auto [a, b] : edges)
        if ((a == u && b == v) || (a == v && b == u)) throw ParseError("duplicate edge", line);
      throw ParseError("edge closes a cycle", line);
    }
    uf[ru] = rv;
    edges.emplace_back(u, v);
  }
  if (static_cast<long long>(edges.size()) != n - 1)
    throw ParseError("disconnected: " + std::to_string(edges.size()) + " edges for " +
                         std::to_string(n) + " vertices",
                     static_cast<int>(lines.size()));
  return Tree(static_cast<int>(n), std::move(edges));
}

inline std::string to_text(const Tree& t) {
  std::string out = std::to_string(t.size()) + "\n";
  for (auto [u, v] : t.edges()) out += std::to_string(u) + " " + std::to_string(v) + "\n";
  return out;
}

/// Rooted view of a Tree. Keeps a pointer to the base tree, which must outlive it.
class RootedTree {
 public:
  RootedTree(const Tree& t, int root) : base_(&t), root_(root) {
    int n = t.size();
    if (root < 0 || root >= n) throw PreconditionError("root out of range");
    parent_.assign(n, -1);
    order_.reserve(n);
    order_.push_back(root);
    std::vector<char> seen(n, 0);
    seen[root] = 1;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      int v = order_[i];
      for (int w : t.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          parent_[w] = v;
          order_.push_back(w);
        }
    }
    child_offset_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v)
      if (parent_[v] >= 0) ++child_offset_[parent_[v] + 1];
    for (int v = 0; v < n; ++v) child_offset_[v + 1] += child_offset_[v];
    children_.resize(n > 0 ? n - 1 : 0);
    std::vector<int> pos(child_offset_.begin(), child_offset_.end() - 1);
    for (int v : order_)
      if (parent_[v] >= 0) children_[pos[parent_[v]]++] = v;
    size_.assign(n, 1);
    height_.assign(n, 0);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      int v = *it, p = parent_[v];
      if (p >= 0) {
        size_[p] += size_[v];
        height_[p] = std::max(height_[p], height_[v] + 1);
      }
    }
  }

  const Tree& base() const { return *base_; }
  int size() const { return base_->size(); }
  int root() const { return root_; }
  int parent(int v) const { return parent_[v]; }
  std::span<const int> children(int v) const {
    return {children_.data() + child_offset_[v], children_.data() + child_offset_[v + 1]};
  }
  int child_count(int v) const { return child_offset_[v + 1] - child_offset_[v]; }
  int subtree_size(int v) const { return size_[v]; }
  int height(int v) const { return height_[v]; }
  /// BFS order from the root; parents precede children.
  const std::vector<int>& order() const { return order_; }

 private:
  const Tree* base_;
  int root_;
  std::vector<int> parent_;
  std::vector<int> child_offset_;
  std::vector<int> children_;
  std::vector<int> size_;
  std::vector<int> height_;
  std::vector<int> order_;
};

inline int lowest_leaf(const Tree& t) {
  for (int v = 0; v < t.size(); ++v)
    if (t.degree(v) == 1) return v;
  return 0;
}

inline RootedTree root_at_leaf(const Tree& t) { return RootedTree(t, lowest_leaf(t)); }

struct PathComponent {
  std::vector<int> vertices;
  int size() const { return static_cast<int>(vertices.size()); }
};

/// Maximal runs of degree-2 vertices. Each run starts at the end with the smaller id.
inline std::vector<PathComponent> path_components(const Tree& t) {
  std::vector<PathComponent> out;
  std::vector<char> seen(t.size(), 0);
  for (int s = 0; s < t.size(); ++s) {
    if (seen[s] || t.degree(s) != 2) continue;
    // walk to one end of the run
    int prev = -1, cur = s;
    for (;;) {
      int next = -1;
      for (int w : t.neighbors(cur))
        if (w != prev && t.degree(w) == 2) next = w;
      if (next < 0 || next == s) break;
      prev = cur;
      cur = next;
    }
    PathComponent pc;
    prev = -1;
    for (int v = cur; v >= 0;) {
      pc.vertices.push_back(v);
      seen[v] = 1;
      int next = -1;
      for (int w : t.neighbors(v))
        if (w != prev && t.degree(w) == 2 && !seen[w]) next = w;
      prev = v;
      v = next;
    }
    if (pc.vertices.front() > pc.vertices.back())
      std::reverse(pc.vertices.begin(), pc.vertices.end());
    out.push_back(std::move(pc));
  }
  return out;
}

/// d(v) >= lambda - p - i + 1 (the "at least" variant).
inline bool is_i_major(const Tree& t, int v, int i, int p, int lambda) {
  return t.degree(v) >= lambda - p - i + 1;
}

inline bool is_i_major_exact(const Tree& t, int v, int i, int p, int lambda) {
  return t.degree(v) == lambda - p - i + 1;
}

}  // namespace lambdatree
