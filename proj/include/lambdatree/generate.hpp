#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "tree.hpp"

namespace lambdatree {

enum class TreeKind { path, star, caterpillar, broom, random, v45_stress };

inline TreeKind parse_tree_kind(const std::string& s) {
  if (s == "path") return TreeKind::path;
  if (s == "star") return TreeKind::star;
  if (s == "caterpillar") return TreeKind::caterpillar;
  if (s == "broom") return TreeKind::broom;
  if (s == "random") return TreeKind::random;
  if (s == "v45_stress") return TreeKind::v45_stress;
  throw PreconditionError("unknown tree kind '" + s + "'");
}

/// Decodes a Prüfer sequence over vertices 0..n-1 (length n-2) in linear time.
inline Tree prufer_decode(const std::vector<int>& seq, int n) {
  if (n == 1) return Tree(1, {});
  if (static_cast<int>(seq.size()) != n - 2) throw PreconditionError("Prüfer sequence length must be n-2");
  std::vector<int> deg(n, 1);
  for (int x : seq) {
    if (x < 0 || x >= n) throw PreconditionError("Prüfer entry out of range");
    ++deg[x];
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  int ptr = 0;
  while (deg[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int x : seq) {
    edges.emplace_back(leaf, x);
    if (--deg[x] == 1 && x < ptr) {
      leaf = x;
    } else {
      ++ptr;
      while (deg[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  int last = n - 1;
  edges.emplace_back(leaf, last);
  return Tree(n, std::move(edges));
}

inline Tree path_tree(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Tree(n, std::move(e));
}

inline Tree star_tree(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Tree(leaves + 1, std::move(e));
}

/// Uniform random labeled tree.
inline Tree random_tree(int n, std::uint64_t seed) {
  if (n <= 2) return path_tree(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> seq(n - 2);
  for (int& x : seq) x = pick(rng);
  return prufer_decode(seq, n);
}

/// Random labeled tree with maximum degree exactly `delta`: one vertex gets delta-1
/// Prüfer occurrences, every other vertex is capped at delta-2.
inline Tree random_tree_max_degree(int n, int delta, std::uint64_t seed) {
  if (delta < 1 || n < delta + 1) throw PreconditionError("random tree needs n >= delta + 1");
  if (delta == 1) {
    if (n != 2) throw PreconditionError("delta = 1 forces n = 2");
    return path_tree(2);
  }
  std::mt19937_64 rng(seed);
  if (delta == 2) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(perm[i], perm[i + 1]);
    return Tree(n, std::move(e));
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  int hub = pick(rng);
  std::vector<int> seq;
  seq.reserve(n - 2);
  for (int i = 0; i < delta - 1; ++i) seq.push_back(hub);
  std::vector<int> count(n, 0);
  while (static_cast<int>(seq.size()) < n - 2) {
    int x = pick(rng);
    if (x == hub || count[x] >= delta - 2) continue;
    ++count[x];
    seq.push_back(x);
  }
  std::shuffle(seq.begin(), seq.end(), rng);
  return prufer_decode(seq, n);
}

/// Spine with legs; vertex 0 has degree exactly delta.
inline Tree caterpillar_tree(int n, int delta, std::uint64_t seed) {
  if (delta < 2 || n < delta + 1) throw PreconditionError("caterpillar needs delta >= 2 and n >= delta + 1");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> e;
  std::vector<int> deg(n, 0);
  std::vector<int> spine{0};
  auto link = [&](int u, int v) {
    e.emplace_back(u, v);
    ++deg[u];
    ++deg[v];
  };
  int next = 1;
  // vertex 0: one spine neighbour (if any room remains) plus legs
  int legs0 = (n - 1 > delta) ? delta - 1 : delta;
  for (int i = 0; i < legs0; ++i) link(0, next++);
  if (next < n) {
    link(0, next);
    spine.push_back(next++);
  }
  std::bernoulli_distribution extend(0.3);
  while (next < n) {
    int tail = spine.back();
    bool room = deg[tail] < delta - 1 || next == n - 1;
    if (!room || extend(rng)) {
      if (deg[tail] >= delta) break;
      link(tail, next);
      spine.push_back(next++);
    } else {
      link(tail, next++);
    }
  }
  return Tree(n, std::move(e));
}

/// Path 0-1-...-m with delta-1 extra leaves on m, so deg(m) = delta and n = m + delta.
inline Tree broom_tree(int n, int delta) {
  if (delta < 2 || n < delta + 1) throw PreconditionError("broom needs delta >= 2 and n >= delta + 1");
  int m = n - delta;
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < m; ++i) e.emplace_back(i, i + 1);
  for (int k = 1; k < delta; ++k) e.emplace_back(m, m + k);
  return Tree(n, std::move(e));
}

/// Spine of degree-delta vertices; each carries either a light load of
/// "bush" children (a degree-delta vertex with delta-1 leaves) or a heavy
/// load, alternating, so the summed non-leaf child subtree size falls on both
/// sides of delta*(delta-19). Leftover vertices form a tail path.
inline Tree v45_stress_tree(int n, int delta, std::uint64_t seed) {
  if (delta < 3 || n < 2 * delta + 2) throw PreconditionError("v45_stress needs delta >= 3 and n >= 2*delta + 2");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution use_flex(0.5);
  std::vector<std::pair<int, int>> e;
  int next = 0;
  auto fresh = [&] { return next++; };
  auto add_bush = [&](int parent) {
    int m = fresh();
    e.emplace_back(parent, m);
    for (int i = 0; i < delta - 1; ++i) e.emplace_back(m, fresh());
  };
  int slots = delta - 2;
  int light = std::clamp(delta * (delta - 19) / (delta + 1), 1, slots);
  int root = fresh();
  int leaf0 = fresh();
  e.emplace_back(root, leaf0);
  int spine = root;
  for (int i = 0;; ++i) {
    int want = (i % 2 == 0) ? light : slots;
    int cost_max = 1 + want * (delta + 1) + (slots - want);
    if (n - next < cost_max + 1) break;
    int s = fresh();
    e.emplace_back(spine, s);
    for (int k = 0; k < want; ++k) {
      if (use_flex(rng)) {
        int w = fresh();
        e.emplace_back(s, w);
        add_bush(w);
      } else {
        add_bush(s);
      }
    }
    for (int k = want; k < slots; ++k) e.emplace_back(s, fresh());
    spine = s;
  }
  while (next < n) {
    int v = fresh();
    e.emplace_back(spine, v);
    spine = v;
  }
  return Tree(n, std::move(e));
}

inline Tree generate_tree(TreeKind kind, int n, int delta, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("n must be positive");
  switch (kind) {
    case TreeKind::path:
      if (delta > 0 && delta != std::min(n - 1, 2)) throw PreconditionError("path has max degree min(n-1, 2)");
      return path_tree(n);
    case TreeKind::star:
      if (delta > 0 && delta != n - 1) throw PreconditionError("star needs delta = n - 1");
      return star_tree(n - 1);
    case TreeKind::caterpillar:
      return caterpillar_tree(n, delta, seed);
    case TreeKind::broom:
      return broom_tree(n, delta);
    case TreeKind::random:
      return delta > 0 ? random_tree_max_degree(n, delta, seed) : random_tree(n, seed);
    case TreeKind::v45_stress:
      return v45_stress_tree(n, delta, seed);
  }
  throw PreconditionError("unknown tree kind");
}

namespace detail {

inline std::string ahu_encode(const Tree& t, int root, int skip) {
  // iterative post-order encoding
  std::vector<int> order, parent(t.size(), -1);
  std::vector<int> stack{root};
  parent[root] = skip;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int w : t.neighbors(v))
      if (w != parent[v]) {
        parent[w] = v;
        stack.push_back(w);
      }
  }
  std::vector<std::string> code(t.size());
  std::vector<std::vector<std::string>> kids(t.size());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    std::sort(kids[v].begin(), kids[v].end());
    std::string s = "(";
    for (auto& k : kids[v]) s += k;
    s += ")";
    code[v] = std::move(s);
    if (v != root) kids[parent[v]].push_back(code[v]);
  }
  return code[root];
}

}  // namespace detail

/// Canonical string of a free tree (AHU encoding rooted at its center).
inline std::string canonical_form(const Tree& t) {
  int n = t.size();
  if (n <= 2) return std::string(n == 1 ? "()" : "(())");
  std::vector<int> deg(n);
  std::vector<int> layer;
  for (int v = 0; v < n; ++v) {
    deg[v] = t.degree(v);
    if (deg[v] == 1) layer.push_back(v);
  }
  int remaining = n;
  while (remaining > 2) {
    std::vector<int> nxt;
    remaining -= static_cast<int>(layer.size());
    for (int v : layer)
      for (int w : t.neighbors(v))
        if (--deg[w] == 1) nxt.push_back(w);
    layer = std::move(nxt);
  }
  if (layer.size() == 1) return detail::ahu_encode(t, layer[0], -1);
  std::string a = detail::ahu_encode(t, layer[0], layer[1]);
  std::string b = detail::ahu_encode(t, layer[1], layer[0]);
  return a < b ? a + b : b + a;
}

/// All non-isomorphic trees on n vertices, by leaf extension with canonical dedup.
inline std::vector<Tree> all_free_trees(int n) {
  std::vector<Tree> cur{Tree(1, {})};
  for (int k = 2; k <= n; ++k) {
    std::vector<Tree> nxt;
    std::set<std::string> seen;
    for (const Tree& t : cur)
      for (int v = 0; v < t.size(); ++v) {
        auto e = t.edges();
        e.emplace_back(v, t.size());
        Tree u(t.size() + 1, std::move(e));
        if (seen.insert(canonical_form(u)).second) nxt.push_back(std::move(u));
      }
    cur = std::move(nxt);
  }
  return cur;
}

}  // namespace lambdatree
