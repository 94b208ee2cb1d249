#pragma once

#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delta_table.hpp"
#include "error.hpp"
#include "labeling.hpp"
#include "tree.hpp"

namespace lambdatree {

inline int oracle_cap() {
  if (const char* s = std::getenv("LAMBDATREE_ORACLE_CAP")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v > 0) return static_cast<int>(v);
  }
  return 15;
}

namespace detail {

/// Backtracking over vertices listed parent-before-child. Slots with a preset
/// label are fixed; the rest try 0..lambda. Only parent, grandparent and
/// earlier siblings are already labelled when a slot is reached, so those are
/// the only constraints checked.
class LabelSearch {
 public:
  LabelSearch(std::vector<int> parent, int p, int q) : parent_(std::move(parent)), p_(p), q_(q) {
    int m = static_cast<int>(parent_.size());
    std::vector<int> last_child(m, -1);
    prev_sibling_.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      int par = parent_[i];
      if (par < 0) continue;
      prev_sibling_[i] = last_child[par];
      last_child[par] = i;
    }
  }

  /// Calls visit for each complete labeling; stops when visit returns false.
  /// Returns false iff stopped early.
  bool run(std::vector<int>& f, int lambda, const std::function<bool(const std::vector<int>&)>& visit) {
    f_ = &f;
    lambda_ = lambda;
    visit_ = &visit;
    fixed_.assign(f.size(), 0);
    for (std::size_t i = 0; i < f.size(); ++i) fixed_[i] = f[i] >= 0;
    return rec(0);
  }

 private:
  bool ok(int i, int x) const {
    const auto& f = *f_;
    int par = parent_[i];
    if (par >= 0) {
      if (std::abs(f[par] - x) < p_) return false;
      int g = parent_[par];
      if (g >= 0 && std::abs(f[g] - x) < q_) return false;
    }
    for (int s = prev_sibling_[i]; s >= 0; s = prev_sibling_[s])
      if (std::abs(f[s] - x) < q_) return false;
    return true;
  }

  bool rec(int i) {
    auto& f = *f_;
    if (i == static_cast<int>(f.size())) return (*visit_)(f);
    if (fixed_[i]) return ok(i, f[i]) ? rec(i + 1) : true;
    for (int x = 0; x <= lambda_; ++x) {
      if (!ok(i, x)) continue;
      f[i] = x;
      if (!rec(i + 1)) return false;
    }
    f[i] = -1;
    return true;
  }

  std::vector<int> parent_;
  std::vector<int> prev_sibling_;
  int p_, q_;
  std::vector<int>* f_ = nullptr;
  int lambda_ = 0;
  const std::function<bool(const std::vector<int>&)>* visit_ = nullptr;
  std::vector<char> fixed_;
};

}  // namespace detail

/// Enumerates every valid L(p,q)-labeling with labels in 0..lambda (BFS order from the lowest leaf).
inline void for_each_labeling(const Tree& t, int p, int q, int lambda,
                              const std::function<bool(const Labeling&)>& visit) {
  RootedTree rt = root_at_leaf(t);
  const auto& order = rt.order();
  int n = t.size();
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  std::vector<int> parent(n, -1);
  for (int i = 0; i < n; ++i)
    if (rt.parent(order[i]) >= 0) parent[i] = pos[rt.parent(order[i])];
  detail::LabelSearch search(parent, p, q);
  std::vector<int> f(n, -1);
  Labeling out;
  out.labels.resize(n);
  search.run(f, lambda, [&](const std::vector<int>& g) {
    for (int i = 0; i < n; ++i) out.labels[order[i]] = g[i];
    return visit(out);
  });
}

inline std::optional<Labeling> brute_force_labeling(const Tree& t, int p, int q, int lambda) {
  std::optional<Labeling> found;
  for_each_labeling(t, p, q, lambda, [&](const Labeling& f) {
    found = f;
    return false;
  });
  return found;
}

struct OracleResult {
  int lambda = 0;
  Labeling witness;
};

/// Exact minimum span by exhaustive search. Throws PreconditionError above the cap.
inline OracleResult brute_force_lambda(const Tree& t, int p, int q, int cap = -1) {
  if (cap < 0) cap = oracle_cap();
  if (t.size() > cap)
    throw PreconditionError("oracle limited to " + std::to_string(cap) + " vertices, got " +
                            std::to_string(t.size()));
  if (q < 1 || p < q) throw PreconditionError("oracle expects p >= q >= 1");
  if (t.size() == 1) return {0, Labeling{{0}}};
  int lo = q == 1 ? lambda_bounds(t, p).lower : p;
  for (int lam = lo;; ++lam) {
    if (auto f = brute_force_labeling(t, p, q, lam)) return {lam, *f};
  }
}

/// Exhaustive delta table of T(v) hung from a virtual parent: entry (a,b) is 1
/// iff some labeling of T(v) plus the parent has f(parent)=a and f(v)=b.
inline FullTable brute_force_delta(const RootedTree& rt, int v, int p, int lambda, int cap = 8) {
  if (rt.subtree_size(v) > cap)
    throw PreconditionError("delta oracle limited to subtrees of " + std::to_string(cap) + " vertices");
  // slot 0 = virtual parent, slot 1 = v, then T(v) in BFS order
  std::vector<int> verts{-1, v};
  std::vector<int> parent{-1, 0};
  for (std::size_t i = 1; i < verts.size(); ++i)
    for (int w : rt.children(verts[i])) {
      verts.push_back(w);
      parent.push_back(static_cast<int>(i));
    }
  detail::LabelSearch search(parent, p, 1);
  FullTable d(lambda + 1, std::vector<char>(lambda + 1, 0));
  std::vector<int> f(verts.size());
  for (int a = 0; a <= lambda; ++a)
    for (int b = 0; b <= lambda; ++b) {
      if (std::abs(a - b) < p) continue;
      std::fill(f.begin(), f.end(), -1);
      f[0] = a;
      f[1] = b;
      bool found = false;
      search.run(f, lambda, [&](const std::vector<int>&) {
        found = true;
        return false;
      });
      d[a][b] = found ? 1 : 0;
    }
  return d;
}

}  // namespace lambdatree
