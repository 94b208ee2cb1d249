#pragma once

#include <cstdint>
#include <vector>

#include "delta_table.hpp"
#include "error.hpp"
#include "preprocess.hpp"
#include "tree.hpp"

namespace lambdatree {

enum class VClass : std::uint8_t { v1 = 1, v2, v3, v4, v5 };

/// Thresholds of the vertex partition; negative values select the defaults
/// Delta^5, (Delta-19)^4, Delta(Delta-19) and the band level h_M.
struct PartitionConfig {
  long long vm_cap = -1;
  long long vm2_cap = -1;
  long long v45_split = -1;
  int band_level = -1;
  bool check_preprocessed = true;
};

struct Partition {
  std::vector<VClass> cls;
  std::vector<char> in_vm;    // inside some maximal small subtree
  std::vector<char> vm_head;  // root of such a subtree
  std::vector<char> vm1, vm2; // heads split by size
  std::vector<char> vl, vq;
  std::vector<int> d2;        // children that are not leaves
  std::vector<int> dtilde;    // children that are not small heads
  std::vector<int> w_star;    // the unique non-small child for V3..V5, else -1
  long long vm_cap = 0, vm2_cap = 0, v45_split = 0;
  int band_level = 0;
  long long count[6] = {0, 0, 0, 0, 0, 0};

  long long vm1_count() const {
    long long c = 0;
    for (char x : vm1) c += x;
    return c;
  }
};

namespace detail {

inline long long sat_ipow(long long base, int e) {
  if (base <= 0) return 0;
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (static_cast<long long>(1) << 62) / base) return static_cast<long long>(1) << 62;
    r *= base;
  }
  return r;
}

}  // namespace detail

inline PartitionConfig resolve_partition_config(PartitionConfig cfg, int max_degree, int p, int lambda) {
  const long long d = max_degree;
  if (cfg.vm_cap < 0) cfg.vm_cap = detail::sat_ipow(d, 5);
  if (cfg.vm2_cap < 0) cfg.vm2_cap = detail::sat_ipow(d - 19, 4);
  if (cfg.v45_split < 0) cfg.v45_split = d > 19 ? d * (d - 19) : 0;
  if (cfg.band_level < 0) {
    bool stock = p == 2 && lambda == max_degree + 1 && cfg.vm2_cap == detail::sat_ipow(d - 19, 4);
    cfg.band_level = stock ? 8 : level_bound(std::max<long long>(1, cfg.vm2_cap - 1), lambda, p);
  }
  return cfg;
}

/// Tags every vertex with its class. The root gets a tag too but its table is never needed.
inline Partition partition_vertices(const RootedTree& rt, int p, int lambda, PartitionConfig cfg = {}) {
  const Tree& t = rt.base();
  const int n = rt.size();
  cfg = resolve_partition_config(cfg, t.max_degree(), p, lambda);
  if (cfg.check_preprocessed && n > 2) {
    const int thr = leaf_removal_threshold(p, lambda);
    for (int v = 0; v < n; ++v)
      if (t.degree(v) == 1 && t.degree(t.neighbors(v)[0]) < thr)
        throw PreconditionError("leaf " + std::to_string(v) + " hangs off a low-degree vertex; preprocess the tree first");
  }
  Partition part;
  part.vm_cap = cfg.vm_cap;
  part.vm2_cap = cfg.vm2_cap;
  part.v45_split = cfg.v45_split;
  part.band_level = cfg.band_level;
  part.cls.assign(n, VClass::v2);
  part.in_vm.assign(n, 0);
  part.vm_head.assign(n, 0);
  part.vm1.assign(n, 0);
  part.vm2.assign(n, 0);
  part.vl.assign(n, 0);
  part.vq.assign(n, 0);
  part.d2.assign(n, 0);
  part.dtilde.assign(n, 0);
  part.w_star.assign(n, -1);

  for (int v : rt.order()) {
    long long sz = rt.subtree_size(v);
    int par = rt.parent(v);
    if (par >= 0 && part.in_vm[par]) {
      part.in_vm[v] = 1;
    } else if (sz <= cfg.vm_cap && (par < 0 || rt.subtree_size(par) > cfg.vm_cap)) {
      part.in_vm[v] = part.vm_head[v] = 1;
      (sz >= cfg.vm2_cap ? part.vm1 : part.vm2)[v] = 1;
    }
    part.vl[v] = rt.child_count(v) == 0 && par >= 0;
  }
  for (int v = 0; v < n; ++v) {
    bool all_leaves = rt.child_count(v) > 0;
    for (int w : rt.children(v)) {
      if (rt.child_count(w) != 0) {
        ++part.d2[v];
        all_leaves = false;
      }
      if (!part.vm2[w]) ++part.dtilde[v];
    }
    part.vq[v] = all_leaves && t.degree(v) == lambda - p + 1;
  }
  for (int v = 0; v < n; ++v) {
    VClass c;
    if (part.in_vm[v]) {
      c = VClass::v1;
    } else if (part.dtilde[v] != 1) {
      c = VClass::v2;
    } else {
      long long heavy = 0;
      for (int w : rt.children(v)) {
        if (!part.vm2[w]) part.w_star[v] = w;
        else if (rt.child_count(w) != 0) heavy += rt.subtree_size(w);
      }
      c = heavy == 0 ? VClass::v3 : (heavy <= cfg.v45_split ? VClass::v4 : VClass::v5);
    }
    part.cls[v] = c;
    ++part.count[static_cast<int>(c)];
  }
  return part;
}

}  // namespace lambdatree
