#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <span>
#include <vector>

#include "delta_table.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "matching.hpp"
#include "tree.hpp"

namespace lambdatree {

struct EngineStats {
  long long tables = 0;
  long long flows = 0;
  long long matchings = 0;
  long long vq_base = 0;
  long long v3_step[3] = {0, 0, 0};  // >= 2 feasible c, exactly one, none
  long long v4_reject = 0;
  long long v4_case[3] = {0, 0, 0};  // >= 2 feasible band labels for w*, exactly one, none
  long long v4_fallback = 0;
  long long v5_fact1 = 0;
  long long v5_fact2 = 0;
};

/// Child tables indexed by vertex; every leaf shares one table.
class TableStore {
 public:
  TableStore(const RootedTree& rt, DeltaTable leaf) : rt_(&rt), leaf_(std::move(leaf)), own_(rt.size()) {}

  bool is_leaf(int v) const { return rt_->child_count(v) == 0; }
  const DeltaTable& get(int v) const { return is_leaf(v) ? leaf_ : own_[v]; }
  void set(int v, DeltaTable t) { own_[v] = std::move(t); }

 private:
  const RootedTree* rt_;
  DeltaTable leaf_;
  std::vector<DeltaTable> own_;
};

inline DeltaTable leaf_delta(int p, int lambda, int level) {
  DeltaTable t(lambda, p, level);
  for (int i = 0; i < t.classes(); ++i)
    for (int j = 0; j < t.classes(); ++j) t.set_cell(i, j, true);
  return t;
}

/// Concrete labels standing for a class pair; band members are picked far apart.
inline std::pair<int, int> representative_pair(const DeltaTable& t, int ka, int kb) {
  int h = t.level(), lambda = t.lambda();
  bool ba = t.is_bundle(ka), bb = t.is_bundle(kb);
  if (ba && bb) return {lambda - h, h};
  if (ba) {
    int b = t.class_lo(kb);
    return {b < h ? lambda - h : h, b};
  }
  if (bb) {
    int a = t.class_lo(ka);
    return {a, a < h ? lambda - h : h};
  }
  return {t.class_lo(ka), t.class_lo(kb)};
}

template <class F>
void fill_by_pairs(DeltaTable& t, F&& value) {
  for (int ka = 0; ka < t.classes(); ++ka)
    for (int kb = 0; kb < t.classes(); ++kb) {
      auto [a, b] = representative_pair(t, ka, kb);
      t.set_cell(ka, kb, std::abs(a - b) >= t.p() && value(a, b));
    }
}

/// Base case for a degree-(lambda-1) vertex whose children are all leaves (p = 2):
/// the vertex must take 0 or lambda.
inline DeltaTable vq_base_delta(int lambda, int level = -1) {
  DeltaTable t(lambda, 2, level);
  fill_by_pairs(t, [&](int a, int b) {
    return (b == 0 && a != 0 && a != 1) || (b == lambda && a != lambda - 1 && a != lambda);
  });
  return t;
}

/// Flow network N(u,v,-,b): children (non-leaves one node each, leaves one
/// shared node) on the left, labels 0..h-1 and lambda-h+1..lambda one node
/// each, the band L_h as one node with capacity |L_h minus the window of b|.
class AssignmentNetwork {
 public:
  struct RowQuery {
    int lambda = 0, p = 1;
    int level = -1;  // band level; no band when negative or empty
    int b = 0;
    int excluded = -1;  // label removed from the label side (the parent label)
  };

  void build(const RowQuery& query, std::span<const int> children, const TableStore& tables) {
    query_ = query;
    const int lambda = query.lambda, p = query.p, b = query.b;
    band_ = query.level >= 0 && query.level <= lambda - query.level;
    int h = band_ ? query.level : 0;
    net_.reset(2);
    label_node_.assign(lambda + 1, -1);
    band_node_ = -1;
    band_rep_ = -1;
    auto near_b = [&](int c) { return std::abs(c - b) < p; };
    for (int c = 0; c <= lambda; ++c) {
      if (band_ && c >= h && c <= lambda - h) continue;
      if (near_b(c) || c == query.excluded) continue;
      label_node_[c] = net_.add_node();
      net_.add_arc(label_node_[c], 1, 1);
    }
    if (band_) {
      std::int64_t cap = 0;
      for (int c = h; c <= lambda - h; ++c)
        if (!near_b(c)) {
          if (band_rep_ < 0) band_rep_ = c;
          if (c != query.excluded) ++cap;
        }
      if (band_rep_ >= 0) {
        band_node_ = net_.add_node();
        net_.add_arc(band_node_, 1, cap);
      }
    }
    child_node_.clear();
    leaf_node_ = -1;
    leaves_ = 0;
    demand_ = 0;
    for (int w : children) {
      if (tables.is_leaf(w)) {
        ++leaves_;
        continue;
      }
      int x = net_.add_node();
      child_node_.push_back({w, x});
      net_.add_arc(0, x, 1);
      ++demand_;
      const DeltaTable& tw = tables.get(w);
      for (int c = 0; c <= lambda; ++c)
        if (label_node_[c] >= 0 && tw.at(b, c)) net_.add_arc(x, label_node_[c], 1);
      if (band_node_ >= 0 && tw.at(b, band_rep_)) net_.add_arc(x, band_node_, 1);
    }
    if (leaves_ > 0) {
      leaf_node_ = net_.add_node();
      net_.add_arc(0, leaf_node_, leaves_);
      demand_ += leaves_;
      for (int c = 0; c <= lambda; ++c)
        if (label_node_[c] >= 0) net_.add_arc(leaf_node_, label_node_[c], 1);
      if (band_node_ >= 0) net_.add_arc(leaf_node_, band_node_, leaves_);
    }
  }

  /// True iff every child gets a distinct admissible label.
  bool solve() {
    flow_ = net_.max_flow(0, 1);
    return flow_ == demand_;
  }

  /// Per label: can it be withheld from the children (still a full assignment)?
  /// Band members share the answer for the band node.
  std::vector<char> omittable() const {
    auto good = net_.reaches_sink(0, 1);
    std::vector<char> out(query_.lambda + 1, 0);
    for (int c = 0; c <= query_.lambda; ++c) {
      if (label_node_[c] >= 0) out[c] = good[label_node_[c]];
      else if (band_node_ >= 0 && in_band(c) && std::abs(c - query_.b) >= query_.p) out[c] = good[band_node_];
    }
    return out;
  }

  /// Concrete child labels from the current flow (requires solve() == true).
  std::vector<std::pair<int, int>> assignment(std::span<const int> children, const TableStore& tables) const {
    std::vector<std::pair<int, int>> out;
    std::vector<int> band_pool;
    if (band_node_ >= 0) {
      int h = query_.level;
      for (int c = h; c <= query_.lambda - h; ++c)
        if (std::abs(c - query_.b) >= query_.p && c != query_.excluded) band_pool.push_back(c);
    }
    std::size_t next_band = 0;
    auto take = [&](int node) {
      if (node == band_node_) {
        if (next_band >= band_pool.size()) throw InvariantViolation("band over-assigned");
        return band_pool[next_band++];
      }
      for (int c = 0; c <= query_.lambda; ++c)
        if (label_node_[c] == node) return c;
      throw InvariantViolation("flow reached an unknown node");
    };
    for (auto [w, x] : child_node_) {
      int label = -1;
      net_.for_each_out(x, [&](int e) {
        if (label < 0 && net_.flow(e) > 0) label = take(net_.head(e));
      });
      if (label < 0) throw InvariantViolation("child left unassigned");
      out.emplace_back(w, label);
    }
    if (leaf_node_ >= 0) {
      std::vector<int> labels;
      net_.for_each_out(leaf_node_, [&](int e) {
        for (std::int64_t k = 0; k < net_.flow(e); ++k) labels.push_back(take(net_.head(e)));
      });
      std::size_t i = 0;
      for (int w : children)
        if (tables.is_leaf(w)) {
          if (i >= labels.size()) throw InvariantViolation("leaf left unassigned");
          out.emplace_back(w, labels[i++]);
        }
    }
    return out;
  }

  long long demand() const { return demand_; }

 private:
  bool in_band(int c) const { return band_ && c >= query_.level && c <= query_.lambda - query_.level; }

  RowQuery query_;
  FlowNetwork net_;
  bool band_ = false;
  std::vector<int> label_node_;
  int band_node_ = -1;
  int band_rep_ = -1;
  std::vector<std::pair<int, int>> child_node_;
  int leaf_node_ = -1;
  long long leaves_ = 0;
  long long demand_ = 0;
  std::int64_t flow_ = 0;
};

/// Row delta((u,v),(*,b)) from one max flow on N(u,v,-,b): zero unless all
/// children fit, otherwise 1 exactly at labels reachable from slack labels.
inline std::vector<char> flow_delta(const RootedTree& rt, int v, int b, const TableStore& tables, int level, int p,
                                    int lambda, EngineStats* stats = nullptr) {
  static thread_local AssignmentNetwork net;
  net.build({lambda, p, level, b, -1}, rt.children(v), tables);
  if (stats) ++stats->flows;
  std::vector<char> row(lambda + 1, 0);
  if (!net.solve()) return row;
  row = net.omittable();
  for (int a = 0; a <= lambda; ++a)
    if (std::abs(a - b) < p) row[a] = 0;
  return row;
}

/// Full table by flow rows, stored at `level`. Only rows with b in the lower
/// half are solved; the rest follow from delta(a,b) = delta(lambda-a, lambda-b).
inline DeltaTable flow_delta_table(const RootedTree& rt, int v, const TableStore& tables, int level, int p,
                                   int lambda, EngineStats* stats = nullptr) {
  DeltaTable t(lambda, p, level);
  const int h = t.level();
  const bool band = t.has_bundle();
  std::map<int, std::vector<char>> rows;
  auto canonical = [&](int b) { return band ? (b <= h) : (2 * b <= lambda); };
  auto row = [&](int b) -> const std::vector<char>& {
    auto it = rows.find(b);
    if (it == rows.end()) it = rows.emplace(b, flow_delta(rt, v, b, tables, level, p, lambda, stats)).first;
    return it->second;
  };
  fill_by_pairs(t, [&](int a, int b) {
    if (canonical(b)) return row(b)[a] != 0;
    return row(lambda - b)[lambda - a] != 0;
  });
  if (stats) ++stats->tables;
  return t;
}

/// Row delta((u,v),(*,b)) from a maximum matching of G(u,v,-,b) and one
/// alternating search (every label is its own right vertex).
inline std::vector<char> maintain_matching_delta(const RootedTree& rt, int v, int b, const TableStore& tables, int p,
                                                 int lambda, EngineStats* stats = nullptr) {
  auto kids = rt.children(v);
  BipartiteGraph g(static_cast<int>(kids.size()), lambda + 1);
  for (int i = 0; i < static_cast<int>(kids.size()); ++i) {
    const DeltaTable& tw = tables.get(kids[i]);
    for (int c = 0; c <= lambda; ++c)
      if (std::abs(c - b) >= p && tw.at(b, c)) g.add_edge(i, c);
  }
  Matching m = max_matching(g);
  if (stats) ++stats->matchings;
  std::vector<char> row(lambda + 1, 0);
  if (m.size < static_cast<int>(kids.size())) return row;
  auto reach = alternating_reachable(g, m);
  for (int a = 0; a <= lambda; ++a) row[a] = std::abs(a - b) >= p && reach[a];
  return row;
}

/// Single entry by a matching on G(u,v,a,b) (labels a and the window of b removed).
inline bool matching_pair_delta(const RootedTree& rt, int v, int a, int b, const TableStore& tables, int p,
                                int lambda, EngineStats* stats = nullptr) {
  if (std::abs(a - b) < p) return false;
  auto kids = rt.children(v);
  BipartiteGraph g(static_cast<int>(kids.size()), lambda + 1);
  for (int i = 0; i < static_cast<int>(kids.size()); ++i) {
    const DeltaTable& tw = tables.get(kids[i]);
    for (int c = 0; c <= lambda; ++c)
      if (c != a && std::abs(c - b) >= p && tw.at(b, c)) g.add_edge(i, c);
  }
  if (stats) ++stats->matchings;
  return max_matching(g).size == static_cast<int>(kids.size());
}

/// Context for the single-heavy-child routines: w* plus the other children
/// (which all come from small "generalized leaf" subtrees).
struct HeavyChildContext {
  int w_star = -1;
  std::vector<int> light;  // non-leaf children other than w*
  int leaves = 0;
  int band_level = 8;  // h_M: the band L_h over which light children are all-or-nothing
};

namespace detail {

inline HeavyChildContext heavy_context(const RootedTree& rt, int v, int w_star, const TableStore& tables,
                                       int band_level) {
  HeavyChildContext ctx;
  ctx.w_star = w_star;
  ctx.band_level = band_level;
  bool found = false;
  for (int w : rt.children(v)) {
    if (w == w_star) {
      found = true;
      continue;
    }
    if (tables.is_leaf(w)) ++ctx.leaves;
    else ctx.light.push_back(w);
  }
  if (!found) throw InvariantViolation("w* is not a child of v");
  return ctx;
}

/// Labels of the band L_h outside the window of b.
inline std::vector<int> band_labels(int h, int b, int p, int lambda) {
  std::vector<int> out;
  for (int c = h; c <= lambda - h; ++c)
    if (std::abs(c - b) >= p) out.push_back(c);
  return out;
}

}  // namespace detail

/// Single heavy child w*, all other children leaves: delta(a,b)=1 iff w* has a
/// feasible label other than a and enough labels remain for the k leaves.
inline DeltaTable compute_delta_v3(const RootedTree& rt, int v, int w_star, const TableStore& tables, int level, int p,
                                   int lambda, EngineStats* stats = nullptr) {
  auto ctx = detail::heavy_context(rt, v, w_star, tables, 0);
  if (!ctx.light.empty()) throw InvariantViolation("single-heavy-child routine called on a vertex with other non-leaf children");
  const DeltaTable& tw = tables.get(w_star);
  DeltaTable t(lambda, p, level);
  std::map<int, std::vector<int>> feasible;  // b -> labels c with delta_w*(b,c)=1
  auto feas = [&](int b) -> const std::vector<int>& {
    auto it = feasible.find(b);
    if (it != feasible.end()) return it->second;
    std::vector<int> s;
    for (int c = 0; c <= lambda; ++c)
      if (tw.at(b, c)) s.push_back(c);
    if (stats) ++stats->v3_step[s.size() >= 2 ? 0 : (s.size() == 1 ? 1 : 2)];
    return feasible.emplace(b, std::move(s)).first->second;
  };
  fill_by_pairs(t, [&](int a, int b) {
    const auto& s = feas(b);
    int avail = 0;
    for (int c = 0; c <= lambda; ++c) avail += std::abs(c - b) >= p;
    if (avail - 2 < ctx.leaves) return false;
    return s.size() >= 2 || (s.size() == 1 && s[0] != a);
  });
  if (stats) ++stats->tables;
  return t;
}

/// Heavy child w* plus light non-leaf children of total size at most the
/// split bound. Light children are either fully flexible on the band L_h
/// (C1) or cannot use it at all (C2); C1 and the leaves are absorbed by
/// counting, leaving a constant-size flow for w* and C2.
inline DeltaTable compute_delta_v4(const RootedTree& rt, int v, int w_star, const TableStore& tables, int level,
                                   int band_level, int p, int lambda, EngineStats* stats = nullptr) {
  auto ctx = detail::heavy_context(rt, v, w_star, tables, band_level);
  const int H = band_level;
  const DeltaTable& tw = tables.get(w_star);
  const long long dprime = rt.child_count(v);
  DeltaTable t(lambda, p, level);

  struct PerB {
    bool fallback = false;
    bool reject = false;
    std::vector<int> c1, c2;
    std::vector<int> band;       // L_H minus window of b
    std::vector<char> w_band;    // w* accepts band[i]
    std::vector<char> row;       // general row when falling back
  };
  std::map<int, PerB> cache;
  FlowNetwork net;

  auto per_b = [&](int b) -> PerB& {
    auto it = cache.find(b);
    if (it != cache.end()) return it->second;
    PerB pb;
    pb.band = (H >= 0 && H <= lambda - H) ? detail::band_labels(H, b, p, lambda) : std::vector<int>{};
    if (pb.band.empty()) {
      pb.fallback = true;
    } else {
      for (int w : ctx.light) {
        const DeltaTable& tc = tables.get(w);
        int yes = 0;
        for (int c : pb.band) yes += tc.at(b, c);
        if (yes == static_cast<int>(pb.band.size())) pb.c1.push_back(w);
        else if (yes == 0) pb.c2.push_back(w);
        else throw InvariantViolation("light child is neither flexible nor inflexible on the band");
      }
      int wcount = 0;
      for (int c : pb.band) {
        pb.w_band.push_back(tw.at(b, c));
        wcount += pb.w_band.back();
      }
      if (static_cast<int>(pb.c2.size()) > 2 * H) {
        pb.reject = true;
        if (stats) ++stats->v4_reject;
      } else if (stats) {
        ++stats->v4_case[wcount >= 2 ? 0 : (wcount == 1 ? 1 : 2)];
      }
    }
    return cache.emplace(b, std::move(pb)).first->second;
  };

  auto general = [&](PerB& pb, int a, int b) {
    if (pb.row.empty()) {
      pb.row = flow_delta(rt, v, b, tables, level, p, lambda, stats);
      if (stats) ++stats->v4_fallback;
    }
    return pb.row[a] != 0;
  };

  fill_by_pairs(t, [&](int a, int b) {
    PerB& pb = per_b(b);
    if (pb.fallback) return general(pb, a, b);
    if (pb.reject) return false;
    std::vector<int> band;
    for (int c : pb.band)
      if (c != a) band.push_back(c);
    if (static_cast<long long>(band.size()) - 1 < static_cast<long long>(pb.c1.size())) return general(pb, a, b);
    long long avail = 0;
    for (int c = 0; c <= lambda; ++c) avail += std::abs(c - b) >= p && c != a;
    if (avail < dprime) return false;
    // w* and C2 into explicit labels plus the band node
    net.reset(2);
    std::vector<int> node(lambda + 1, -1);
    for (int c = 0; c <= lambda; ++c) {
      if ((c >= H && c <= lambda - H) || std::abs(c - b) < p || c == a) continue;
      node[c] = net.add_node();
      net.add_arc(node[c], 1, 1);
    }
    int band_node = net.add_node();
    net.add_arc(band_node, 1, static_cast<std::int64_t>(band.size()));
    int ws = net.add_node();
    net.add_arc(0, ws, 1);
    for (int c = 0; c <= lambda; ++c)
      if (node[c] >= 0 && tw.at(b, c)) net.add_arc(ws, node[c], 1);
    bool w_in_band = false;
    for (std::size_t i = 0; i < pb.band.size(); ++i)
      if (pb.w_band[i] && pb.band[i] != a) w_in_band = true;
    if (w_in_band) net.add_arc(ws, band_node, 1);
    for (int w : pb.c2) {
      int x = net.add_node();
      net.add_arc(0, x, 1);
      const DeltaTable& tc = tables.get(w);
      for (int c = 0; c <= lambda; ++c)
        if (node[c] >= 0 && tc.at(b, c)) net.add_arc(x, node[c], 1);
    }
    if (stats) ++stats->flows;
    return net.max_flow(0, 1) == 1 + static_cast<long long>(pb.c2.size());
  });
  if (stats) ++stats->tables;
  return t;
}

/// Heavy child w* plus many light children. Light children (and leaves) are
/// grouped into types by their admissible-label vector over
/// (L_0 - L_H) and one band representative; each (a,b) is a max flow on the
/// type network N'(u,v,a,b). For band labels a only one or two candidates
/// are solved: all band labels behave alike unless w* has exactly one band
/// label c*, in which case c* and one other band label are solved.
inline DeltaTable compute_delta_v5(const RootedTree& rt, int v, int w_star, const TableStore& tables, int level,
                                   int band_level, int p, int lambda, EngineStats* stats = nullptr) {
  auto ctx = detail::heavy_context(rt, v, w_star, tables, band_level);
  const int H = band_level;
  if (!(H >= 0 && H <= lambda - H)) {
    if (stats) ++stats->v4_fallback;
    return flow_delta_table(rt, v, tables, level, p, lambda, stats);
  }
  const DeltaTable& tw = tables.get(w_star);
  const long long dprime = rt.child_count(v);
  DeltaTable t(lambda, p, level);
  auto in_band = [&](int c) { return c >= H && c <= lambda - H; };

  struct PerB {
    std::vector<int> band;
    std::vector<int> w_band;                      // band labels w* accepts
    std::map<std::vector<char>, long long> types;  // vector over labels 0..lambda outside band, then band bit
    std::map<int, bool> band_value;               // candidate a -> value
  };
  std::map<int, PerB> cache;
  FlowNetwork net;

  auto leaf_type = [&](int b) {
    std::vector<char> vec;
    for (int c = 0; c <= lambda; ++c)
      if (!in_band(c)) vec.push_back(std::abs(c - b) >= p);
    vec.push_back(1);
    return vec;
  };

  auto solve = [&](PerB& pb, int a, int b) {
    net.reset(2);
    std::vector<int> node(lambda + 1, -1);
    std::vector<int> outside;
    for (int c = 0; c <= lambda; ++c)
      if (!in_band(c)) outside.push_back(c);
    for (int c : outside) {
      if (std::abs(c - b) < p || c == a) continue;
      node[c] = net.add_node();
      net.add_arc(node[c], 1, 1);
    }
    std::int64_t band_cap = 0;
    for (int c : pb.band) band_cap += c != a;
    int band_node = net.add_node();
    net.add_arc(band_node, 1, band_cap);
    int ws = net.add_node();
    net.add_arc(0, ws, 1);
    for (int c : outside)
      if (node[c] >= 0 && tw.at(b, c)) net.add_arc(ws, node[c], 1);
    bool w_in_band = false;
    for (int c : pb.w_band) w_in_band = w_in_band || c != a;
    if (w_in_band) net.add_arc(ws, band_node, 1);
    for (const auto& [vec, mult] : pb.types) {
      if (mult == 0) continue;
      int x = net.add_node();
      net.add_arc(0, x, mult);
      for (std::size_t i = 0; i < outside.size(); ++i)
        if (vec[i] && node[outside[i]] >= 0) net.add_arc(x, node[outside[i]], mult);
      if (vec.back()) net.add_arc(x, band_node, mult);
    }
    if (stats) ++stats->flows;
    return net.max_flow(0, 1) == dprime;
  };

  auto prepare = [&](int b) -> PerB& {
    auto it = cache.find(b);
    if (it != cache.end()) return it->second;
    PerB pb;
    pb.band = detail::band_labels(H, b, p, lambda);
    for (int c : pb.band)
      if (tw.at(b, c)) pb.w_band.push_back(c);
    for (int w : ctx.light) {
      const DeltaTable& tc = tables.get(w);
      std::vector<char> vec;
      for (int c = 0; c <= lambda; ++c)
        if (!in_band(c)) vec.push_back(tc.at(b, c));
      int yes = 0;
      for (int c : pb.band) yes += tc.at(b, c);
      if (yes != 0 && yes != static_cast<int>(pb.band.size()))
        throw InvariantViolation("light child is neither flexible nor inflexible on the band");
      vec.push_back(yes > 0);
      pb.types[vec] += 1;
    }
    if (ctx.leaves > 0) pb.types[leaf_type(b)] += ctx.leaves;
    if (stats) ++(pb.w_band.size() == 1 ? stats->v5_fact2 : stats->v5_fact1);
    return cache.emplace(b, std::move(pb)).first->second;
  };

  fill_by_pairs(t, [&](int a, int b) {
    PerB& pb = prepare(b);
    if (!in_band(a)) return solve(pb, a, b);
    if (pb.band.empty()) return false;
    // candidate standing for a: c* itself, or one band label other than c*
    int cand;
    if (pb.w_band.size() == 1 && a == pb.w_band[0]) {
      cand = a;
    } else {
      cand = -1;
      for (int c : pb.band)
        if (pb.w_band.size() != 1 || c != pb.w_band[0]) {
          cand = c;
          break;
        }
      if (cand < 0) cand = a;
    }
    auto it = pb.band_value.find(cand);
    if (it != pb.band_value.end()) return it->second;
    bool val = solve(pb, cand, b);
    pb.band_value[cand] = val;
    return val;
  });
  if (stats) ++stats->tables;
  return t;
}

}  // namespace lambdatree
