#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gadgets.hpp"
#include "lambdatree/lambdatree.hpp"

using namespace lambdatree;

namespace {

// table that admits (b, c) exactly for the listed pairs
DeltaTable table_of(int lambda, int p, std::initializer_list<std::pair<int, int>> ok) {
  DeltaTable t = DeltaTable::uncompressed(lambda, p);
  for (auto [b, c] : ok) t.set_cell(t.class_of(b), t.class_of(c), true);
  return t;
}

std::vector<char> row_of(const DeltaTable& t, int b) {
  std::vector<char> r(t.lambda() + 1);
  for (int a = 0; a <= t.lambda(); ++a) r[a] = t.at(a, b);
  return r;
}

}  // namespace

TEST(Matching, CompleteTwoByTwo) {
  BipartiteGraph g(2, 2);
  for (int l = 0; l < 2; ++l)
    for (int r = 0; r < 2; ++r) g.add_edge(l, r);
  EXPECT_EQ(max_matching(g).size, 2);
}

TEST(Matching, Pigeonhole) {
  BipartiteGraph g(2, 2);
  g.add_edge(0, 0);
  g.add_edge(1, 0);
  EXPECT_EQ(max_matching(g).size, 1);
}

TEST(Matching, AlternatingReach) {
  BipartiteGraph g(2, 5);
  g.add_edge(0, 0);
  g.add_edge(0, 4);
  g.add_edge(1, 0);
  Matching m = max_matching(g);
  ASSERT_EQ(m.size, 2);
  EXPECT_EQ(m.pair_of_left[0], 4);
  EXPECT_EQ(m.pair_of_left[1], 0);
  EXPECT_EQ(alternating_reachable(g, m), (std::vector<char>{0, 1, 1, 1, 0}));
}

TEST(Matching, AlternatingReachEdgeCases) {
  BipartiteGraph empty(0, 3);
  EXPECT_EQ(alternating_reachable(empty, max_matching(empty)), (std::vector<char>{1, 1, 1}));
  BipartiteGraph g(2, 3);
  for (int l = 0; l < 2; ++l)
    for (int r = 0; r < 3; ++r) g.add_edge(l, r);
  Matching m = max_matching(g);
  EXPECT_EQ(m.size, 2);
  EXPECT_EQ(alternating_reachable(g, m), (std::vector<char>{1, 1, 1}));
}

TEST(Matching, ReachableMeansOmittable) {
  std::mt19937 rng(3);
  for (int it = 0; it < 200; ++it) {
    int L = rng() % 4, R = 1 + rng() % 5;
    BipartiteGraph g(L, R);
    for (int l = 0; l < L; ++l)
      for (int r = 0; r < R; ++r)
        if (rng() % 2) g.add_edge(l, r);
    Matching m = max_matching(g);
    if (m.size < L) continue;
    auto reach = alternating_reachable(g, m);
    for (int skip = 0; skip < R; ++skip) {
      BipartiteGraph h(L, R);
      for (int l = 0; l < L; ++l)
        for (int r : g.adj(l))
          if (r != skip) h.add_edge(l, r);
      EXPECT_EQ(reach[skip] != 0, max_matching(h).size == L);
    }
  }
}

TEST(Flow, SingleArc) {
  FlowNetwork net(2);
  net.add_arc(0, 1, 3);
  EXPECT_EQ(net.max_flow(0, 1), 3);
}

TEST(Flow, Bottleneck) {
  FlowNetwork net(4);
  net.add_arc(0, 2, 1);
  net.add_arc(0, 3, 1);
  net.add_arc(2, 1, 1);
  net.add_arc(3, 1, 0);
  EXPECT_EQ(net.max_flow(0, 1), 1);
}

TEST(Flow, BundledNodeEqualsMatching) {
  // children w1 -> {0, 4}, w2 -> {0}; labels 1..3 bundled into one node
  FlowNetwork net(2);
  int w1 = net.add_node(), w2 = net.add_node();
  int l0 = net.add_node(), l4 = net.add_node(), band = net.add_node();
  net.add_arc(0, w1, 1);
  net.add_arc(0, w2, 1);
  net.add_arc(l0, 1, 1);
  net.add_arc(l4, 1, 1);
  net.add_arc(band, 1, 3);
  net.add_arc(w1, l0, 1);
  net.add_arc(w1, l4, 1);
  net.add_arc(w2, l0, 1);
  EXPECT_EQ(net.max_flow(0, 1), 2);
  EXPECT_EQ(net.residual_reachable({l0, l4, band}, 0, 1), (std::vector<int>{band}));
}

TEST(Flow, ResidualReachableEdgeCases) {
  FlowNetwork sat(2);
  int w = sat.add_node(), c = sat.add_node();
  sat.add_arc(0, w, 1);
  sat.add_arc(w, c, 1);
  sat.add_arc(c, 1, 1);
  sat.max_flow(0, 1);
  EXPECT_TRUE(sat.residual_reachable({c}, 0, 1).empty());
  FlowNetwork none(2);
  int a = none.add_node(), b = none.add_node();
  none.add_arc(a, 1, 1);
  none.add_arc(b, 1, 2);
  none.max_flow(0, 1);
  EXPECT_EQ(none.residual_reachable({a, b}, 0, 1), (std::vector<int>{a, b}));
}

TEST(LevelBound, Examples) {
  EXPECT_EQ(level_bound(17, 26, 2), 2);
  EXPECT_EQ(level_bound(18, 26, 2), 3);
  EXPECT_EQ(level_bound(1000, 26, 1), 0);
  EXPECT_LE(level_bound(1295, 26, 2), 8);
  EXPECT_EQ(level_bound(1, 26, 2), 1);
  EXPECT_EQ(level_bound(1000000, 5, 2), 3);  // no level qualifies
  EXPECT_THROW(level_bound(0, 26, 2), PreconditionError);
}

TEST(LevelBound, SatisfiesInequality) {
  for (int p = 2; p <= 3; ++p)
    for (int lambda = 6; lambda <= 40; ++lambda)
      for (long long size : {1LL, 5LL, 40LL, 700LL, 123456LL}) {
        int h = level_bound(size, lambda, p);
        if (h == (lambda + 2) / 2) continue;
        double base = lambda - 2 * h - 4 * p + 4;
        EXPECT_LT(std::pow(static_cast<double>(size), 2 * p - 2), std::pow(base, h));
        EXPECT_GE(lambda - 2 * h, 3 * p - 3);
      }
}

TEST(DeltaTable, BandClasses) {
  DeltaTable t(26, 2, 8);
  EXPECT_TRUE(t.has_bundle());
  EXPECT_EQ(t.classes(), 17);
  EXPECT_EQ(t.class_of(8), t.class_of(18));
  EXPECT_NE(t.class_of(7), t.class_of(8));
  DeltaTable none(4, 2, 3);
  EXPECT_FALSE(none.has_bundle());
  EXPECT_EQ(none.classes(), 5);
}

TEST(VqBase, DeltaFour) {
  DeltaTable t = vq_base_delta(5);
  for (int a : {2, 3, 4, 5}) EXPECT_TRUE(t.at(a, 0)) << a;
  EXPECT_FALSE(t.at(1, 0));
  EXPECT_FALSE(t.at(3, 2));
  EXPECT_TRUE(t.at(0, 5));
  EXPECT_FALSE(t.at(4, 5));
}

TEST(VqBase, MatchesOracleOnStar) {
  for (int d = 3; d <= 5; ++d) {
    std::vector<std::pair<int, int>> e{{0, 1}};
    for (int i = 2; i <= d; ++i) e.emplace_back(1, i);
    Tree host(d + 1, e);
    RootedTree rt = root_at_leaf(host);
    FullTable want = brute_force_delta(rt, 1, 2, d + 1);
    DeltaTable got = vq_base_delta(d + 1);
    for (int a = 0; a <= d + 1; ++a)
      for (int b = 0; b <= d + 1; ++b) EXPECT_EQ(got.at(a, b), want[a][b] != 0) << a << "," << b;
  }
}

TEST(MaintainMatching, BlockedRow) {
  Tree t(6, {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 5}});
  RootedTree rt = root_at_leaf(t);
  TableStore tables(rt, leaf_delta(2, 4, -1));
  tables.set(2, table_of(4, 2, {{2, 0}, {2, 4}}));
  tables.set(3, table_of(4, 2, {{2, 0}}));
  EXPECT_EQ(maintain_matching_delta(rt, 1, 2, tables, 2, 4), std::vector<char>(5, 0));
  EXPECT_EQ(flow_delta(rt, 1, 2, tables, -1, 2, 4), std::vector<char>(5, 0));
}

TEST(MaintainMatching, NoChildren) {
  Tree t = path_tree(2);
  RootedTree rt = root_at_leaf(t);
  TableStore tables(rt, leaf_delta(2, 4, -1));
  EXPECT_EQ(maintain_matching_delta(rt, 1, 1, tables, 2, 4), (std::vector<char>{0, 0, 0, 1, 1}));
  EXPECT_EQ(flow_delta(rt, 1, 1, tables, -1, 2, 4), (std::vector<char>{0, 0, 0, 1, 1}));
}

TEST(MaintainMatching, TooManyChildren) {
  Tree t = star_tree(4);
  RootedTree rt = root_at_leaf(t);
  TableStore tables(rt, leaf_delta(2, 4, -1));
  EXPECT_EQ(maintain_matching_delta(rt, 0, 2, tables, 2, 4), std::vector<char>(5, 0));
}

TEST(FlowDelta, EqualsMatchingWithoutCompression) {
  std::mt19937 rng(17);
  int done = 0;
  for (int it = 0; done < 200; ++it) {
    int n = 3 + rng() % 6;
    Tree t = random_tree(n, rng());
    int lambda = t.max_degree() + 1 + rng() % 3;
    RootedTree rt = root_at_leaf(t);
    TableStore tables(rt, leaf_delta(2, lambda, -1));
    for (int v : rt.order())
      if (rt.child_count(v) > 0) {
        DeltaTable r = DeltaTable::uncompressed(lambda, 2);
        for (int a = 0; a <= lambda; ++a)
          for (int b = 0; b <= lambda; ++b) r.set_cell(a, b, std::abs(a - b) >= 2 && rng() % 3 != 0);
        tables.set(v, r);
      }
    for (int v = 0; v < n; ++v) {
      if (v == rt.root()) continue;
      for (int b = 0; b <= lambda; ++b)
        ASSERT_EQ(flow_delta(rt, v, b, tables, -1, 2, lambda), maintain_matching_delta(rt, v, b, tables, 2, lambda));
    }
    ++done;
  }
}

TEST(FlowDelta, SaturatedBand) {
  // 23 children that only take band labels under b = 0 use up all of {2..24}
  const int lambda = 26, h = 2;
  std::vector<std::pair<int, int>> e{{0, 1}};
  int n = 2;
  for (int i = 0; i < 23; ++i) {
    e.emplace_back(1, n);
    e.emplace_back(n, n + 1);
    n += 2;
  }
  Tree t(n, e);
  RootedTree rt = root_at_leaf(t);
  TableStore tables(rt, leaf_delta(2, lambda, h));
  DeltaTable only_band(lambda, 2, h);
  only_band.set_cell(only_band.class_of(0), only_band.class_of(h), true);
  for (int w : rt.children(1)) tables.set(w, only_band);
  auto row = flow_delta(rt, 1, 0, tables, h, 2, lambda);
  for (int a = 0; a <= lambda; ++a) EXPECT_EQ(row[a] != 0, a >= 25) << a;
  EXPECT_EQ(row, maintain_matching_delta(rt, 1, 0, tables, 2, lambda));
}

TEST(V3, Steps) {
  Tree t = path_tree(4);
  RootedTree rt = root_at_leaf(t);
  TableStore tables(rt, leaf_delta(2, 4, -1));

  tables.set(2, table_of(4, 2, {{2, 0}, {2, 4}}));
  DeltaTable two = compute_delta_v3(rt, 1, 2, tables, -1, 2, 4);
  EXPECT_EQ(row_of(two, 2), (std::vector<char>{1, 0, 0, 0, 1}));

  tables.set(2, table_of(4, 2, {{0, 4}}));
  DeltaTable one = compute_delta_v3(rt, 1, 2, tables, -1, 2, 4);
  EXPECT_EQ(row_of(one, 0), (std::vector<char>{0, 0, 1, 1, 0}));

  tables.set(2, table_of(4, 2, {}));
  DeltaTable none = compute_delta_v3(rt, 1, 2, tables, -1, 2, 4);
  for (int b = 0; b <= 4; ++b) EXPECT_EQ(row_of(none, b), std::vector<char>(5, 0));
}

TEST(V3, MatchesFlowRows) {
  // heavy child plus k leaves, random heavy tables
  std::mt19937 rng(5);
  for (int k = 0; k <= 3; ++k)
    for (int it = 0; it < 30; ++it) {
      const int lambda = 6;
      std::vector<std::pair<int, int>> e{{0, 1}, {1, 2}, {2, 3}};
      for (int i = 0; i < k; ++i) e.emplace_back(1, 4 + i);
      Tree t(4 + k, e);
      RootedTree rt = root_at_leaf(t);
      TableStore tables(rt, leaf_delta(2, lambda, -1));
      DeltaTable w = DeltaTable::uncompressed(lambda, 2);
      for (int a = 0; a <= lambda; ++a)
        for (int b = 0; b <= lambda; ++b) w.set_cell(a, b, std::abs(a - b) >= 2 && rng() % 4 == 0);
      tables.set(2, w);
      DeltaTable got = compute_delta_v3(rt, 1, 2, tables, -1, 2, lambda);
      for (int b = 0; b <= lambda; ++b) EXPECT_EQ(row_of(got, b), flow_delta(rt, 1, b, tables, -1, 2, lambda));
    }
}

TEST(V3, Guards) {
  Tree t(6, {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 5}});
  RootedTree rt = root_at_leaf(t);
  TableStore tables(rt, leaf_delta(2, 4, -1));
  EXPECT_THROW(compute_delta_v3(rt, 1, 2, tables, -1, 2, 4), InvariantViolation);
  EXPECT_THROW(compute_delta_v3(rt, 1, 5, tables, -1, 2, 4), InvariantViolation);
}

TEST(Tables, AllTiersMatchOracleOnSmallTrees) {
  for (int n = 3; n <= 7; ++n)
    for (const Tree& t : all_free_trees(n))
      for (int extra = 1; extra <= 2; ++extra) {
        const int lambda = t.max_degree() + extra;
        RootedTree rt = root_at_leaf(t);
        for (Algorithm tier : {Algorithm::ck, Algorithm::fast}) {
          TableStore tables = detail::compute_tables(rt, tier, nullptr, 2, lambda, nullptr);
          for (int v = 0; v < n; ++v) {
            if (v == rt.root()) continue;
            FullTable want = brute_force_delta(rt, v, 2, lambda);
            const DeltaTable& got = tables.get(v);
            for (int a = 0; a <= lambda; ++a)
              for (int b = 0; b <= lambda; ++b)
                ASSERT_EQ(got.at(a, b), want[a][b] != 0) << algorithm_name(tier) << " v=" << v;
          }
        }
      }
}

TEST(Tables, DispatchUsesVqBase) {
  // star K_{1,4} hung from a leaf: the centre is a V_Q vertex
  Tree t = star_tree(4);
  RootedTree rt = root_at_leaf(t);
  Partition part = partition_vertices(rt, 2, 5);
  ASSERT_TRUE(part.vq[0]);
  TableStore tables(rt, leaf_delta(2, 5, level_bound(1, 5, 2)));
  EngineStats stats;
  DeltaTable got = delta_table_for(rt, 0, tables, part, 2, 5, &stats);
  EXPECT_EQ(stats.vq_base, 1);
  DeltaTable want = vq_base_delta(5);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) EXPECT_EQ(got.at(a, b), want.at(a, b));
}

TEST(HeavyChild, CoverageInstancesAgreeWithFastTier) {
  for (const auto& inst : gadgets::coverage_instances()) {
    SolveConfig lin;
    lin.algorithm = Algorithm::linear;
    lin.partition = inst.partition;
    lin.quick_checks = false;
    SolveConfig fast;
    fast.algorithm = Algorithm::fast;
    int lambda = inst.tree.max_degree() + 1;
    SolveResult a = decide_lambda(inst.tree, 2, lambda, false, lin);
    SolveResult b = decide_lambda(inst.tree, 2, lambda, false, fast);
    EXPECT_EQ(a.feasible, b.feasible) << inst.name;
  }
}

TEST(HeavyChild, SeventeenInflexibleChildrenReject) {
  SolveConfig lin;
  lin.algorithm = Algorithm::linear;
  lin.partition = gadgets::coverage_config(8);
  lin.quick_checks = false;
  SolveResult r = decide_lambda(gadgets::heavy_host(17, 0), 2, 26, false, lin);
  EXPECT_FALSE(r.feasible);
  EXPECT_GT(r.stats.engine.v4_reject, 0);
  EXPECT_EQ(r.stats.cls[4], 1);
}

TEST(HeavyChild, FlexibleFunnelUsesCaseOne) {
  SolveConfig lin;
  lin.algorithm = Algorithm::linear;
  lin.partition = gadgets::coverage_config(2);
  lin.quick_checks = false;
  SolveResult r = decide_lambda(gadgets::heavy_host(1, 5, 20), 2, 26, true, lin);
  EXPECT_TRUE(r.feasible);
  EXPECT_GT(r.stats.engine.v4_case[0], 0);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(validate_labeling(gadgets::heavy_host(1, 5, 20), *r.witness, 2, 1));
}

TEST(HeavyChild, CrowdedHostUsesTypeNetwork) {
  SolveConfig lin;
  lin.algorithm = Algorithm::linear;
  lin.partition = gadgets::coverage_config(2);
  lin.quick_checks = false;
  SolveResult r = decide_lambda(gadgets::heavy_host(3, 19), 2, 26, false, lin);
  EXPECT_EQ(r.stats.cls[5], 1);
  EXPECT_GT(r.stats.engine.v5_fact1 + r.stats.engine.v5_fact2, 0);
}
