#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lambdatree/lambdatree.hpp"

using namespace lambdatree;

namespace {

SolveConfig tier(Algorithm a) {
  SolveConfig c;
  c.algorithm = a;
  return c;
}

// three majors adjacent to a common vertex c (Delta = 4)
Tree three_majors_around_centre() {
  std::vector<std::pair<int, int>> e;
  int n = 1;
  for (int k = 0; k < 3; ++k) {
    int m = n++;
    e.emplace_back(0, m);
    for (int i = 0; i < 3; ++i) e.emplace_back(m, n++);
  }
  e.emplace_back(0, n++);
  return Tree(n, e);
}

}  // namespace

TEST(QuickChecks, ThreeMajorsInANeighbourhood) {
  Tree t = three_majors_around_centre();
  ASSERT_EQ(t.max_degree(), 4);
  EXPECT_EQ(quick_checks(t), std::optional<bool>(false));
  EXPECT_FALSE(brute_force_labeling(t, 2, 1, 5).has_value());
}

TEST(QuickChecks, FewMajors) {
  Tree t = star_tree(10);
  EXPECT_EQ(quick_checks(t), std::optional<bool>(true));
}

TEST(QuickChecks, Undecided) {
  // two adjacent degree-4 vertices
  std::vector<std::pair<int, int>> e{{0, 1}};
  for (int i = 0; i < 3; ++i) e.emplace_back(0, 2 + i);
  for (int i = 0; i < 3; ++i) e.emplace_back(1, 5 + i);
  Tree t(8, e);
  EXPECT_EQ(quick_checks(t), std::nullopt);
}

TEST(Decide, StarAtDeltaPlusOne) {
  Tree t = star_tree(4);
  for (Algorithm a : {Algorithm::ck, Algorithm::fast, Algorithm::linear, Algorithm::automatic}) {
    SolveResult r = decide_lambda(t, 2, 5, true, tier(a));
    EXPECT_TRUE(r.feasible);
    ASSERT_TRUE(r.witness);
    EXPECT_TRUE(validate_labeling(t, *r.witness, 2, 1));
    int centre = r.witness->labels[0];
    EXPECT_TRUE(centre == 0 || centre == 5);
  }
}

TEST(Decide, QuickRejectUsedWithoutWitness) {
  Tree t = three_majors_around_centre();
  SolveResult r = decide_lambda(t, 2, 5, false, tier(Algorithm::linear));
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.stats.quick, "reject");
  SolveResult w = decide_lambda(t, 2, 5, true, tier(Algorithm::linear));
  EXPECT_FALSE(w.feasible);
  EXPECT_TRUE(w.stats.quick.empty());
}

TEST(Decide, BelowLowerBound) {
  EXPECT_FALSE(decide_lambda(star_tree(4), 2, 4, false).feasible);
  EXPECT_FALSE(decide_lambda(path_tree(2), 3, 2, false).feasible);
}

TEST(Decide, MatchesOracleOnAllSmallTrees) {
  for (int n = 2; n <= 10; ++n)
    for (const Tree& t : all_free_trees(n))
      for (int extra = 1; extra <= 2; ++extra) {
        int lambda = t.max_degree() + extra;
        bool want = brute_force_labeling(t, 2, 1, lambda).has_value();
        for (Algorithm a : {Algorithm::ck, Algorithm::fast, Algorithm::linear}) {
          SolveResult r = decide_lambda(t, 2, lambda, true, tier(a));
          ASSERT_EQ(r.feasible, want) << to_text(t) << algorithm_name(a);
          if (want) {
            ASSERT_TRUE(r.witness);
            EXPECT_TRUE(validate_labeling(t, *r.witness, 2, 1));
          }
        }
      }
}

TEST(Solve, Examples) {
  EXPECT_EQ(solve_l21(path_tree(5)).lambda, 4);
  EXPECT_EQ(solve_l21(star_tree(5)).lambda, 6);
  SolveResult one = solve_l21(Tree(1, {}));
  EXPECT_EQ(one.lambda, 0);
  ASSERT_TRUE(one.witness);
  EXPECT_EQ(one.witness->labels, std::vector<int>{0});
  EXPECT_EQ(solve_lp1(path_tree(2), 3).lambda, 3);
  EXPECT_EQ(solve_lp1(star_tree(3), 3).lambda, brute_force_lambda(star_tree(3), 3, 1).lambda);
}

TEST(Solve, GeneralPMatchesOracle) {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 150; ++it) {
    Tree t = random_tree(2 + rng() % 9, rng());
    for (int p : {1, 2, 3, 4}) {
      SolveResult r = solve_lp1(t, p);
      EXPECT_EQ(r.lambda, brute_force_lambda(t, p, 1).lambda) << to_text(t) << " p=" << p;
      ASSERT_TRUE(r.witness);
      EXPECT_TRUE(validate_labeling(t, *r.witness, p, 1));
      EXPECT_LE(r.witness->span(), r.lambda);
    }
  }
}

TEST(Solve, LargeTreeWitnessIsValid) {
  Tree t = random_tree_max_degree(50000, 25, 4);
  SolveResult r = solve_l21(t, tier(Algorithm::linear));
  EXPECT_TRUE(r.lambda == 26 || r.lambda == 27);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(validate_labeling(t, *r.witness, 2, 1));
  EXPECT_EQ(r.stats.n, 50000);
}

TEST(Solve, TiersAgreeOnMediumTrees) {
  for (int seed = 0; seed < 4; ++seed) {
    Tree t = random_tree_max_degree(2000, 25, seed);
    int lin = solve_l21(t, tier(Algorithm::linear)).lambda;
    EXPECT_EQ(lin, solve_l21(t, tier(Algorithm::ck)).lambda);
    EXPECT_EQ(lin, solve_l21(t, tier(Algorithm::fast)).lambda);
  }
}

TEST(Solve, AutoPicksTierByDegree) {
  EXPECT_EQ(solve_l21(star_tree(5)).stats.tier, Algorithm::fast);
  EXPECT_EQ(solve_l21(star_tree(20)).stats.tier, Algorithm::linear);
}

TEST(Partition, SmallTreeIsOneSubtree) {
  Tree t = random_tree_max_degree(400, 6, 2);
  auto pre = preprocess(t, 2, 7);
  for (const auto& pc : pre.pieces) {
    if (pc.tree.size() <= 2) continue;
    RootedTree rt = root_at_leaf(pc.tree);
    Partition part = partition_vertices(rt, 2, 7);
    EXPECT_EQ(part.count[1], pc.tree.size());
    EXPECT_TRUE(part.vm_head[rt.root()]);
  }
}

TEST(Partition, RequiresPreprocessedTree) {
  Tree t = path_tree(6);
  RootedTree rt = root_at_leaf(t);
  EXPECT_THROW(partition_vertices(rt, 2, 4), PreconditionError);
}

TEST(Partition, StressTreeReachesHeavyClasses) {
  Tree t = generate_tree(TreeKind::v45_stress, 5000, 25, 1);
  SolveConfig c = tier(Algorithm::linear);
  c.partition.vm_cap = 1200;
  c.partition.vm2_cap = 1000;
  c.partition.v45_split = 425;
  c.quick_checks = false;
  SolveResult r = decide_lambda(t, 2, 26, false, c);
  EXPECT_GT(r.stats.cls[4], 0);
  EXPECT_GT(r.stats.cls[5], 0);
  EXPECT_EQ(r.feasible, decide_lambda(t, 2, 26, false, tier(Algorithm::fast)).feasible);
}

TEST(Partition, HeadCountBoundsSecondClass) {
  // second-class vertices with two or more non-small children branch the tree
  // whose leaves are large heads or vertices with no non-small child
  std::mt19937_64 rng(77);
  long long branching_seen = 0;
  for (int it = 0; it < 30; ++it) {
    Tree t = generate_tree(TreeKind::v45_stress, 3000 + rng() % 3000, 25, rng());
    PartitionConfig cfg;
    cfg.vm_cap = 60;
    cfg.vm2_cap = 12;
    cfg.v45_split = 100;
    auto pre = preprocess(t, 2, 26);
    for (const auto& pc : pre.pieces) {
      if (pc.tree.size() <= 2) continue;
      RootedTree rt = root_at_leaf(pc.tree);
      Partition part = partition_vertices(rt, 2, 26, cfg);
      long long branching = 0, ends = 0;
      for (int v = 0; v < rt.size(); ++v)
        if (part.cls[v] == VClass::v2) ++(part.dtilde[v] == 0 ? ends : branching);
      EXPECT_LE(branching, std::max(part.vm1_count() + ends - 1, 0LL));
      branching_seen += branching;
    }
  }
  EXPECT_GT(branching_seen, 0);
}
