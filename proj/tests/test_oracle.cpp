#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "treeknap/error.hpp"
#include "treeknap/oracle.hpp"

namespace treeknap {
namespace {

using testing::array_of;

TEST(BruteForce, Examples) {
  auto p = brute_force(testing::star_f1(), builtin("precedence"));
  EXPECT_EQ(p.combined, array_of({0, 2, 5, 6}));
  EXPECT_EQ(p.optimum, (BestValue{6, 3}));
  EXPECT_EQ(p.witness, (std::vector<Vertex>{0, 1}));

  auto c = brute_force(testing::path_f2(), builtin("connectivity"));
  EXPECT_EQ(c.optimum->value, 7);
  EXPECT_EQ(c.witness, (std::vector<Vertex>{1, 2}));

  auto e = brute_force(testing::star_f1().with_capacity(0), builtin("independent-set"));
  EXPECT_EQ(e.optimum, (BestValue{0, 0}));
  EXPECT_TRUE(e.witness.empty());
}

TEST(BruteForce, MatchesRunSearch) {
  std::mt19937_64 rng(5);
  for (const auto& name : builtin_names()) {
    for (int trial = 0; trial < 60; ++trial) {
      auto inst = testing::random_instance(rng, 1 + rng() % 8, 3, 7, static_cast<std::int64_t>(rng() % 10));
      ASSERT_EQ(brute_force(inst, builtin(name)).state_arrays, testing::reference_arrays(inst, builtin(name)));
    }
  }
}

TEST(BruteForce, SizeGuard) {
  auto big = generate_instance(TreeShape::kPath, kOracleMaxVertices + 1, 1, 1, 1, 1);
  EXPECT_THROW(brute_force(big, builtin("precedence")), Error);
  auto mid = generate_instance(TreeShape::kPath, kKSubtreeOracleMaxVertices + 1, 1, 1, 1, 1);
  EXPECT_THROW(brute_force_ksubtree(mid, builtin("precedence"), 1), Error);
  EXPECT_THROW(brute_force_ksubtree(testing::star_f1(), builtin("precedence"), kKSubtreeOracleMaxK + 1),
               Error);
  EXPECT_THROW(enumerate_trees(kEnumerateMaxVertices + 1), Error);
}

TEST(KSubtreeOracle, Examples) {
  auto conn = builtin("connectivity");
  auto f1 = brute_force_ksubtree(testing::star_f1(), conn, 2);
  EXPECT_EQ(f1.best, (std::vector<std::optional<Profit>>{0, 6, 7}));
  EXPECT_EQ(f1.roots[2], (std::vector<Vertex>{1, 2}));
  EXPECT_EQ(brute_force_ksubtree(testing::path_f2(), conn, 2).best,
            (std::vector<std::optional<Profit>>{0, 7, std::nullopt}));
  EXPECT_EQ(brute_force_ksubtree(testing::path_f2(), conn, 0).best,
            (std::vector<std::optional<Profit>>{0}));
}

TEST(EnumerateTrees, Counts) {
  EXPECT_EQ(enumerate_trees(1), (std::vector<std::vector<std::int64_t>>{{}}));
  EXPECT_EQ(enumerate_trees(2), (std::vector<std::vector<std::int64_t>>{{0}}));
  EXPECT_EQ(enumerate_trees(4).size(), 6u);
  auto all = enumerate_trees(8);
  EXPECT_EQ(all.size(), 5040u);
  EXPECT_EQ(std::set<std::vector<std::int64_t>>(all.begin(), all.end()).size(), 5040u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Generate, ShapesAndDeterminism) {
  EXPECT_EQ(make_parents(TreeShape::kPath, 4, 1), (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_EQ(make_parents(TreeShape::kStar, 4, 1), (std::vector<std::int64_t>{0, 0, 0}));
  EXPECT_EQ(make_parents(TreeShape::kBinary, 7, 1), (std::vector<std::int64_t>{0, 0, 1, 1, 2, 2}));
  auto a = generate_instance(TreeShape::kRandom, 50, 9, 9, 20, 42);
  EXPECT_EQ(a, generate_instance(TreeShape::kRandom, 50, 9, 9, 20, 42));
  for (Vertex v = 0; v < 50; ++v) {
    EXPECT_LE(a.weight(v), 9);
    EXPECT_LE(a.profit(v), 9);
  }
  EXPECT_EQ(parse_shape("caterpillar"), TreeShape::kCaterpillar);
  EXPECT_EQ(parse_shape("blob"), std::nullopt);
}

}  // namespace
}  // namespace treeknap
