#include <gtest/gtest.h>

#include <random>

#include "ermetrics/cluster.hpp"
#include "ermetrics/core.hpp"
#include "oracles.hpp"

using namespace ermetrics;

namespace {

Overlap make_table(const oracles::Groups& pred, const oracles::Groups& gold) {
  return overlap(align(oracles::to_clustering(pred), oracles::to_clustering(gold),
                       UniversePolicy::Strict));
}

Overlap worked_table() {
  return make_table({{"a", "b", "d"}, {"c", "e"}}, {{"a", "b"}, {"c", "d", "e"}});
}

TEST(Jaccard, BasicValues) {
  EXPECT_NEAR(jaccard(3, 2, 2), 2.0 / 3.0, 1e-12);  // {a,b,d} vs {a,b}
  EXPECT_EQ(jaccard(4, 4, 4), 1.0);
  EXPECT_NEAR(jaccard(2, 3, 1), 0.25, 1e-12);
}

TEST(ExactCluster, WorkedExampleHasNoExactMatch) {
  auto s = exact_cluster(worked_table());
  EXPECT_EQ(s.matched, 0u);
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f1, 0.0);
  // P + R = 0 means the F1 := 0 convention fired, which is flagged.
  EXPECT_TRUE(s.degenerate);
}

TEST(ExactCluster, CountsOnlyFullMatches) {
  auto s = exact_cluster(make_table({{"a", "b"}, {"c"}, {"d"}},
                                    {{"a", "b"}, {"c", "d"}}));
  EXPECT_EQ(s.matched, 1u);
  EXPECT_NEAR(s.precision, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.recall, 0.5, 1e-12);
}

TEST(ExactCluster, IdenticalClusteringsScoreOne) {
  auto s = exact_cluster(make_table({{"a", "b"}, {"c"}}, {{"c"}, {"b", "a"}}));
  EXPECT_EQ(s.matched, 2u);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(s.f1, 1.0);
}

TEST(ClosestCluster, WorkedExample) {
  auto s = closest_cluster(worked_table());
  EXPECT_NEAR(s.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);
}

TEST(ClosestCluster, PicksTheBestJaccardPerCluster) {
  // pred {a,b,c}: best gold match is {a,b} at 2/3 (not {c,d} at 1/4);
  // pred {d}: best is {c,d} at 1/2. Gold side mirrors the same bests.
  auto s = closest_cluster(make_table({{"a", "b", "c"}, {"d"}},
                                      {{"a", "b"}, {"c", "d"}}));
  EXPECT_NEAR(s.precision, (2.0 / 3.0 + 0.5) / 2.0, 1e-12);
  EXPECT_NEAR(s.recall, (2.0 / 3.0 + 0.5) / 2.0, 1e-12);
}

TEST(Purity, WorkedExample) {
  auto s = purity_family(worked_table());
  EXPECT_NEAR(s.acp, 11.0 / 15.0, 1e-12);
  EXPECT_NEAR(s.aap, 11.0 / 15.0, 1e-12);
  EXPECT_NEAR(s.k, 11.0 / 15.0, 1e-12);
  EXPECT_NEAR(s.manning_purity, 0.8, 1e-12);
}

TEST(Purity, AllSingletonPredictionHasPerfectManningPurity) {
  // Splitting everything into singletons games the purity score: every
  // cluster is trivially pure.
  auto s = purity_family(make_table({{"a"}, {"b"}, {"c"}, {"d"}},
                                    {{"a", "b"}, {"c", "d"}}));
  EXPECT_EQ(s.manning_purity, 1.0);
  EXPECT_EQ(s.acp, 1.0);
  EXPECT_LT(s.aap, 1.0);  // author purity pays for the shredding
  EXPECT_LT(s.k, 1.0);    // and so does the geometric mean
}

TEST(Purity, ThrowsOnEmptyTable) {
  auto pair = align(Clustering(), Clustering(), UniversePolicy::Strict);
  EXPECT_THROW(purity_family(overlap(pair)), EmptyClustering);
}

TEST(ClosestCluster, ThrowsOnEmptyTable) {
  auto pair = align(Clustering(), Clustering(), UniversePolicy::Strict);
  EXPECT_THROW(closest_cluster(overlap(pair)), EmptyClustering);
}

TEST(ExactCluster, EmptyTableIsVacuouslyPerfect) {
  auto pair = align(Clustering(), Clustering(), UniversePolicy::Strict);
  auto s = exact_cluster(overlap(pair));
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_TRUE(s.degenerate);
}

TEST(ClusterScores, BundleAgreesWithParts) {
  auto table = worked_table();
  auto bundle = cluster_scores(table);
  EXPECT_EQ(bundle.exact_f1, exact_cluster(table).f1);
  EXPECT_EQ(bundle.cc_f1, closest_cluster(table).f1);
  EXPECT_EQ(bundle.k, purity_family(table).k);
}

TEST(ClusterMetrics, MatchBruteForceOnRandomPairs) {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    auto rg = oracles::random_groups(rng, n);
    auto sg = oracles::random_groups(rng, n);
    auto table = make_table(rg, sg);

    auto exact_got = exact_cluster(table);
    auto exact_want = oracles::exact_oracle(rg, sg);
    EXPECT_NEAR(exact_got.precision, exact_want.precision, 1e-12);
    EXPECT_NEAR(exact_got.recall, exact_want.recall, 1e-12);

    auto cc_got = closest_cluster(table);
    auto cc_want = oracles::closest_oracle(rg, sg);
    EXPECT_NEAR(cc_got.precision, cc_want.precision, 1e-12);
    EXPECT_NEAR(cc_got.recall, cc_want.recall, 1e-12);
    EXPECT_NEAR(cc_got.f1, cc_want.f1, 1e-12);

    auto purity_got = purity_family(table);
    auto purity_want = oracles::purity_oracle(rg, sg);
    EXPECT_NEAR(purity_got.acp, purity_want.acp, 1e-12);
    EXPECT_NEAR(purity_got.aap, purity_want.aap, 1e-12);
    EXPECT_NEAR(purity_got.k, purity_want.k, 1e-12);
    EXPECT_NEAR(purity_got.manning_purity, purity_want.manning, 1e-12);
  }
}

}  // namespace
