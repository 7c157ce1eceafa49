#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ermetrics/core.hpp"
#include "ermetrics/synth.hpp"
#include "oracles.hpp"

using namespace ermetrics;

namespace {

Clustering worked_pred() {
  return Clustering::from_groups({{"a", "b", "d"}, {"c", "e"}});
}
Clustering worked_gold() {
  return Clustering::from_groups({{"a", "b"}, {"c", "d", "e"}});
}

TEST(Clustering, FromAssignmentsGroupsByLabel) {
  auto c = Clustering::from_assignments(std::vector<Assignment>{
      {"a", "x"}, {"b", "x"}, {"c", "y"}, {"d", "x"}});
  EXPECT_EQ(c.record_count(), 4u);
  EXPECT_EQ(c.cluster_count(), 2u);
  EXPECT_EQ(c.cluster_sizes()[0], 3u);
  EXPECT_EQ(c.cluster_sizes()[1], 1u);
  EXPECT_EQ(c.cluster_labels()[0], "x");
}

TEST(Clustering, RepeatedIdenticalRowIsIdempotent) {
  auto c = Clustering::from_assignments(std::vector<Assignment>{
      {"a", "x"}, {"a", "x"}, {"b", "x"}});
  EXPECT_EQ(c.record_count(), 2u);
}

TEST(Clustering, ConflictingAssignmentThrows) {
  std::vector<Assignment> rows{{"a", "x"}, {"a", "y"}};
  try {
    Clustering::from_assignments(rows);
    FAIL() << "expected ConflictingAssignment";
  } catch (const ConflictingAssignment& e) {
    EXPECT_EQ(e.record(), "a");
    EXPECT_EQ(e.first_label(), "x");
    EXPECT_EQ(e.second_label(), "y");
  }
}

TEST(Clustering, TokensAndLabelsAreTrimmed) {
  auto c = Clustering::from_assignments(std::vector<Assignment>{
      {"  a ", " x "}, {"b", "x"}});
  EXPECT_EQ(c.record_count(), 2u);
  EXPECT_TRUE(c.index_of("a").has_value());
  EXPECT_EQ(c.cluster_labels()[0], "x");
  // "a" and " a " are the same record; conflicting labels still conflict.
  EXPECT_THROW(Clustering::from_assignments(
                   std::vector<Assignment>{{"a", "x"}, {" a ", "y"}}),
               ConflictingAssignment);
}

TEST(Clustering, EmptyTokenThrows) {
  EXPECT_THROW(Clustering::from_assignments(std::vector<Assignment>{{"  ", "x"}}),
               Error);
}

TEST(Clustering, FromGroupsRejectsEmptyGroup) {
  EXPECT_THROW(Clustering::from_groups({{"a"}, {}}), Error);
}

TEST(Clustering, FromDenseRoundTrip) {
  auto c = Clustering::from_dense({"a", "b", "c"}, {1, 0, 1}, {"p", "q"});
  EXPECT_EQ(c.cluster_count(), 2u);
  EXPECT_EQ(c.cluster_sizes()[0], 1u);
  EXPECT_EQ(c.cluster_sizes()[1], 2u);
  auto lists = c.member_lists();
  ASSERT_EQ(lists.size(), 2u);
  EXPECT_EQ(lists[1].size(), 2u);
}

TEST(Clustering, SamePartitionIgnoresLabelsAndOrder) {
  auto a = Clustering::from_groups({{"a", "b"}, {"c"}}, {"one", "two"});
  auto b = Clustering::from_groups({{"c"}, {"b", "a"}}, {"x", "y"});
  EXPECT_TRUE(same_partition(a, b));
  auto c = Clustering::from_groups({{"a"}, {"b", "c"}});
  EXPECT_FALSE(same_partition(a, c));
}

// ---------------------------------------------------------------------------
// Universe alignment

TEST(Align, StrictAcceptsEqualUniverses) {
  auto pair = align(worked_pred(), worked_gold(), UniversePolicy::Strict);
  EXPECT_EQ(pair.n(), 5u);
  // Identical token order on both sides after alignment.
  EXPECT_EQ(pair.left().tokens(), pair.right().tokens());
}

TEST(Align, StrictThrowsWithSamples) {
  auto r = Clustering::from_groups({{"a", "b"}, {"q"}});
  auto s = Clustering::from_groups({{"a", "b"}, {"z1", "z2"}});
  try {
    align(r, s, UniversePolicy::Strict);
    FAIL() << "expected UniverseMismatch";
  } catch (const UniverseMismatch& e) {
    EXPECT_EQ(e.left_only_count(), 1u);
    EXPECT_EQ(e.right_only_count(), 2u);
    ASSERT_FALSE(e.left_only_sample().empty());
    EXPECT_EQ(e.left_only_sample()[0], "q");
    EXPECT_EQ(e.right_only_sample().size(), 2u);
  }
}

TEST(Align, IntersectionDropsUnsharedRecords) {
  auto r = Clustering::from_groups({{"a", "b", "q"}, {"c"}});
  auto s = Clustering::from_groups({{"a", "b"}, {"c", "z"}});
  auto pair = align(r, s, UniversePolicy::Intersection);
  EXPECT_EQ(pair.n(), 3u);
  EXPECT_FALSE(pair.left().index_of("q").has_value());
  EXPECT_FALSE(pair.right().index_of("z").has_value());
  EXPECT_TRUE(same_partition(pair.left(),
                             Clustering::from_groups({{"a", "b"}, {"c"}})));
}

TEST(Align, IntersectionDropsEmptiedClusters) {
  auto r = Clustering::from_groups({{"a"}, {"q1", "q2"}});
  auto s = Clustering::from_groups({{"a"}, {"z"}});
  auto pair = align(r, s, UniversePolicy::Intersection);
  EXPECT_EQ(pair.n(), 1u);
  EXPECT_EQ(pair.left().cluster_count(), 1u);
  EXPECT_EQ(pair.right().cluster_count(), 1u);
}

TEST(Align, IntersectionOfDisjointUniversesIsEmpty) {
  // Degenerate but well-formed: the shared universe is empty, and the
  // metric layer decides which metrics survive n = 0.
  auto r = Clustering::from_groups({{"a"}});
  auto s = Clustering::from_groups({{"b"}});
  auto pair = align(r, s, UniversePolicy::Intersection);
  EXPECT_EQ(pair.n(), 0u);
  EXPECT_EQ(pair.left().cluster_count(), 0u);
  EXPECT_EQ(pair.right().cluster_count(), 0u);
}

TEST(Align, UnionSingletonsAddsMissingAsSingletons) {
  auto r = Clustering::from_groups({{"a", "b"}});
  auto s = Clustering::from_groups({{"a"}, {"c", "d"}});
  auto pair = align(r, s, UniversePolicy::UnionSingletons);
  EXPECT_EQ(pair.n(), 4u);
  // r gains singletons {c} and {d}; s gains {b}.
  EXPECT_EQ(pair.left().cluster_count(), 3u);
  EXPECT_EQ(pair.right().cluster_count(), 3u);
  EXPECT_TRUE(same_partition(
      pair.left(), Clustering::from_groups({{"a", "b"}, {"c"}, {"d"}})));
  EXPECT_TRUE(same_partition(
      pair.right(), Clustering::from_groups({{"a"}, {"c", "d"}, {"b"}})));
}

TEST(Align, PoliciesParseAndPrint) {
  EXPECT_EQ(parse_universe_policy("strict"), UniversePolicy::Strict);
  EXPECT_EQ(parse_universe_policy("intersection"), UniversePolicy::Intersection);
  EXPECT_EQ(parse_universe_policy("union-singletons"), UniversePolicy::UnionSingletons);
  EXPECT_FALSE(parse_universe_policy("bogus").has_value());
  EXPECT_EQ(to_string(UniversePolicy::UnionSingletons), "union-singletons");
}

// ---------------------------------------------------------------------------
// Overlap (contingency table)

TEST(Overlap, WorkedExampleCells) {
  auto pair = align(worked_pred(), worked_gold(), UniversePolicy::Strict);
  auto table = overlap(pair);
  EXPECT_EQ(table.n(), 5u);
  ASSERT_EQ(table.row_count(), 2u);
  ASSERT_EQ(table.col_count(), 2u);
  EXPECT_EQ(table.cell(0, 0), 2u);  // {a,b,d} vs {a,b}
  EXPECT_EQ(table.cell(0, 1), 1u);  // {a,b,d} vs {c,d,e}
  EXPECT_EQ(table.cell(1, 0), 0u);
  EXPECT_EQ(table.cell(1, 1), 2u);  // {c,e} vs {c,d,e}
  EXPECT_EQ(table.row_sizes()[0], 3u);
  EXPECT_EQ(table.col_sizes()[1], 3u);
}

TEST(Overlap, TransposeSwapsAxes) {
  auto pair = align(worked_pred(), worked_gold(), UniversePolicy::Strict);
  auto table = overlap(pair);
  auto t = table.transposed();
  EXPECT_EQ(t.row_count(), table.col_count());
  EXPECT_EQ(t.cell(1, 0), table.cell(0, 1));
  EXPECT_EQ(t.row_sizes(), table.col_sizes());
}

TEST(Overlap, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    auto rg = oracles::random_groups(rng, n);
    auto sg = oracles::random_groups(rng, n);
    auto pair = align(oracles::to_clustering(rg), oracles::to_clustering(sg),
                      UniversePolicy::Strict);
    auto table = overlap(pair);

    // Reference contingency via dense string sets.
    auto cells = oracles::count_table(rg, sg);
    std::uint64_t nonzero_sum = 0;
    for (std::size_t i = 0; i < table.row_count(); ++i)
      for (const auto& cell : table.row(i)) nonzero_sum += cell.count;
    EXPECT_EQ(nonzero_sum, cells.n);

    // Spot-check individual cells against the reference by label lookup.
    for (const auto& [key, count] : cells.joint) {
      const auto [ri, sj] = key;
      // Map oracle group indices to table indices via cluster labels.
      auto find_row = [&](const std::string& token) {
        return pair.left().assignments()[*pair.left().index_of(token)];
      };
      auto find_col = [&](const std::string& token) {
        return pair.right().assignments()[*pair.right().index_of(token)];
      };
      EXPECT_EQ(table.cell(find_row(rg[ri][0]), find_col(sg[sj][0])), count);
    }

    // Column view must agree with the transpose of the row view.
    auto t = table.transposed();
    for (std::size_t j = 0; j < table.col_count(); ++j) {
      std::uint64_t col_sum = 0, t_row_sum = 0;
      for (const auto& cell : table.col(j)) col_sum += cell.count;
      for (const auto& cell : t.row(j)) t_row_sum += cell.count;
      EXPECT_EQ(col_sum, t_row_sum);
      EXPECT_EQ(col_sum, table.col_sizes()[j]);
    }
  }
}

TEST(Overlap, RebuildRecyclesStorageAcrossSizes) {
  // A large table rebuilt into a smaller one must leave no stale state:
  // every view is compared against a freshly built table. Sizes straddle
  // the threshold between the direct and the staged transpose paths.
  std::mt19937_64 rng(551);
  Overlap reused;
  for (std::size_t n : {200000ull, 37ull, 5000ull, 1ull, 130000ull}) {
    auto pred = random_partition(n, SizeProfile::uniform(3), rng());
    auto gold = random_partition(n, SizeProfile::uniform(7), rng());
    auto pair = align(pred, gold, UniversePolicy::Strict);
    reused.rebuild(pair);
    auto fresh = overlap(pair);

    ASSERT_EQ(reused.n(), fresh.n());
    ASSERT_EQ(reused.row_count(), fresh.row_count());
    ASSERT_EQ(reused.col_count(), fresh.col_count());
    ASSERT_EQ(reused.nonzero_count(), fresh.nonzero_count());
    EXPECT_EQ(reused.row_sizes(), fresh.row_sizes());
    EXPECT_EQ(reused.col_sizes(), fresh.col_sizes());
    for (std::size_t i = 0; i < fresh.row_count(); ++i)
      ASSERT_TRUE(std::ranges::equal(reused.row(i), fresh.row(i))) << "row " << i;
    for (std::size_t j = 0; j < fresh.col_count(); ++j)
      ASSERT_TRUE(std::ranges::equal(reused.col(j), fresh.col(j))) << "col " << j;
  }
}

TEST(PairCounts, WorkedExample) {
  auto pair = align(worked_pred(), worked_gold(), UniversePolicy::Strict);
  EXPECT_EQ(intra_pair_count(pair.left()), 4u);   // C(3,2)+C(2,2)
  EXPECT_EQ(intra_pair_count(pair.right()), 4u);  // C(2,2)+C(3,2)
  EXPECT_EQ(inter_pair_count(pair.left()), 6u);   // C(5,2)-4
  EXPECT_EQ(pairs_in(0), 0u);
  EXPECT_EQ(pairs_in(1), 0u);
  EXPECT_EQ(pairs_in(4), 6u);
}

}  // namespace
