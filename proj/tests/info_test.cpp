#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ermetrics/core.hpp"
#include "ermetrics/info.hpp"
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

TEST(Entropy, MarginalOfWorkedExample) {
  // Both sides split 5 records 3/2: H = -(3/5)ln(3/5) - (2/5)ln(2/5).
  const double expected = 0.6730116670092565;
  std::vector<std::uint64_t> sizes{3, 2};
  EXPECT_NEAR(marginal_entropy(sizes, 5), expected, 1e-12);
  std::vector<std::uint64_t> swapped{2, 3};
  EXPECT_NEAR(marginal_entropy(swapped, 5), expected, 1e-12);
}

TEST(Entropy, SingleClusterIsZero) {
  std::vector<std::uint64_t> sizes{7};
  EXPECT_EQ(marginal_entropy(sizes, 7), 0.0);
}

TEST(Entropy, ConditionalOfWorkedExample) {
  auto table = worked_table();
  const double expected = 0.3819085009768878;
  EXPECT_NEAR(conditional_entropy(table, Direction::SGivenR), expected, 1e-12);
  EXPECT_NEAR(conditional_entropy(table, Direction::RGivenS), expected, 1e-12);
}

TEST(Info, WorkedExampleScores) {
  auto s = info_scores(worked_table(), 1.0);
  EXPECT_NEAR(s.h_s, 0.6730116670092565, 1e-12);
  EXPECT_NEAR(s.h_r, 0.6730116670092565, 1e-12);
  EXPECT_NEAR(s.homogeneity, 0.43253806776631254, 1e-12);
  EXPECT_NEAR(s.completeness, 0.43253806776631254, 1e-12);
  EXPECT_NEAR(s.v_measure, 0.4325380677663125, 1e-12);
  EXPECT_NEAR(s.vi, 0.7638170019537756, 1e-12);
}

TEST(Info, IdentityIsPerfect) {
  auto table = make_table({{"a", "b"}, {"c"}}, {{"a", "b"}, {"c"}});
  auto s = info_scores(table, 1.0);
  EXPECT_NEAR(s.homogeneity, 1.0, 1e-12);
  EXPECT_NEAR(s.completeness, 1.0, 1e-12);
  EXPECT_NEAR(s.v_measure, 1.0, 1e-12);
  EXPECT_NEAR(s.vi, 0.0, 1e-12);
}

TEST(Info, SingleClusterGoldIsVacuouslyHomogeneous) {
  // H(S) = 0: any prediction is perfectly homogeneous by convention.
  auto s = info_scores(make_table({{"a"}, {"b"}}, {{"a", "b"}}), 1.0);
  EXPECT_EQ(s.homogeneity, 1.0);
  EXPECT_LT(s.completeness, 1.0);
}

TEST(Info, BetaWeightsCompleteness) {
  // v = (1+b^2)hc / (b^2 h + c); with h=0.5, c=1, b=2: 5*0.5/(4*0.5+1) = 5/6.
  EXPECT_NEAR(v_measure(0.5, 1.0, 2.0), 0.8333333333333334, 1e-12);
  EXPECT_NEAR(v_measure(0.5, 1.0, 1.0), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(v_measure(0.0, 0.0, 1.0), 0.0);
}

TEST(Info, ViIsSymmetric) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    auto rg = oracles::random_groups(rng, n);
    auto sg = oracles::random_groups(rng, n);
    const double forward = info_scores(make_table(rg, sg), 1.0).vi;
    const double backward = info_scores(make_table(sg, rg), 1.0).vi;
    EXPECT_NEAR(forward, backward, 1e-12);
  }
}

TEST(Info, ViIsInvariantUnderRecordReplication) {
  // Blowing every record up into t copies that travel together rescales
  // the contingency table uniformly; VI depends only on the proportions.
  std::mt19937_64 rng(31338);
  auto replicate = [](const oracles::Groups& g, int t) {
    oracles::Groups out;
    for (const auto& cluster : g) {
      std::vector<std::string> big;
      for (const auto& token : cluster)
        for (int copy = 0; copy < t; ++copy)
          big.push_back(token + "#" + std::to_string(copy));
      out.push_back(std::move(big));
    }
    return out;
  };
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    auto rg = oracles::random_groups(rng, n);
    auto sg = oracles::random_groups(rng, n);
    const double base = info_scores(make_table(rg, sg), 1.0).vi;
    for (int t : {2, 3, 5}) {
      const double scaled =
          info_scores(make_table(replicate(rg, t), replicate(sg, t)), 1.0).vi;
      EXPECT_NEAR(scaled, base, 1e-9);
    }
  }
}

TEST(Info, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(31339);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    auto rg = oracles::random_groups(rng, n);
    auto sg = oracles::random_groups(rng, n);
    auto got = info_scores(make_table(rg, sg), 1.0);
    auto want = oracles::info_oracle(rg, sg);
    EXPECT_NEAR(got.h_s, want.h_s, 1e-12);
    EXPECT_NEAR(got.h_r, want.h_r, 1e-12);
    EXPECT_NEAR(got.h_s_given_r, want.h_s_given_r, 1e-12);
    EXPECT_NEAR(got.h_r_given_s, want.h_r_given_s, 1e-12);
    EXPECT_NEAR(got.homogeneity, want.homogeneity, 1e-12);
    EXPECT_NEAR(got.completeness, want.completeness, 1e-12);
    EXPECT_NEAR(got.v_measure, want.v, 1e-12);
    EXPECT_NEAR(got.vi, want.vi, 1e-12);
  }
}

}  // namespace
