#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "pacr/mac_sim.hpp"

namespace pacr {
namespace {

TEST(EvaluateNodes, SingleNodeSucceeds) {
  const auto f = evaluate_nodes({{3, 7, 4}});
  EXPECT_TRUE(f[0].success_prop);
  EXPECT_TRUE(f[0].success_conv);
  EXPECT_FALSE(f[0].collision_prop);
  EXPECT_FALSE(f[0].collision_conv);
}

TEST(EvaluateNodes, CoincidentNodesCollide) {
  for (const auto& f : evaluate_nodes({{0, 5, 2}, {0, 5, 2}})) {
    EXPECT_FALSE(f.success_prop);
    EXPECT_TRUE(f.collision_prop);
    EXPECT_TRUE(f.collision_conv);
  }
}

TEST(EvaluateNodes, TagAndZoneResolveSharedPa) {
  for (const auto& f : evaluate_nodes({{0, 5, 2}, {0, 6, 3}})) {
    EXPECT_TRUE(f.success_prop);
    EXPECT_FALSE(f.success_conv);
    EXPECT_FALSE(f.collision_prop);
  }
}

TEST(EvaluateNodes, SameZoneDifferentTagFailsWithoutCollision) {
  const auto f = evaluate_nodes({{0, 5, 2}, {0, 6, 2}});
  EXPECT_EQ(f[0].prop_outcome(), PropOutcome::kOtherFailure);
}

TEST(EvaluateNodes, CollisionRuleRequiringZone) {
  const std::vector<MacNode> nodes{{0, 5, 2}, {0, 5, 3}};
  EXPECT_TRUE(evaluate_nodes(nodes, CollisionRule::kSamePaTag)[0].collision_prop);
  EXPECT_FALSE(evaluate_nodes(nodes, CollisionRule::kSamePaTagZone)[0].collision_prop);
}

TEST(EvaluateNodes, OutcomesPartitionEveryTrial) {
  const auto mac = MacParams::make(12, 4, 6, 2.4, 5);
  for (std::uint64_t t = 0; t < 2000; ++t) {
    auto rng = derive_rng(9, Stream::kMacTrial, t);
    const auto trial = run_mac_trial(mac, rng);
    for (const auto& f : trial.flags) {
      const int k = f.success_prop + (f.prop_outcome() == PropOutcome::kCollision) +
                    (f.prop_outcome() == PropOutcome::kOtherFailure);
      ASSERT_EQ(k, 1);
      ASSERT_FALSE(f.success_prop && f.collision_prop);
      ASSERT_TRUE(!f.success_conv || f.success_prop);
    }
  }
}

TEST(ZoneSampler, ChiSquareAgainstAnnulusProbabilities) {
  const auto mac = MacParams::make(2, 20, 38, 2.4, 30);
  const ZoneSampler zones(mac);
  auto rng = derive_rng(3, Stream::kProperty, 0);
  const int draws = 100000;
  std::vector<int> counts(30);
  for (int k = 0; k < draws; ++k) ++counts[static_cast<std::size_t>(zones(rng))];
  double chi2 = 0.0;
  for (int d = 0; d < 30; ++d) {
    const double e = draws * ta_zone_prob(mac, d);
    chi2 += (counts[static_cast<std::size_t>(d)] - e) * (counts[static_cast<std::size_t>(d)] - e) / e;
  }
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(29), chi2));
  EXPECT_GT(p, 0.01) << "chi2=" << chi2;
}

TEST(MacSim, DeterministicForSeed) {
  MacScenario s{MacParams::make(10, 20, 51, 1.6, 20), 5000, 42};
  const auto a = run_mac_sim(s);
  const auto b = run_mac_sim(s);
  EXPECT_EQ(a.success_rate_prop, b.success_rate_prop);
  EXPECT_EQ(a.collision_rate_prop, b.collision_rate_prop);
  s.seed = 43;
  EXPECT_NE(run_mac_sim(s).success_rate_prop, a.success_rate_prop);
}

TEST(MacSim, MatchesAnalyticWithinCi) {
  const auto mac = MacParams::make(20, 20, 38, 2.4, 30);
  const auto out = run_mac_sim({mac, 100000, 1});
  const double p = ra_success_prop(mac);
  EXPECT_NEAR(out.success_rate_prop, p, out.ci_halfwidth(p));
  const double c = ra_success_conv(mac);
  EXPECT_NEAR(out.success_rate_conv, c, out.ci_halfwidth(c));
  const double pc = pusch_collision_prop(mac);
  EXPECT_NEAR(out.collision_rate_prop, pc, out.ci_halfwidth(pc));
}

TEST(MacSim, TwoIndependentAttempts) {
  const auto mac = MacParams::make(20, 20, 38, 2.4, 30);
  const auto out = run_mac_sim({mac, 50000, 1, 2, RetryZone::kRedraw});
  const double p = compose_attempts(ra_success_prop(mac), 2);
  EXPECT_NEAR(p, 0.996, 1e-3);
  EXPECT_NEAR(out.success_rate_prop, p, out.ci_halfwidth(p));
}

TEST(MacSim, FixedZoneRetryIsNoBetterThanRedraw) {
  const auto mac = MacParams::make(20, 20, 38, 2.4, 30);
  const auto fixed = run_mac_sim({mac, 50000, 1, 2, RetryZone::kFixed});
  const auto redraw = run_mac_sim({mac, 50000, 1, 2, RetryZone::kRedraw});
  EXPECT_LE(fixed.success_rate_prop, redraw.success_rate_prop + fixed.ci_halfwidth(fixed.success_rate_prop));
  EXPECT_GT(fixed.success_rate_prop, ra_success_prop(mac));
}

TEST(MacSim, RejectsBadScenario) {
  EXPECT_THROW(run_mac_sim({MacParams::make(2, 20, 38, 2.4, 30), 0, 1}), ParameterError);
  EXPECT_THROW(run_mac_sim({MacParams::make(2, 20, 38, 2.4, 30), 10, 1, 0}), ParameterError);
}

TEST(ParallelChunks, PartitionIndependentOfThreadCount) {
  for (unsigned threads : {1u, 2u, 5u}) {
    const auto parts = parallel_chunks<std::int64_t>(
        1001, [](std::int64_t b, std::int64_t e, std::int64_t& acc) {
          for (auto i = b; i < e; ++i) acc += i;
        },
        threads);
    std::int64_t total = 0;
    for (auto p : parts) total += p;
    EXPECT_EQ(total, 1000 * 1001 / 2) << threads;
  }
}

}  // namespace
}  // namespace pacr
