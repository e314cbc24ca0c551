#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pacr/channel.hpp"
#include "pacr/detector.hpp"

namespace pacr {
namespace {

const CellConfig kCell = CellConfig::make(839, 20, 51);
const DetectionThresholds kThr{};

TEST(Thresholds, LinearScale) {
  EXPECT_NEAR(kThr.pa_linear(839), 4.5907, 1e-4);
  EXPECT_NEAR(DetectionThresholds::to_linear(0.0, 839), std::sqrt(839.0), 1e-12);
}

TEST(ClassifyAccess, Buckets) {
  EXPECT_EQ(classify_access(0), AccessClass::kNone);
  EXPECT_EQ(classify_access(1), AccessClass::kSingle);
  EXPECT_EQ(classify_access(2), AccessClass::kDouble);
  EXPECT_EQ(classify_access(3), AccessClass::kTriple);
  EXPECT_EQ(classify_access(7), AccessClass::kOver);
  EXPECT_STREQ(to_string(AccessClass::kDouble), "double");
}

TEST(Detector, CleanSingleNode) {
  const Receiver rx(kCell, kThr);
  const auto y = synthesize_received({kCell, {{1, 4, 3, 1.0}}, 0.0, 1});
  const auto report = rx.detect(y);
  ASSERT_EQ(report.pas.size(), 1u);
  EXPECT_EQ(report.pas[0].pa_index, 1);
  EXPECT_EQ(report.pas[0].peak_positions, std::vector<int>{kCell.n_cs + 3});
  EXPECT_EQ(report.pas[0].tas, (std::vector<CapturedTa>{{4, 3}}));
  EXPECT_EQ(report.pas[0].access, AccessClass::kSingle);
}

TEST(Detector, FourOccupiedPasAtHighSnr) {
  const Receiver rx(kCell, kThr);
  const double b = std::pow(10.0, -0.5);  // -10 dB against sigma = 1, here with sigma = 0.02
  const std::vector<NodeTx> nodes{{1, 10, 3, b}, {1, 20, 8, b}, {2, 30, 5, b}, {3, 40, 12, b}, {4, 50, 1, b}};
  const auto report = rx.detect(synthesize_received({kCell, nodes, 0.02, 7}));
  std::vector<int> pas;
  for (const auto& p : report.pas) pas.push_back(p.pa_index);
  EXPECT_EQ(pas, (std::vector<int>{1, 2, 3, 4}));
  ASSERT_NE(report.find(1), nullptr);
  EXPECT_EQ(report.find(1)->tas, (std::vector<CapturedTa>{{10, 3}, {20, 8}}));
  EXPECT_EQ(report.find(1)->access, AccessClass::kDouble);
  EXPECT_EQ(report.find(0), nullptr);
}

TEST(Detector, SamePaDistinctTagsAreSeparated) {
  const std::vector<NodeTx> nodes{{6, 2, 9, 1.0}, {6, 33, 4, 1.0}};
  const auto y = synthesize_received({kCell, nodes, 0.05, 3});
  EXPECT_EQ(capture_tas(y, 6, kCell, kThr), (std::vector<CapturedTa>{{2, 9}, {33, 4}}));
}

TEST(Detector, ZeroDelayNode) {
  const auto y = synthesize_received({kCell, {{0, 0, 0, 1.0}}, 0.0, 1});
  EXPECT_EQ(capture_tas(y, 0, kCell, kThr), (std::vector<CapturedTa>{{0, 0}}));
}

TEST(Detector, IdenticalNodesCollapse) {
  const std::vector<NodeTx> nodes{{3, 12, 6, 1.0}, {3, 12, 6, 1.0}};
  const auto y = synthesize_received({kCell, nodes, 0.0, 1});
  EXPECT_EQ(capture_tas(y, 3, kCell, kThr), (std::vector<CapturedTa>{{12, 6}}));
}

TEST(Detector, EarliestLagWinsInsideAZone) {
  // Same PA and tag, different delays: only the earlier one is reported.
  const std::vector<NodeTx> nodes{{3, 12, 9, 1.0}, {3, 12, 2, 1.0}};
  const auto y = synthesize_received({kCell, nodes, 0.0, 1});
  EXPECT_EQ(capture_tas(y, 3, kCell, kThr), (std::vector<CapturedTa>{{12, 2}}));
}

TEST(Detector, ProfileLengthIsChecked) {
  CorrelationProfile short_profile{std::vector<double>(100), 1};
  EXPECT_THROW(detect_pas(short_profile, kCell, kThr), ParameterError);
  EXPECT_THROW(capture_tas_from_profile(short_profile, kCell, kThr), ParameterError);
}

// Noise only: each lag exceeds gamma with probability exp(-gamma^2 / 2sigma^2),
// and a zone of N_CS independent lags fires with 1 - (1 - q)^N_CS.
TEST(Detector, NoiseFalseAlarmRate) {
  EXPECT_NEAR(std::exp(-std::pow(kThr.pa_linear(839), 2) / 2.0), 2.7e-5, 0.1e-5);

  const DetectionThresholds low{-22.0, -22.0};
  const double g = low.pa_linear(839);
  const double q = std::exp(-g * g / 2.0);
  const double p_zone = 1.0 - std::pow(1.0 - q, kCell.n_cs);
  const Receiver rx(kCell, low);
  const int realizations = 400;
  std::int64_t fired = 0;
  for (int s = 0; s < realizations; ++s) {
    const auto y = synthesize_received({kCell, {}, 1.0, static_cast<std::uint64_t>(s)});
    fired += static_cast<std::int64_t>(detect_pas(rx.pa_profile(y), kCell, low).size());
  }
  const double n = realizations * static_cast<double>(kCell.n_pa);
  const double rate = static_cast<double>(fired) / n;
  EXPECT_NEAR(rate, p_zone, 4.0 * std::sqrt(p_zone * (1 - p_zone) / n));
}

TEST(Detector, HigherTagThresholdNeverAddsTas) {
  const std::vector<NodeTx> nodes{{2, 5, 3, 0.25}, {2, 17, 7, 0.25}, {2, 40, 11, 0.25}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto y = synthesize_received({kCell, nodes, 1.0, seed});
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double db = -22.0; db <= -8.0; db += 1.0) {
      const auto n = capture_tas(y, 2, kCell, {-16.0, db}).size();
      ASSERT_LE(n, prev) << "seed " << seed << " gamma " << db;
      prev = n;
    }
  }
}

TEST(Rar, OneMessagePerUniqueTa) {
  DetectionReport report;
  report.pas.push_back({1, {19}, {{10, 3}, {20, 8}}, AccessClass::kDouble});
  report.pas.push_back({4, {65}, {{5, 2}, {9, 2}, {30, 6}}, AccessClass::kTriple});
  const auto rars = generate_rars(report);
  EXPECT_EQ(rars, (std::vector<RarMessage>{{1, 3, 0}, {1, 8, 1}, {4, 6, 2}}));
}

TEST(Rar, NoTasNoMessages) {
  DetectionReport report;
  report.pas.push_back({0, {2}, {}, AccessClass::kNone});
  EXPECT_TRUE(generate_rars(report).empty());
  EXPECT_TRUE(generate_rars({}).empty());
}

}  // namespace
}  // namespace pacr
