#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pacr/analytic.hpp"
#include "pacr/testing/oracles.hpp"

namespace pacr {
namespace {

const CellConfig kCell = CellConfig::make(839, 20, 51);
const std::vector<NodeTx> kFig3{{1, 10, 3, 1.0}, {1, 20, 8, 1.0}, {2, 30, 5, 1.0}, {3, 40, 12, 1.0}, {4, 50, 1, 1.0}};

// Received signal assembled from the closed-form sequence, independent of
// zc_generate / build_tagged_preamble / rotate.
std::vector<std::complex<double>> explicit_received(const CellConfig& cfg, const std::vector<NodeTx>& nodes) {
  const int n_zc = cfg.n_zc;
  std::vector<std::complex<double>> y(static_cast<std::size_t>(n_zc));
  for (const auto& m : nodes) {
    const int k = tag_root_map(cfg, m.pa_index);
    for (int n = 0; n < n_zc; ++n) {
      const int p = (n + m.delay + m.pa_index * cfg.n_cs) % n_zc;
      const int q = (n + m.delay + m.tag_index * cfg.n_cs) % n_zc;
      y[static_cast<std::size_t>(n)] +=
          m.amplitude * (testing::zc_sample(cfg.pa_root, p, n_zc) + testing::zc_sample(k, q, n_zc));
    }
  }
  return y;
}

std::vector<std::complex<double>> closed_form_sequence(int root, int n_zc) {
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n_zc));
  for (int n = 0; n < n_zc; ++n) z[static_cast<std::size_t>(n)] = testing::zc_sample(root, n, n_zc);
  return z;
}

TEST(PhyGeometry, ThetaMatchesExplicitSum) {
  const auto g = PhyGeometry::compute(kCell, kFig3, 0);
  const auto y = explicit_received(kCell, kFig3);
  const auto pa = testing::correlation_magnitudes(y, closed_form_sequence(kCell.pa_root, 839));
  const auto tag = testing::correlation_magnitudes(y, closed_form_sequence(tag_root_map(kCell, 1), 839));
  EXPECT_EQ(g.pa_peak_positions(), (std::vector<int>{19, 24}));
  const auto th = g.thetas();
  ASSERT_EQ(th.size(), 2u);
  EXPECT_NEAR(th[0], pa[19], 1e-6);
  EXPECT_NEAR(th[1], pa[24], 1e-6);
  EXPECT_EQ(g.tag_peak_position(), 10 * 16 + 3);
  EXPECT_NEAR(g.phi(), tag[163], 1e-6);
  const auto et = g.etas();
  ASSERT_EQ(et.size(), 3u);
  for (int tau = 0; tau < 3; ++tau) EXPECT_NEAR(et[static_cast<std::size_t>(tau)], tag[160 + tau], 1e-6);
}

TEST(PhyGeometry, ScalesLinearly) {
  const auto g = PhyGeometry::compute(kCell, kFig3, 0);
  const auto a = g.thetas(1.0), b = g.thetas(0.3);
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(b[j], 0.3 * a[j], 1e-12);
  EXPECT_NEAR(g.phi(0.3), 0.3 * g.phi(), 1e-12);
}

TEST(PeakTheta, SingleNodeBounds) {
  for (double beta : {0.1, 1.0, 2.5}) {
    const PhyScenario s{kCell, {{5, 7, 2, beta}}, 1.0, 0};
    const double th = peak_noncentrality_theta(s, 0, 5 * 16 + 2);
    EXPECT_GE(th, std::sqrt(839.0) * beta - beta - 1e-9);
    EXPECT_LE(th, std::sqrt(839.0) * beta + beta + 1e-9);
  }
}

TEST(PeakTheta, SilentNodeIsBoundedByCrossTerms) {
  std::vector<NodeTx> nodes = kFig3;
  nodes[0].amplitude = 0.0;
  const PhyScenario s{kCell, nodes, 1.0, 0};
  EXPECT_LE(peak_noncentrality_theta(s, 0, 19), static_cast<double>(nodes.size()) + 1e-9);
}

TEST(PaDetectionProb, Limits) {
  EXPECT_NEAR(pa_detection_prob(std::vector<double>{60.0}, 1.0, 4.59), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(pa_detection_prob(std::vector<double>{0.0}, 1.0, 0.0), 1.0);
  EXPECT_THROW(pa_detection_prob(std::vector<double>{}, 1.0, 4.59), ParameterError);
  EXPECT_THROW(pa_detection_prob(std::vector<double>{1.0}, 0.0, 4.59), ParameterError);
}

TEST(PaDetectionProb, MonteCarloOfRiceEnvelope) {
  const double theta = 6.49, gamma = 4.59;
  const double p = pa_detection_prob(std::vector<double>{theta}, 1.0, gamma);
  EXPECT_NEAR(p, testing::marcum_q1_quadrature(theta, gamma), 1e-10);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  const int trials = 100000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) hits += std::hypot(theta + n01(rng), n01(rng)) >= gamma;
  EXPECT_TRUE(testing::binomial_consistent(hits, trials, p)) << hits << " vs " << p * trials;
}

TEST(MaxNoiseCdf, ProductForm) {
  EXPECT_DOUBLE_EQ(max_noise_cdf(std::vector<double>{}, 1.0, 4.0), 1.0);
  const double z = 4.59;
  EXPECT_NEAR(max_noise_cdf(std::vector<double>{0, 0, 0}, 1.0, z), std::pow(1 - std::exp(-z * z / 2), 3), 1e-14);
}

TEST(TaCapture, BoundedByPaDetection) {
  for (double snr = -25.0; snr <= 0.0; snr += 2.5) {
    const auto g = PhyGeometry::compute(kCell, kFig3, 0);
    const auto d = target_detection(g, 1.0, {}, std::pow(10.0, snr / 20.0));
    EXPECT_LE(d.p_ta, d.p_pa + 1e-15);
    EXPECT_GE(d.p_ta, 0.0);
  }
}

TEST(TaCapture, NoiselessLimitIsCertain) {
  const PhyScenario s{kCell, kFig3, 1e-3, 0};
  EXPECT_NEAR(ta_capture_accuracy(s, 0, {}), 1.0, 1e-12);
  EXPECT_THROW(ta_capture_accuracy({kCell, kFig3, 0.0, 0}, 0, {}), ParameterError);
}

// --- MAC -------------------------------------------------------------------

TEST(TaZoneProb, Examples) {
  const auto a = MacParams::make(20, 20, 71, 0.8, 10);
  EXPECT_NEAR(ta_zone_prob(a, 0), 0.01, 1e-12);
  const auto b = MacParams::make(20, 20, 38, 2.4, 30);
  EXPECT_NEAR(ta_zone_prob(b, 29), 59.0 / 900.0, 1e-12);
  EXPECT_THROW(ta_zone_prob(b, 30), ParameterError);
}

TEST(TaZoneProb, SumsToOneIncludingCappedLastZone) {
  for (const auto& mac : {MacParams::make(5, 20, 51, 1.6, 20), MacParams{5, 20, 51, 1.0, 0.3, 4}}) {
    double s = 0.0;
    for (int d = 0; d < mac.n_ta_zones; ++d) s += ta_zone_prob(mac, d);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_THROW((MacParams{5, 20, 51, 1.0, 0.3, 5}.validate()), ParameterError);
}

TEST(ProbSamePa, SinglePaPutsEveryoneOnIt) {
  const auto mac = MacParams::make(5, 1, 38, 2.4, 30);
  EXPECT_DOUBLE_EQ(prob_same_pa(mac, 4), 1.0);
  EXPECT_DOUBLE_EQ(prob_same_pa(mac, 0), 0.0);
  EXPECT_DOUBLE_EQ(ra_success_conv(mac), 0.0);
}

TEST(ProbSamePa, BinomialPmf) {
  const auto mac = MacParams::make(20, 20, 38, 2.4, 30);
  EXPECT_NEAR(prob_same_pa(mac, 0), 0.37735, 1e-5);
  double s = 0.0;
  for (int a = 0; a <= 19; ++a) s += prob_same_pa(mac, a);
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(prob_same_pa(MacParams::make(2, 20, 38, 2.4, 30), 1), 0.05, 1e-14);
  EXPECT_THROW(prob_same_pa(mac, 20), ParameterError);
}

TEST(RaSuccess, ClosedFormMatchesExplicitSum) {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = std::uniform_int_distribution<int>(1, 40)(rng);
    const int n_pa = std::uniform_int_distribution<int>(1, 64)(rng);
    const int n_tag = std::uniform_int_distribution<int>(1, 80)(rng);
    const int n_ta = std::uniform_int_distribution<int>(1, 40)(rng);
    const auto mac = MacParams::make(m, n_pa, n_tag, 1.0 + rep * 0.05, n_ta);
    for (int d = 0; d < n_ta; d += 3) {
      const double x = contender_clear_prob(mac, d);
      double explicit_sum = 0.0;
      for (int a = 0; a <= m - 1; ++a) explicit_sum += std::pow(x, a) * prob_same_pa(mac, a);
      ASSERT_NEAR(ra_success_prop_at_zone(mac, d), explicit_sum, 1e-12);
    }
  }
}

TEST(RaSuccess, SingleNodeAlwaysSucceeds) {
  const auto mac = MacParams::make(1, 20, 38, 2.4, 30);
  EXPECT_DOUBLE_EQ(ra_success_prop(mac), 1.0);
  EXPECT_DOUBLE_EQ(ra_success_conv(mac), 1.0);
  EXPECT_DOUBLE_EQ(pusch_collision_prop(mac), 0.0);
}

TEST(RaSuccess, ReferenceValuesAtTwentyNodes) {
  EXPECT_NEAR(ra_success_prop(MacParams::make(20, 20, 71, 0.8, 10)), 0.8715, 5e-4);
  EXPECT_NEAR(ra_success_prop(MacParams::make(20, 20, 51, 1.6, 20)), 0.9225, 5e-4);
  EXPECT_NEAR(ra_success_prop(MacParams::make(20, 20, 38, 2.4, 30)), 0.9360, 5e-4);
  EXPECT_NEAR(ra_success_conv(MacParams::make(20, 20, 38, 2.4, 30)), 0.3774, 5e-4);
  EXPECT_NEAR(pusch_collision_conv(MacParams::make(20, 20, 38, 2.4, 30)), 0.6226, 5e-4);
  EXPECT_NEAR(pusch_collision_prop(MacParams::make(20, 20, 71, 0.8, 10)), 0.0133, 5e-4);
  EXPECT_NEAR(compose_attempts(0.936, 2), 0.9959, 1e-4);
  EXPECT_THROW(compose_attempts(0.5, 0), ParameterError);
}

TEST(RaSuccess, MonotoneInResources) {
  for (int m : {2, 10, 20}) {
    double prev = 0.0;
    for (int n_tag = 1; n_tag <= 80; n_tag += 7) {
      const double p = ra_success_prop(MacParams::make(m, 20, n_tag, 2.4, 30));
      EXPECT_GE(p, prev - 1e-15);
      prev = p;
    }
    prev = 0.0;
    for (int n_ta = 1; n_ta <= 60; n_ta += 5) {
      const double p = ra_success_prop(MacParams::make(m, 20, 38, 2.4, n_ta));
      EXPECT_GE(p, prev - 1e-15);
      prev = p;
    }
  }
}

TEST(RaSuccess, DecreasingInLoad) {
  double prev_p = 1.0, prev_c = 0.0;
  for (int m = 1; m <= 40; ++m) {
    const auto mac = MacParams::make(m, 20, 51, 1.6, 20);
    EXPECT_LE(ra_success_prop(mac), prev_p + 1e-15);
    EXPECT_GE(pusch_collision_prop(mac), prev_c - 1e-15);
    EXPECT_GE(ra_success_prop(mac), ra_success_conv(mac) - 1e-15);
    prev_p = ra_success_prop(mac);
    prev_c = pusch_collision_prop(mac);
  }
}

}  // namespace
}  // namespace pacr
