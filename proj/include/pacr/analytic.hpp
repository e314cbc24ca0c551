#pragma once

// Closed-form performance of tagged-preamble collision resolution.
//
// PHY side: every correlator output is Rice-distributed around the noiseless
// correlation of the superposed preambles, so the noncentralities theta
// (PA peaks), phi (target tag peak) and eta (pre-peak lags of the target tag
// zone) are read off the noiseless PA and tag correlations. With the
// 1/sqrt(N) normalization and per-component noise variance sigma^2 the Rice
// scale is sigma itself.
//
// MAC side: binomial contention among M nodes over N_PA preambles, N_tag tags
// and N_TA concentric TA zones.

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pacr/channel.hpp"
#include "pacr/detector.hpp"
#include "pacr/error.hpp"
#include "pacr/preamble.hpp"
#include "pacr/special.hpp"
#include "pacr/zc.hpp"

namespace pacr {

// ---------------------------------------------------------------------------
// PHY: PA detection probability and TA capture accuracy

/// Noiseless PA-root and target-tag-root correlations of one scenario.
/// Scaling all amplitudes by k scales both vectors by k.
struct PhyGeometry {
  CellConfig cfg;
  std::vector<NodeTx> nodes;
  int target = 0;
  ComplexVec pa_mean;   ///< correlation against z_r
  ComplexVec tag_mean;  ///< correlation against z_{f(i_target)}

  static PhyGeometry compute(const CellConfig& cfg, std::span<const NodeTx> nodes, int target) {
    detail::require(target >= 0 && static_cast<std::size_t>(target) < nodes.size(),
                    "PhyGeometry: target node index out of range");
    PhyGeometry g{cfg, {nodes.begin(), nodes.end()}, target, {}, {}};
    const auto y = noiseless_received(cfg, nodes);
    g.pa_mean = Correlator(zc_generate(cfg.pa_params())).correlate(y);
    const int k = tag_root_map(cfg, nodes[static_cast<std::size_t>(target)].pa_index);
    g.tag_mean = Correlator(zc_generate({cfg.n_zc, k})).correlate(y);
    return g;
  }

  [[nodiscard]] const NodeTx& target_node() const { return nodes[static_cast<std::size_t>(target)]; }

  /// Lags omega_j = i_d*N_CS + t_j of every node sharing the target's PA (deduplicated).
  [[nodiscard]] std::vector<int> pa_peak_positions() const {
    const auto& t = target_node();
    std::set<int> pos;
    for (const auto& n : nodes)
      if (n.pa_index == t.pa_index) pos.insert((t.pa_index * cfg.n_cs + n.delay) % cfg.n_zc);
    return {pos.begin(), pos.end()};
  }

  [[nodiscard]] int tag_peak_position() const {
    const auto& t = target_node();
    return (t.tag_index * cfg.n_cs + t.delay) % cfg.n_zc;
  }

  [[nodiscard]] std::vector<double> thetas(double scale = 1.0) const {
    std::vector<double> out;
    for (int w : pa_peak_positions()) out.push_back(scale * std::abs(pa_mean[static_cast<std::size_t>(w)]));
    return out;
  }

  [[nodiscard]] double phi(double scale = 1.0) const {
    return scale * std::abs(tag_mean[static_cast<std::size_t>(tag_peak_position())]);
  }

  /// eta over the t_d lags preceding the target's tag peak inside its zone.
  [[nodiscard]] std::vector<double> etas(double scale = 1.0) const {
    const auto& t = target_node();
    std::vector<double> out;
    for (int tau = 0; tau < t.delay; ++tau)
      out.push_back(scale * std::abs(tag_mean[static_cast<std::size_t>((t.tag_index * cfg.n_cs + tau) % cfg.n_zc)]));
    return out;
  }
};

inline double peak_noncentrality_theta(const PhyScenario& scenario, int target_node, int peak_pos) {
  scenario.validate();
  const auto g = PhyGeometry::compute(scenario.cfg, scenario.nodes, target_node);
  detail::require(peak_pos >= 0 && peak_pos < scenario.cfg.n_zc, "peak_noncentrality_theta: peak_pos out of range");
  return std::abs(g.pa_mean[static_cast<std::size_t>(peak_pos)]);
}

/// 1 - prod_j (1 - Q1(theta_j / sigma, gamma / sigma)).
inline double pa_detection_prob(std::span<const double> thetas, double sigma, double gamma_pa_lin) {
  detail::require(!thetas.empty(), "pa_detection_prob: empty theta list");
  detail::require(sigma > 0.0, "pa_detection_prob: sigma must be positive");
  double miss = 1.0;
  for (double th : thetas) miss *= 1.0 - marcum_q1(th / sigma, gamma_pa_lin / sigma);
  return 1.0 - miss;
}

/// Pr[Z < z] for the maximum of independent Rice(eta, sigma) variables.
inline double max_noise_cdf(std::span<const double> etas, double sigma, double z) {
  detail::require(sigma > 0.0, "max_noise_cdf: sigma must be positive");
  double p = 1.0;
  for (double eta : etas) p *= 1.0 - marcum_q1(eta / sigma, z / sigma);
  return p;
}

struct TargetDetection {
  double p_pa = 0.0;
  double p_ta = 0.0;
};

/// P_PA and P_TA = P_PA * Pr[Z < gamma_tag] * Q1(phi/sigma, gamma_tag/sigma)
/// for a geometry whose amplitudes are multiplied by `scale`.
inline TargetDetection target_detection(const PhyGeometry& g, double sigma, const DetectionThresholds& thr,
                                        double scale = 1.0) {
  const double gamma_pa = thr.pa_linear(g.cfg.n_zc);
  const double gamma_tag = thr.tag_linear(g.cfg.n_zc);
  const auto th = g.thetas(scale);
  const auto et = g.etas(scale);
  TargetDetection out;
  out.p_pa = pa_detection_prob(th, sigma, gamma_pa);
  out.p_ta = out.p_pa * max_noise_cdf(et, sigma, gamma_tag) * marcum_q1(g.phi(scale) / sigma, gamma_tag / sigma);
  return out;
}

inline double ta_capture_accuracy(const PhyScenario& scenario, int target_node, const DetectionThresholds& thr) {
  scenario.validate();
  detail::require(scenario.noise_sigma > 0.0, "ta_capture_accuracy: noise_sigma must be positive");
  const auto g = PhyGeometry::compute(scenario.cfg, scenario.nodes, target_node);
  return target_detection(g, scenario.noise_sigma, thr).p_ta;
}

// ---------------------------------------------------------------------------
// MAC: RA success and PUSCH collision

struct MacParams {
  int m_nodes = 20;
  int n_pa = 20;
  int n_tag = 38;
  double cell_radius_km = 2.4;
  double eps_ta_km = 0.08;
  int n_ta_zones = 30;

  /// N_TA is authoritative; the TA granularity is derived as R / N_TA.
  static MacParams make(int m_nodes, int n_pa, int n_tag, double cell_radius_km, int n_ta_zones) {
    detail::require(n_ta_zones >= 1, "MacParams: n_ta_zones must be at least 1");
    MacParams p{m_nodes, n_pa, n_tag, cell_radius_km, cell_radius_km / n_ta_zones, n_ta_zones};
    p.validate();
    return p;
  }

  void validate() const {
    detail::require(m_nodes >= 1 && n_pa >= 1 && n_tag >= 1 && n_ta_zones >= 1,
                    "MacParams: counts must be at least 1");
    detail::require(cell_radius_km > 0.0 && eps_ta_km > 0.0, "MacParams: radius and TA granularity must be positive");
    const auto zones = static_cast<int>(std::ceil(cell_radius_km / eps_ta_km - 1e-9));
    detail::require(zones == n_ta_zones, "MacParams: n_ta_zones=" + std::to_string(n_ta_zones) +
                                             " inconsistent with ceil(R/eps_TA)=" + std::to_string(zones));
  }
};

/// Probability that a uniformly placed node lies in TA annulus d.
inline double ta_zone_prob(const MacParams& mac, int d) {
  detail::require(d >= 0 && d < mac.n_ta_zones, "ta_zone_prob: zone " + std::to_string(d) + " out of range");
  const double r_lo = d * mac.eps_ta_km;
  const double r_hi = std::min((d + 1) * mac.eps_ta_km, mac.cell_radius_km);
  const double r2 = mac.cell_radius_km * mac.cell_radius_km;
  return (r_hi * r_hi - r_lo * r_lo) / r2;
}

/// Binomial pmf of `a` of the other M-1 nodes picking the target's PA.
inline double prob_same_pa(const MacParams& mac, int a) {
  const int n = mac.m_nodes - 1;
  detail::require(a >= 0 && a <= n, "prob_same_pa: a=" + std::to_string(a) + " outside [0, M-1]");
  const double p = 1.0 / mac.n_pa;
  if (mac.n_pa == 1) return a == n ? 1.0 : 0.0;
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(a + 1.0) - std::lgamma(n - a + 1.0);
  return std::exp(log_choose + a * std::log(p) + (n - a) * std::log1p(-p));
}

/// Per-contender survival: a same-PA contender must differ in both tag and TA zone.
inline double contender_clear_prob(const MacParams& mac, int d) {
  return (static_cast<double>(mac.n_tag - 1) / mac.n_tag) * (1.0 - ta_zone_prob(mac, d));
}

/// Success probability of a node in zone d, via the binomial identity
/// sum_a x^a C(n,a) p^a (1-p)^(n-a) = (1 - p(1-x))^n.
inline double ra_success_prop_at_zone(const MacParams& mac, int d) {
  const double x = contender_clear_prob(mac, d);
  return std::pow(1.0 - (1.0 - x) / mac.n_pa, mac.m_nodes - 1);
}

inline double ra_success_prop(const MacParams& mac) {
  mac.validate();
  double p = 0.0;
  for (int d = 0; d < mac.n_ta_zones; ++d) p += ra_success_prop_at_zone(mac, d) * ta_zone_prob(mac, d);
  return p;
}

inline double ra_success_conv(const MacParams& mac) {
  mac.validate();
  return std::pow(static_cast<double>(mac.n_pa - 1) / mac.n_pa, mac.m_nodes - 1);
}

inline double pusch_collision_prop(const MacParams& mac) {
  mac.validate();
  const double cells = static_cast<double>(mac.n_pa) * mac.n_tag;
  return 1.0 - std::pow((cells - 1.0) / cells, mac.m_nodes - 1);
}

inline double pusch_collision_conv(const MacParams& mac) { return 1.0 - ra_success_conv(mac); }

/// Success within k independent attempts of per-attempt probability p.
inline double compose_attempts(double p, int attempts) {
  detail::require(attempts >= 1, "compose_attempts: attempts must be at least 1");
  return 1.0 - std::pow(1.0 - p, attempts);
}

}  // namespace pacr
