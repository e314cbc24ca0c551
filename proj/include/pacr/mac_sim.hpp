#pragma once

// Monte Carlo of one-shot (or repeated) random access at the MAC level,
// comparing tagged-preamble collision resolution with the conventional
// four-step procedure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pacr/analytic.hpp"
#include "pacr/error.hpp"
#include "pacr/parallel.hpp"
#include "pacr/rng.hpp"

namespace pacr {

struct MacNode {
  int pa = 0;
  int tag = 0;
  int ta_zone = 0;
};

/// Which event counts as a PUSCH collision under the proposed scheme.
enum class CollisionRule {
  kSamePaTag,      ///< another node shares (PA, tag)
  kSamePaTagZone,  ///< another node shares (PA, tag, TA zone): the RAR actually reaches both
};

/// What a retrying node redraws. PA and tag are always redrawn.
enum class RetryZone {
  kFixed,   ///< stationary node keeps its TA zone
  kRedraw,  ///< fully independent attempts
};

enum class PropOutcome { kSuccess, kCollision, kOtherFailure };

struct NodeFlags {
  bool success_prop = false;
  bool success_conv = false;
  bool collision_prop = false;
  bool collision_conv = false;

  [[nodiscard]] PropOutcome prop_outcome() const {
    if (success_prop) return PropOutcome::kSuccess;
    return collision_prop ? PropOutcome::kCollision : PropOutcome::kOtherFailure;
  }
};

/// Samples TA zones with the annulus probabilities P_d by inverse CDF.
class ZoneSampler {
 public:
  explicit ZoneSampler(const MacParams& mac) {
    double acc = 0.0;
    for (int d = 0; d < mac.n_ta_zones; ++d) {
      acc += ta_zone_prob(mac, d);
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  int operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

inline MacNode draw_mac_node(const MacParams& mac, const ZoneSampler& zones, Rng& rng) {
  MacNode n;
  n.pa = std::uniform_int_distribution<int>(0, mac.n_pa - 1)(rng);
  n.tag = std::uniform_int_distribution<int>(0, mac.n_tag - 1)(rng);
  n.ta_zone = zones(rng);
  return n;
}

/// Applies the success and collision rules to one PRACH opportunity.
///
/// Proposed success: every other node on the same PA differs in both tag
/// and TA zone. Conventional success: the PA is unique.
inline std::vector<NodeFlags> evaluate_nodes(const std::vector<MacNode>& nodes,
                                             CollisionRule rule = CollisionRule::kSamePaTag) {
  std::vector<NodeFlags> out(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    bool clear = true;
    bool unique_pa = true;
    bool shared_cell = false;
    for (std::size_t o = 0; o < nodes.size(); ++o) {
      if (o == m || nodes[o].pa != nodes[m].pa) continue;
      unique_pa = false;
      const bool same_tag = nodes[o].tag == nodes[m].tag;
      const bool same_zone = nodes[o].ta_zone == nodes[m].ta_zone;
      if (same_tag || same_zone) clear = false;
      if (same_tag && (rule == CollisionRule::kSamePaTag || same_zone)) shared_cell = true;
    }
    out[m] = {clear, unique_pa, shared_cell, !unique_pa};
  }
  return out;
}

struct MacTrial {
  std::vector<MacNode> nodes;
  std::vector<NodeFlags> flags;
};

inline MacTrial run_mac_trial(const MacParams& mac, Rng& rng, CollisionRule rule = CollisionRule::kSamePaTag) {
  const ZoneSampler zones(mac);
  MacTrial t;
  t.nodes.reserve(static_cast<std::size_t>(mac.m_nodes));
  for (int m = 0; m < mac.m_nodes; ++m) t.nodes.push_back(draw_mac_node(mac, zones, rng));
  t.flags = evaluate_nodes(t.nodes, rule);
  return t;
}

struct MacScenario {
  MacParams mac;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  int attempts = 1;
  RetryZone retry = RetryZone::kFixed;
  CollisionRule rule = CollisionRule::kSamePaTag;

  void validate() const {
    mac.validate();
    detail::require(trials >= 1, "MacScenario: trials must be at least 1");
    detail::require(attempts >= 1, "MacScenario: attempts must be at least 1");
  }
};

struct MacOutcome {
  double success_rate_prop = 0.0;
  double success_rate_conv = 0.0;
  double collision_rate_prop = 0.0;
  double collision_rate_conv = 0.0;
  std::int64_t trials = 0;

  /// 1.96 * sqrt(p(1-p)/trials); a trial-level average is at most as
  /// variable as one Bernoulli draw per trial.
  [[nodiscard]] double ci_halfwidth(double rate) const {
    return 1.96 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
  }
};

namespace detail {

struct MacCounts {
  std::int64_t success_prop = 0;
  std::int64_t success_conv = 0;
  std::int64_t collision_prop = 0;
  std::int64_t collision_conv = 0;
};

}  // namespace detail

/// Collision rates refer to the first attempt; success rates to success
/// within `attempts` attempts. On a retry, nodes that already succeeded are
/// replaced by fresh arrivals so that every attempt sees M contenders.
inline MacOutcome run_mac_sim(const MacScenario& scn) {
  scn.validate();
  const auto& mac = scn.mac;
  const ZoneSampler zones(mac);
  const auto m_nodes = static_cast<std::size_t>(mac.m_nodes);

  const auto parts = parallel_chunks<detail::MacCounts>(
      scn.trials, [&](std::int64_t begin, std::int64_t end, detail::MacCounts& acc) {
        std::vector<MacNode> nodes(m_nodes);
        std::vector<char> done_prop(m_nodes), done_conv(m_nodes);
        for (std::int64_t t = begin; t < end; ++t) {
          auto rng = derive_rng(scn.seed, Stream::kMacTrial, static_cast<std::uint64_t>(t));
          for (auto& n : nodes) n = draw_mac_node(mac, zones, rng);
          auto flags = evaluate_nodes(nodes, scn.rule);
          for (std::size_t m = 0; m < m_nodes; ++m) {
            done_prop[m] = flags[m].success_prop;
            done_conv[m] = flags[m].success_conv;
            acc.collision_prop += flags[m].collision_prop;
            acc.collision_conv += flags[m].collision_conv;
          }
          for (int a = 1; a < scn.attempts; ++a) {
            for (std::size_t m = 0; m < m_nodes; ++m) {
              const int kept_zone = nodes[m].ta_zone;
              nodes[m] = draw_mac_node(mac, zones, rng);
              if (scn.retry == RetryZone::kFixed && !done_prop[m]) nodes[m].ta_zone = kept_zone;
            }
            flags = evaluate_nodes(nodes, scn.rule);
            for (std::size_t m = 0; m < m_nodes; ++m) {
              done_prop[m] = done_prop[m] || flags[m].success_prop;
              done_conv[m] = done_conv[m] || flags[m].success_conv;
            }
          }
          for (std::size_t m = 0; m < m_nodes; ++m) {
            acc.success_prop += done_prop[m];
            acc.success_conv += done_conv[m];
          }
        }
      });

  detail::MacCounts total;
  for (const auto& p : parts) {
    total.success_prop += p.success_prop;
    total.success_conv += p.success_conv;
    total.collision_prop += p.collision_prop;
    total.collision_conv += p.collision_conv;
  }
  const double denom = static_cast<double>(scn.trials) * static_cast<double>(m_nodes);
  MacOutcome out;
  out.success_rate_prop = static_cast<double>(total.success_prop) / denom;
  out.success_rate_conv = static_cast<double>(total.success_conv) / denom;
  out.collision_rate_prop = static_cast<double>(total.collision_prop) / denom;
  out.collision_rate_conv = static_cast<double>(total.collision_conv) / denom;
  out.trials = scn.trials;
  return out;
}

}  // namespace pacr
