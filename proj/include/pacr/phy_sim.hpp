#pragma once

// Monte Carlo of PA detection and TA capture for one target node, run
// through the full receiver.

#include <cstdint>
#include <span>
#include <vector>

#include "pacr/channel.hpp"
#include "pacr/detector.hpp"
#include "pacr/parallel.hpp"
#include "pacr/rng.hpp"

namespace pacr {

/// One deterministic transmit configuration at unit amplitude scale.
struct PhyCase {
  ComplexVec unit_received;
  NodeTx target;

  static PhyCase make(const CellConfig& cfg, std::span<const NodeTx> nodes, int target) {
    return {noiseless_received(cfg, nodes), nodes[static_cast<std::size_t>(target)]};
  }
};

struct PhyCounts {
  std::int64_t trials = 0;
  std::int64_t pa_detected = 0;
  std::int64_t ta_captured = 0;

  PhyCounts& operator+=(const PhyCounts& o) {
    trials += o.trials;
    pa_detected += o.pa_detected;
    ta_captured += o.ta_captured;
    return *this;
  }
};

struct PhyTrialResult {
  bool pa_detected = false;
  bool ta_captured = false;
};

/// PA detected: any lag of the target PA zone reaches gamma_pa. TA captured:
/// additionally the target tag zone's earliest above-threshold lag is the
/// target's own delay.
inline PhyTrialResult run_phy_trial(const Receiver& rx, std::span<const cd> received, const NodeTx& target) {
  const auto& cfg = rx.cell();
  const auto profile = rx.pa_profile(received);
  const double gamma_pa = rx.thresholds().pa_linear(cfg.n_zc);
  PhyTrialResult r;
  for (int tau = target.pa_index * cfg.n_cs; tau < (target.pa_index + 1) * cfg.n_cs && !r.pa_detected; ++tau)
    r.pa_detected = profile[static_cast<std::size_t>(tau)] >= gamma_pa;
  if (!r.pa_detected) return r;
  for (const auto& ta : rx.capture(received, target.pa_index)) {
    if (ta.tag_index == target.tag_index) {
      r.ta_captured = ta.ta_value == target.delay;
      break;
    }
  }
  return r;
}

/// Runs `trials` trials; trial t uses case t mod cases.size() with amplitudes
/// scaled by `scale` and noise drawn from the stream (seed, point, t).
inline PhyCounts simulate_phy(const Receiver& rx, std::span<const PhyCase> cases, double scale, double sigma,
                              std::int64_t trials, std::uint64_t seed, std::uint64_t point) {
  detail::require(!cases.empty(), "simulate_phy: no cases");
  const auto parts = parallel_chunks<PhyCounts>(trials, [&](std::int64_t begin, std::int64_t end, PhyCounts& acc) {
    ComplexVec y;
    for (std::int64_t t = begin; t < end; ++t) {
      const auto& c = cases[static_cast<std::size_t>(t) % cases.size()];
      y = c.unit_received;
      for (auto& v : y) v *= scale;
      auto rng = derive_rng(seed, Stream::kPhyNoise, (point << 32) ^ static_cast<std::uint64_t>(t));
      add_noise(y, sigma, rng);
      const auto r = run_phy_trial(rx, y, c.target);
      ++acc.trials;
      acc.pa_detected += r.pa_detected;
      acc.ta_captured += r.ta_captured;
    }
  });
  PhyCounts total;
  for (const auto& p : parts) total += p;
  return total;
}

}  // namespace pacr
