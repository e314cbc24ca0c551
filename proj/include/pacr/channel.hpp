#pragma once

// Single-path PRACH channel: superposition of delayed tagged preambles plus
// circularly symmetric Gaussian noise.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pacr/error.hpp"
#include "pacr/preamble.hpp"
#include "pacr/rng.hpp"
#include "pacr/zc.hpp"

namespace pacr {

struct NodeTx {
  int pa_index = 0;
  int tag_index = 0;
  int delay = 0;  ///< round-trip shift in samples, [0, N_CS)
  double amplitude = 1.0;
};

struct PhyScenario {
  CellConfig cfg;
  std::vector<NodeTx> nodes;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    cfg.validate();
    detail::require(noise_sigma >= 0.0, "PhyScenario: noise_sigma must be non-negative");
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      const auto& node = nodes[m];
      const std::string tag = "PhyScenario: node " + std::to_string(m);
      detail::require(node.delay >= 0 && node.delay < cfg.n_cs, tag + " delay outside [0, n_cs)");
      detail::require(node.pa_index >= 0 && node.pa_index < cfg.n_pa, tag + " PA index out of range");
      detail::require(node.tag_index >= 0 && node.tag_index < cfg.n_tag, tag + " tag index out of range");
      detail::require(node.amplitude >= 0.0, tag + " amplitude must be non-negative");
    }
  }
};

/// Sum over nodes of X_m[(n + t_m) mod N], no noise.
inline ComplexVec noiseless_received(const CellConfig& cfg, std::span<const NodeTx> nodes) {
  ComplexVec y(static_cast<std::size_t>(cfg.n_zc));
  for (const auto& node : nodes) {
    if (node.amplitude == 0.0) continue;
    const auto x = build_tagged_preamble(cfg, node.pa_index, node.tag_index, node.amplitude);
    const auto shifted = rotate(x.samples, node.delay);
    for (std::size_t n = 0; n < y.size(); ++n) y[n] += shifted[n];
  }
  return y;
}

/// Adds W = W_R + jW_I with each component ~ N(0, sigma^2).
inline void add_noise(ComplexVec& y, double sigma, Rng& rng) {
  if (sigma == 0.0) return;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (auto& v : y) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cd(re, im);
  }
}

inline ComplexVec synthesize_received(const PhyScenario& scenario) {
  scenario.validate();
  auto y = noiseless_received(scenario.cfg, scenario.nodes);
  auto rng = derive_rng(scenario.seed, Stream::kPhyNoise, 0);
  add_noise(y, scenario.noise_sigma, rng);
  return y;
}

/// Amplitude-domain SNR: snr_db = 20*log10(beta / sigma).
inline double snr_to_amplitude(double snr_db, double noise_sigma) {
  detail::require(noise_sigma > 0.0, "snr_to_amplitude: noise_sigma must be positive");
  return noise_sigma * std::pow(10.0, snr_db / 20.0);
}

}  // namespace pacr
