#pragma once

// Tagged preambles: a PA sequence (root r, shift i*N_CS) mixed with a tag
// sequence (root k_i = f(i), shift l*N_CS).

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "pacr/error.hpp"
#include "pacr/zc.hpp"

namespace pacr {

struct CellConfig {
  int n_zc = kDefaultNzc;
  int n_cs = 0;
  int n_pa = 20;
  int n_tag = 51;
  int pa_root = 1;
  /// Optional explicit tag roots indexed by PA index. Empty selects the default map.
  std::vector<int> tag_roots{};

  /// Builds a config, deriving N_CS = floor(N_ZC / N_tag) when `n_cs` is 0.
  static CellConfig make(int n_zc, int n_pa, int n_tag, int pa_root = 1, int n_cs = 0) {
    CellConfig cfg;
    cfg.n_zc = n_zc;
    cfg.n_pa = n_pa;
    cfg.n_tag = n_tag;
    cfg.pa_root = pa_root;
    cfg.n_cs = n_cs > 0 ? n_cs : (n_tag > 0 ? n_zc / n_tag : 0);
    cfg.validate();
    return cfg;
  }

  [[nodiscard]] ZcParams pa_params() const { return {n_zc, pa_root}; }
  [[nodiscard]] int zone_count() const { return n_zc / n_cs; }

  void validate() const;
};

inline int default_tag_root(int n_zc, int pa_root, int pa_index) {
  int k = ((pa_root + pa_index) % (n_zc - 1)) + 1;
  if (k == pa_root) k = (k % (n_zc - 1)) + 1;
  return k;
}

inline int tag_root_map(const CellConfig& cfg, int pa_index) {
  detail::require(pa_index >= 0 && pa_index < cfg.n_pa,
                  "tag_root_map: PA index " + std::to_string(pa_index) + " outside [0, " +
                      std::to_string(cfg.n_pa) + ")");
  if (!cfg.tag_roots.empty()) return cfg.tag_roots[static_cast<std::size_t>(pa_index)];
  return default_tag_root(cfg.n_zc, cfg.pa_root, pa_index);
}

inline void CellConfig::validate() const {
  pa_params().validate();
  detail::require(n_cs >= 1, "CellConfig: n_cs must be positive");
  detail::require(n_pa >= 1 && n_tag >= 1, "CellConfig: n_pa and n_tag must be positive");
  detail::require(n_pa <= n_zc / n_cs,
                  "CellConfig: n_pa=" + std::to_string(n_pa) + " exceeds floor(n_zc/n_cs)=" +
                      std::to_string(n_zc / n_cs));
  detail::require(n_tag <= n_zc / n_cs,
                  "CellConfig: n_tag=" + std::to_string(n_tag) + " exceeds floor(n_zc/n_cs)=" +
                      std::to_string(n_zc / n_cs));
  detail::require(tag_roots.empty() || tag_roots.size() == static_cast<std::size_t>(n_pa),
                  "CellConfig: tag_roots must list one root per PA index");
  std::set<int> seen;
  for (int i = 0; i < n_pa; ++i) {
    const int k = tag_roots.empty() ? default_tag_root(n_zc, pa_root, i) : tag_roots[static_cast<std::size_t>(i)];
    detail::require(k >= 1 && k < n_zc, "CellConfig: tag root out of range for PA " + std::to_string(i));
    detail::require(k != pa_root, "CellConfig: tag root equals PA root for PA " + std::to_string(i));
    detail::require(seen.insert(k).second, "CellConfig: tag root map is not injective at PA " + std::to_string(i));
  }
}

struct TaggedPreamble {
  int pa_index = 0;
  int tag_index = 0;
  int tag_root = 0;
  double amplitude = 0.0;
  ComplexVec samples;
};

/// X[n] = amplitude * (z_r[(n + i*N_CS) mod N] + z_k[(n + l*N_CS) mod N]).
inline TaggedPreamble build_tagged_preamble(const CellConfig& cfg, int pa_index, int tag_index,
                                            double amplitude) {
  detail::require(amplitude > 0.0, "build_tagged_preamble: amplitude must be positive");
  detail::require(tag_index >= 0 && tag_index < cfg.n_tag,
                  "build_tagged_preamble: tag index " + std::to_string(tag_index) + " outside [0, " +
                      std::to_string(cfg.n_tag) + ")");
  const int tag_root = tag_root_map(cfg, pa_index);
  const auto pa = cyclic_shift(zc_generate(cfg.pa_params()), (pa_index * cfg.n_cs) % cfg.n_zc);
  const auto tag = cyclic_shift(zc_generate({cfg.n_zc, tag_root}), (tag_index * cfg.n_cs) % cfg.n_zc);
  TaggedPreamble out{pa_index, tag_index, tag_root, amplitude, ComplexVec(pa.size())};
  for (std::size_t n = 0; n < pa.size(); ++n) out.samples[n] = amplitude * (pa[n] + tag[n]);
  return out;
}

}  // namespace pacr
