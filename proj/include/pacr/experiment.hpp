#pragma once

// Declarative experiment runner: JSON config in, curve points and CSV out.
//
// Config schema (every key optional unless noted; unknown keys are errors):
//
//   {
//     "experiment": "phy_detection" | "ra_success" | "pusch_collision",  (required)
//     "seed": 1, "trials": 10000, "output": "curve.csv",
//     "thresholds": { "gamma_pa_db": -16, "gamma_tag_db": -16 },
//     "phy": {
//       "n_zc": 839, "n_pa": 20, "n_tag": 51, "n_cs": 0, "pa_root": 1,
//       "noise_sigma": 1.0, "snr_db": [-20, -18, ..., -10],
//       "pa_indices": [1,1,2,3,4], "tag_indices": [10,20,30,40,50],
//       "delays": [3,8,5,12,1], "target": 0, "random_tag_draws": 1000
//     },
//     "mac": {
//       "n_pa": 20, "m_values": [2, 4, ..., 20], "attempts": 1,
//       "retry_zone": "fixed" | "redraw",
//       "collision_rule": "same_pa_tag" | "same_pa_tag_zone",
//       "cells": [ { "radius_km": 0.8, "n_tag": 71, "n_ta_zones": 10 }, ... ]
//     }
//   }

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacr/analytic.hpp"
#include "pacr/channel.hpp"
#include "pacr/detector.hpp"
#include "pacr/error.hpp"
#include "pacr/mac_sim.hpp"
#include "pacr/phy_sim.hpp"
#include "pacr/rng.hpp"

namespace pacr {

enum class ExperimentKind { kPhyDetection, kRaSuccess, kPuschCollision };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kPhyDetection: return "phy_detection";
    case ExperimentKind::kRaSuccess: return "ra_success";
    case ExperimentKind::kPuschCollision: return "pusch_collision";
  }
  return "?";
}

struct CellCase {
  double radius_km = 0.8;
  int n_tag = 71;
  int n_ta_zones = 10;

  [[nodiscard]] std::string label() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "R=%.1fkm", radius_km);
    return buf;
  }
};

struct PhyExperiment {
  int n_zc = kDefaultNzc;
  int n_pa = 20;
  int n_tag = 51;
  int n_cs = 0;
  int pa_root = 1;
  double noise_sigma = 1.0;
  std::vector<double> snr_db{-20, -18, -16, -14, -12, -10};
  std::vector<int> pa_indices{1, 1, 2, 3, 4};
  std::vector<int> tag_indices{10, 20, 30, 40, 50};
  std::vector<int> delays{3, 8, 5, 12, 1};
  int target = 0;
  int random_tag_draws = 1000;

  [[nodiscard]] CellConfig cell() const { return CellConfig::make(n_zc, n_pa, n_tag, pa_root, n_cs); }

  [[nodiscard]] std::vector<NodeTx> nodes(std::span<const int> tags) const {
    std::vector<NodeTx> out;
    for (std::size_t m = 0; m < pa_indices.size(); ++m) out.push_back({pa_indices[m], tags[m], delays[m], 1.0});
    return out;
  }
};

struct MacExperiment {
  int n_pa = 20;
  std::vector<int> m_values{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  int attempts = 1;
  RetryZone retry = RetryZone::kFixed;
  CollisionRule rule = CollisionRule::kSamePaTag;
  std::vector<CellCase> cells{{0.8, 71, 10}, {1.6, 51, 20}, {2.4, 38, 30}};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kRaSuccess;
  std::uint64_t seed = 1;
  std::int64_t trials = 10000;
  std::string output = "curve.csv";
  DetectionThresholds thresholds{};
  PhyExperiment phy{};
  MacExperiment mac{};

  void validate() const;
};

struct CurvePoint {
  double x = 0.0;
  double y_analytic = 0.0;
  double y_montecarlo = 0.0;
  double ci_halfwidth = 0.0;
  std::string case_label;
};

namespace detail {

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  [[nodiscard]] std::string where(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), where(key));
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError(where(key) + ": unknown key");
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path + ": " + what);
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  detail::Section root(j, "");
  detail::check(root.has("experiment"), "experiment", "required key missing");
  std::string kind;
  root.read("experiment", kind);
  if (kind == "phy_detection") cfg.kind = ExperimentKind::kPhyDetection;
  else if (kind == "ra_success") cfg.kind = ExperimentKind::kRaSuccess;
  else if (kind == "pusch_collision") cfg.kind = ExperimentKind::kPuschCollision;
  else throw ConfigError("experiment: unknown experiment kind '" + kind + "'");

  root.read("seed", cfg.seed);
  root.read("trials", cfg.trials);
  root.read("output", cfg.output);

  if (root.has("thresholds")) {
    auto t = root.child("thresholds");
    t.read("gamma_pa_db", cfg.thresholds.gamma_pa_db);
    t.read("gamma_tag_db", cfg.thresholds.gamma_tag_db);
    t.finish();
  }
  if (root.has("phy")) {
    auto p = root.child("phy");
    auto& phy = cfg.phy;
    p.read("n_zc", phy.n_zc);
    p.read("n_pa", phy.n_pa);
    p.read("n_tag", phy.n_tag);
    p.read("n_cs", phy.n_cs);
    p.read("pa_root", phy.pa_root);
    p.read("noise_sigma", phy.noise_sigma);
    p.read("snr_db", phy.snr_db);
    p.read("pa_indices", phy.pa_indices);
    p.read("tag_indices", phy.tag_indices);
    p.read("delays", phy.delays);
    p.read("target", phy.target);
    p.read("random_tag_draws", phy.random_tag_draws);
    p.finish();
  }
  if (root.has("mac")) {
    auto m = root.child("mac");
    auto& mac = cfg.mac;
    m.read("n_pa", mac.n_pa);
    m.read("m_values", mac.m_values);
    m.read("attempts", mac.attempts);
    std::string retry = mac.retry == RetryZone::kFixed ? "fixed" : "redraw";
    m.read("retry_zone", retry);
    if (retry == "fixed") mac.retry = RetryZone::kFixed;
    else if (retry == "redraw") mac.retry = RetryZone::kRedraw;
    else throw ConfigError(m.where("retry_zone") + ": expected 'fixed' or 'redraw'");
    std::string rule = mac.rule == CollisionRule::kSamePaTag ? "same_pa_tag" : "same_pa_tag_zone";
    m.read("collision_rule", rule);
    if (rule == "same_pa_tag") mac.rule = CollisionRule::kSamePaTag;
    else if (rule == "same_pa_tag_zone") mac.rule = CollisionRule::kSamePaTagZone;
    else throw ConfigError(m.where("collision_rule") + ": expected 'same_pa_tag' or 'same_pa_tag_zone'");
    if (m.has("cells")) {
      const auto& arr = m.raw("cells");
      detail::check(arr.is_array(), m.where("cells"), "expected an array");
      mac.cells.clear();
      for (std::size_t c = 0; c < arr.size(); ++c) {
        detail::Section cs(arr[c], m.where("cells") + "[" + std::to_string(c) + "]");
        CellCase cell;
        cs.read("radius_km", cell.radius_km);
        cs.read("n_tag", cell.n_tag);
        cs.read("n_ta_zones", cell.n_ta_zones);
        cs.finish();
        mac.cells.push_back(cell);
      }
    }
    m.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["output"] = cfg.output;
  j["thresholds"] = {{"gamma_pa_db", cfg.thresholds.gamma_pa_db}, {"gamma_tag_db", cfg.thresholds.gamma_tag_db}};
  const auto& p = cfg.phy;
  j["phy"] = {{"n_zc", p.n_zc},
              {"n_pa", p.n_pa},
              {"n_tag", p.n_tag},
              {"n_cs", p.n_cs},
              {"pa_root", p.pa_root},
              {"noise_sigma", p.noise_sigma},
              {"snr_db", p.snr_db},
              {"pa_indices", p.pa_indices},
              {"tag_indices", p.tag_indices},
              {"delays", p.delays},
              {"target", p.target},
              {"random_tag_draws", p.random_tag_draws}};
  const auto& m = cfg.mac;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : m.cells)
    cells.push_back({{"radius_km", c.radius_km}, {"n_tag", c.n_tag}, {"n_ta_zones", c.n_ta_zones}});
  j["mac"] = {{"n_pa", m.n_pa},
              {"m_values", m.m_values},
              {"attempts", m.attempts},
              {"retry_zone", m.retry == RetryZone::kFixed ? "fixed" : "redraw"},
              {"collision_rule", m.rule == CollisionRule::kSamePaTag ? "same_pa_tag" : "same_pa_tag_zone"},
              {"cells", cells}};
  return j;
}

inline void ExperimentConfig::validate() const {
  using detail::check;
  check(trials >= 1, "trials", "must be at least 1");
  check(!output.empty(), "output", "must not be empty");
  if (kind == ExperimentKind::kPhyDetection) {
    const auto& p = phy;
    check(is_prime(p.n_zc), "phy.n_zc", "must be prime");
    check(!p.snr_db.empty(), "phy.snr_db", "must not be empty");
    check(p.noise_sigma > 0.0, "phy.noise_sigma", "must be positive");
    check(!p.pa_indices.empty(), "phy.pa_indices", "must not be empty");
    check(p.tag_indices.size() == p.pa_indices.size(), "phy.tag_indices", "length must match phy.pa_indices");
    check(p.delays.size() == p.pa_indices.size(), "phy.delays", "length must match phy.pa_indices");
    check(p.target >= 0 && static_cast<std::size_t>(p.target) < p.pa_indices.size(), "phy.target", "out of range");
    check(p.random_tag_draws >= 0, "phy.random_tag_draws", "must be non-negative");
    CellConfig cell;
    try {
      cell = p.cell();
      PhyScenario{cell, p.nodes(p.tag_indices), p.noise_sigma, seed}.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("phy: ") + e.what());
    }
  } else {
    const auto& m = mac;
    check(m.n_pa >= 1, "mac.n_pa", "must be at least 1");
    check(!m.m_values.empty(), "mac.m_values", "must not be empty");
    for (std::size_t k = 0; k < m.m_values.size(); ++k)
      check(m.m_values[k] >= 1, "mac.m_values[" + std::to_string(k) + "]", "must be at least 1");
    check(m.attempts >= 1, "mac.attempts", "must be at least 1");
    check(!m.cells.empty(), "mac.cells", "must not be empty");
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
      const auto& cell = m.cells[c];
      const std::string path = "mac.cells[" + std::to_string(c) + "]";
      check(cell.radius_km > 0.0, path + ".radius_km", "must be positive");
      check(cell.n_tag >= 1, path + ".n_tag", "must be at least 1");
      check(cell.n_ta_zones >= 1, path + ".n_ta_zones", "must be at least 1");
    }
  }
}

/// Effective defaults for an experiment kind.
inline ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.trials = kind == ExperimentKind::kPhyDetection ? 10000 : 100000;
  cfg.output = std::string(to_string(kind)) + ".csv";
  return cfg;
}

/// Tag indices of random-L draw `d`: every node's tag uniform in [0, N_tag).
inline std::vector<int> random_tag_draw(const PhyExperiment& phy, std::uint64_t seed, int d) {
  auto rng = derive_rng(seed, Stream::kPhyTagDraw, static_cast<std::uint64_t>(d));
  std::uniform_int_distribution<int> tag(0, phy.n_tag - 1);
  std::vector<int> tags(phy.pa_indices.size());
  for (auto& t : tags) t = tag(rng);
  return tags;
}

namespace detail {

inline double binomial_halfwidth(double p, std::int64_t trials) {
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

inline std::vector<CurvePoint> run_phy_experiment(const ExperimentConfig& cfg) {
  const auto& p = cfg.phy;
  const auto cell = p.cell();
  const Receiver rx(cell, cfg.thresholds);

  const auto fixed_nodes = p.nodes(p.tag_indices);
  const auto fixed_geo = PhyGeometry::compute(cell, fixed_nodes, p.target);
  const std::vector<PhyCase> fixed_case{PhyCase::make(cell, fixed_nodes, p.target)};

  std::vector<PhyGeometry> random_geo;
  std::vector<PhyCase> random_cases;
  for (int d = 0; d < p.random_tag_draws; ++d) {
    const auto nodes = p.nodes(random_tag_draw(p, cfg.seed, d));
    random_geo.push_back(PhyGeometry::compute(cell, nodes, p.target));
    random_cases.push_back(PhyCase::make(cell, nodes, p.target));
  }

  std::vector<CurvePoint> out;
  for (std::size_t s = 0; s < p.snr_db.size(); ++s) {
    const double snr = p.snr_db[s];
    const double beta = snr_to_amplitude(snr, p.noise_sigma);

    const auto an = target_detection(fixed_geo, p.noise_sigma, cfg.thresholds, beta);
    const auto mc = simulate_phy(rx, fixed_case, beta, p.noise_sigma, cfg.trials, cfg.seed, 2 * s);
    const double mc_pa = static_cast<double>(mc.pa_detected) / static_cast<double>(mc.trials);
    const double mc_ta = static_cast<double>(mc.ta_captured) / static_cast<double>(mc.trials);
    out.push_back({snr, an.p_pa, mc_pa, binomial_halfwidth(mc_pa, mc.trials), "fixed_L/PA_detection"});
    out.push_back({snr, an.p_ta, mc_ta, binomial_halfwidth(mc_ta, mc.trials), "fixed_L/TA_capture"});

    if (random_geo.empty()) continue;
    TargetDetection avg;
    for (const auto& g : random_geo) {
      const auto r = target_detection(g, p.noise_sigma, cfg.thresholds, beta);
      avg.p_pa += r.p_pa;
      avg.p_ta += r.p_ta;
    }
    avg.p_pa /= static_cast<double>(random_geo.size());
    avg.p_ta /= static_cast<double>(random_geo.size());
    const auto rmc = simulate_phy(rx, random_cases, beta, p.noise_sigma, cfg.trials, cfg.seed, 2 * s + 1);
    const double rmc_pa = static_cast<double>(rmc.pa_detected) / static_cast<double>(rmc.trials);
    const double rmc_ta = static_cast<double>(rmc.ta_captured) / static_cast<double>(rmc.trials);
    out.push_back({snr, avg.p_pa, rmc_pa, binomial_halfwidth(rmc_pa, rmc.trials), "random_L/PA_detection"});
    out.push_back({snr, avg.p_ta, rmc_ta, binomial_halfwidth(rmc_ta, rmc.trials), "random_L/TA_capture"});
  }
  return out;
}

inline std::vector<CurvePoint> run_mac_experiment(const ExperimentConfig& cfg) {
  const auto& m = cfg.mac;
  const bool success = cfg.kind == ExperimentKind::kRaSuccess;
  std::vector<CurvePoint> out;
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const auto& cell = m.cells[c];
    for (int m_nodes : m.m_values) {
      const auto params = MacParams::make(m_nodes, m.n_pa, cell.n_tag, cell.radius_km, cell.n_ta_zones);
      MacScenario scn{params, cfg.trials, cfg.seed, success ? m.attempts : 1, m.retry, m.rule};
      const auto mc = run_mac_sim(scn);
      const double x = m_nodes;
      if (success) {
        const double an = compose_attempts(ra_success_prop(params), m.attempts);
        out.push_back({x, an, mc.success_rate_prop, mc.ci_halfwidth(mc.success_rate_prop), cell.label() + "/proposed"});
        if (c == 0) {
          const double an_conv = compose_attempts(ra_success_conv(params), m.attempts);
          out.push_back({x, an_conv, mc.success_rate_conv, mc.ci_halfwidth(mc.success_rate_conv), "conventional"});
        }
      } else {
        out.push_back({x, pusch_collision_prop(params), mc.collision_rate_prop,
                       mc.ci_halfwidth(mc.collision_rate_prop), cell.label() + "/proposed"});
        if (c == 0)
          out.push_back({x, pusch_collision_conv(params), mc.collision_rate_conv,
                         mc.ci_halfwidth(mc.collision_rate_conv), "conventional"});
      }
    }
  }
  return out;
}

}  // namespace detail

/// Runs every sweep point; rows come back ordered by case label, then x.
inline std::vector<CurvePoint> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto points = cfg.kind == ExperimentKind::kPhyDetection ? detail::run_phy_experiment(cfg)
                                                           : detail::run_mac_experiment(cfg);
  std::stable_sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    if (a.case_label != b.case_label) return a.case_label < b.case_label;
    return a.x < b.x;
  });
  return points;
}

inline constexpr const char* kCsvHeader = "experiment,case,x,y_analytic,y_montecarlo,ci_halfwidth,trials,seed";

inline std::string format_csv(const ExperimentConfig& cfg, std::span<const CurvePoint> points) {
  detail::require(!points.empty(), "write_csv: no points to write");
  std::string out = std::string(kCsvHeader) + "\n";
  char row[512];
  for (const auto& p : points) {
    std::snprintf(row, sizeof row, "%s,%s,%.6g,%.6g,%.6g,%.6g,%lld,%llu\n", to_string(cfg.kind),
                  p.case_label.c_str(), p.x, p.y_analytic, p.y_montecarlo, p.ci_halfwidth,
                  static_cast<long long>(cfg.trials), static_cast<unsigned long long>(cfg.seed));
    out += row;
  }
  return out;
}

inline void write_csv(const ExperimentConfig& cfg, std::span<const CurvePoint> points,
                      const std::filesystem::path& path) {
  const auto text = format_csv(cfg, points);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace pacr
