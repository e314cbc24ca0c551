#pragma once

// Acceptance checks. Each check returns one pass/fail verdict with the
// evidence it was based on; the acceptance test binary and `pacr verify`
// both run them.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pacr/analytic.hpp"
#include "pacr/channel.hpp"
#include "pacr/detector.hpp"
#include "pacr/experiment.hpp"
#include "pacr/mac_sim.hpp"
#include "pacr/phy_sim.hpp"
#include "pacr/special.hpp"
#include "pacr/testing/oracles.hpp"
#include "pacr/zc.hpp"

namespace pacr::verify {

inline constexpr std::uint64_t kSeed = 1;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = true;
  double seconds = 0.0;
  std::vector<std::string> lines;  ///< one line per sub-check, failures prefixed "FAIL"

  void check(bool ok, const std::string& line) {
    passed = passed && ok;
    lines.push_back((ok ? "ok   " : "FAIL ") + line);
  }
};

struct Options {
  std::filesystem::path golden_dir;
  std::int64_t mac_trials = 100000;
  std::int64_t phy_trials = 10000;
  int random_tag_draws = 1000;
};

namespace detail {

inline std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// First SNR at which a curve rises through p, refined by bisection.
inline double crossing_snr(const std::function<double(double)>& curve, double p, double lo = -30.0,
                           double hi = 0.0, double step = 0.05) {
  double prev = lo;
  if (curve(prev) >= p) return lo;
  for (double s = lo + step; s <= hi + 1e-12; s += step) {
    if (curve(s) >= p) {
      double a = prev, b = s;
      for (int it = 0; it < 40; ++it) {
        const double m = 0.5 * (a + b);
        (curve(m) >= p ? b : a) = m;
      }
      return 0.5 * (a + b);
    }
    prev = s;
  }
  return std::nan("");
}

}  // namespace detail

// 1. Closed-form MAC values against the published percentages.
inline CriterionResult mac_closed_form() {
  CriterionResult r{1, "MAC closed-form reproduction"};
  detail::Stopwatch sw;
  auto pp = [&](const std::string& label, double value, double expected_pct, double tol_pp) {
    const double pct = 100.0 * value;
    r.check(std::abs(pct - expected_pct) <= tol_pp,
            detail::fmt("%-44s %8.4f%%  expected %.2f%% +/- %.2f pp", label.c_str(), pct, expected_pct, tol_pp));
  };
  const auto big = MacParams::make(20, 20, 38, 2.4, 30);
  const auto mid = MacParams::make(20, 20, 51, 1.6, 20);
  const auto small = MacParams::make(20, 20, 71, 0.8, 10);
  pp("conventional success, M=20", ra_success_conv(big), 37.7, 0.1);
  pp("proposed success, R=2.4 km", ra_success_prop(big), 93.6, 0.1);
  pp("proposed success, R=1.6 km", ra_success_prop(mid), 92.3, 0.1);
  pp("proposed success, R=0.8 km", ra_success_prop(small), 87.2, 0.1);
  pp("proposed success x2 attempts, R=2.4 km", compose_attempts(ra_success_prop(big), 2), 99.6, 0.1);
  pp("proposed success x2 attempts, R=1.6 km", compose_attempts(ra_success_prop(mid), 2), 99.4, 0.1);
  pp("proposed success x2 attempts, R=0.8 km", compose_attempts(ra_success_prop(small), 2), 98.4, 0.1);
  pp("conventional success x2 attempts", compose_attempts(ra_success_conv(big), 2), 61.2, 0.1);
  pp("proposed PUSCH collision, N_tag=38", pusch_collision_prop(big), 2.47, 0.1);
  pp("proposed PUSCH collision, N_tag=51 (closed form)", pusch_collision_prop(mid), 1.85, 0.1);
  pp("proposed PUSCH collision, N_tag=51 (vs simulated)", pusch_collision_prop(mid), 1.82, 0.15);
  pp("proposed PUSCH collision, N_tag=71 (closed form)", pusch_collision_prop(small), 1.33, 0.1);
  pp("proposed PUSCH collision, N_tag=71 (vs simulated)", pusch_collision_prop(small), 1.43, 0.15);
  r.seconds = sw.seconds();
  r.check(r.seconds < 1.0, detail::fmt("runtime %.3f s < 1 s", r.seconds));
  return r;
}

// 2. MAC Monte Carlo against the closed forms.
inline CriterionResult mac_monte_carlo(const Options& opt) {
  CriterionResult r{2, "MAC Monte Carlo vs analytic"};
  detail::Stopwatch sw;
  const std::vector<CellCase> cells{{0.8, 71, 10}, {1.6, 51, 20}, {2.4, 38, 30}};
  for (const auto& cell : cells) {
    for (int m : {2, 5, 10, 20}) {
      const auto mac = MacParams::make(m, 20, cell.n_tag, cell.radius_km, cell.n_ta_zones);
      const auto mc = run_mac_sim({mac, opt.mac_trials, kSeed, 1, RetryZone::kFixed, CollisionRule::kSamePaTag});
      auto cmp = [&](const char* what, double sim, double an) {
        const double hw = 1.96 * std::sqrt(an * (1.0 - an) / static_cast<double>(opt.mac_trials));
        r.check(std::abs(sim - an) <= hw, detail::fmt("%s M=%-2d %-18s mc=%.5f analytic=%.5f |d|=%.5f ci=%.5f",
                                                      cell.label().c_str(), m, what, sim, an, std::abs(sim - an), hw));
      };
      cmp("success proposed", mc.success_rate_prop, ra_success_prop(mac));
      cmp("success conv", mc.success_rate_conv, ra_success_conv(mac));
      cmp("collision proposed", mc.collision_rate_prop, pusch_collision_prop(mac));
    }
  }
  r.seconds = sw.seconds();
  r.check(r.seconds < 120.0, detail::fmt("runtime %.1f s < 120 s", r.seconds));
  return r;
}

// 3. PHY Monte Carlo through the receiver against the Rician closed forms.
inline CriterionResult phy_monte_carlo(const Options& opt) {
  CriterionResult r{3, "PHY analytic vs Monte Carlo (fixed-L scenario)"};
  detail::Stopwatch sw;
  const auto phy = default_config(ExperimentKind::kPhyDetection).phy;
  const DetectionThresholds thr{};
  const auto cell = phy.cell();
  const auto nodes = phy.nodes(phy.tag_indices);
  const auto geo = PhyGeometry::compute(cell, nodes, phy.target);
  const Receiver rx(cell, thr);
  const std::vector<PhyCase> cases{PhyCase::make(cell, nodes, phy.target)};
  std::uint64_t point = 0;
  for (double snr : {-20.0, -18.0, -16.0, -14.0, -12.0, -10.0}) {
    const double beta = snr_to_amplitude(snr, phy.noise_sigma);
    const auto an = target_detection(geo, phy.noise_sigma, thr, beta);
    const auto mc = simulate_phy(rx, cases, beta, phy.noise_sigma, opt.phy_trials, kSeed, point++);
    const auto n = static_cast<double>(mc.trials);
    r.check(testing::binomial_consistent(mc.pa_detected, mc.trials, an.p_pa),
            detail::fmt("SNR %+5.1f dB P_PA mc=%.4f analytic=%.4f", snr, mc.pa_detected / n, an.p_pa));
    r.check(testing::binomial_consistent(mc.ta_captured, mc.trials, an.p_ta),
            detail::fmt("SNR %+5.1f dB P_TA mc=%.4f analytic=%.4f", snr, mc.ta_captured / n, an.p_ta));
  }
  r.seconds = sw.seconds();
  r.check(r.seconds < 600.0, detail::fmt("runtime %.1f s < 600 s", r.seconds));
  return r;
}

// 4. Qualitative shape of the detection curves.
inline CriterionResult phy_curve_shape(const Options& opt) {
  CriterionResult r{4, "PHY curve shape (TA gap, random-L shift)"};
  detail::Stopwatch sw;
  const auto phy = default_config(ExperimentKind::kPhyDetection).phy;
  const DetectionThresholds thr{};
  const auto cell = phy.cell();
  const double sigma = phy.noise_sigma;
  const auto fixed = PhyGeometry::compute(cell, phy.nodes(phy.tag_indices), phy.target);
  std::vector<PhyGeometry> random;
  for (int d = 0; d < opt.random_tag_draws; ++d)
    random.push_back(PhyGeometry::compute(cell, phy.nodes(random_tag_draw(phy, kSeed, d)), phy.target));

  auto fixed_pa = [&](double s) { return target_detection(fixed, sigma, thr, snr_to_amplitude(s, sigma)).p_pa; };
  auto fixed_ta = [&](double s) { return target_detection(fixed, sigma, thr, snr_to_amplitude(s, sigma)).p_ta; };
  auto random_ta = [&](double s) {
    double acc = 0.0;
    for (const auto& g : random) acc += target_detection(g, sigma, thr, snr_to_amplitude(s, sigma)).p_ta;
    return acc / static_cast<double>(random.size());
  };

  // Monotone S-curve over the swept range.
  double prev = 0.0;
  bool monotone = true;
  for (double s = -20.0; s <= -10.0; s += 0.5) {
    const double v = fixed_pa(s);
    monotone = monotone && v >= prev;
    prev = v;
  }
  r.check(monotone && fixed_pa(-20.0) < 0.5 && fixed_pa(-10.0) > 0.9,
          detail::fmt("P_PA rises monotonically through the sweep: %.4f at -20 dB, %.4f at -10 dB", fixed_pa(-20.0),
                      fixed_pa(-10.0)));
  for (double p : {0.5, 0.9}) {
    const double s_pa = detail::crossing_snr(fixed_pa, p);
    const double s_ta = detail::crossing_snr(fixed_ta, p);
    const double s_rta = detail::crossing_snr(random_ta, p);
    r.check(s_ta - s_pa < 1.0,
            detail::fmt("p=%.1f: P_TA reaches p %.2f dB after P_PA (%.2f vs %.2f dB), limit < 1 dB", p, s_ta - s_pa,
                        s_ta, s_pa));
    r.check(std::abs(s_rta - s_ta) <= 0.5,
            detail::fmt("p=%.1f: random-L P_TA shifted %.2f dB from fixed-L (%.2f vs %.2f dB), limit <= 0.5 dB", p,
                        s_rta - s_ta, s_rta, s_ta));
  }
  r.seconds = sw.seconds();
  return r;
}

// 5. Noiseless protocol logic over random small scenarios.
inline CriterionResult protocol_properties(int cases = 1000) {
  CriterionResult r{5, "Protocol logic (multi-TA capture, duplicate-TA suppression)"};
  detail::Stopwatch sw;
  // Thresholds sit above the worst-case coherent sum of unit cross terms
  // (2M - 1 <= 11) and below the weakest main lobe (sqrt(N) - 11).
  const DetectionThresholds thr{-6.0, -6.0};
  const auto cell = CellConfig::make(kDefaultNzc, 8, 51);
  const Receiver rx(cell, thr);
  int capture_failures = 0, suppression_failures = 0, uniqueness_failures = 0, grant_failures = 0;
  int duplicate_cases = 0, multi_ta_cases = 0;
  for (int c = 0; c < cases; ++c) {
    auto rng = derive_rng(kSeed, Stream::kProperty, static_cast<std::uint64_t>(c));
    const int m = std::uniform_int_distribution<int>(1, 6)(rng);
    std::uniform_int_distribution<int> pa(0, 3), tag(0, cell.n_tag - 1);
    // Narrow delay range to make identical TAs on one PA common.
    std::uniform_int_distribution<int> delay(0, c % 2 == 0 ? 3 : cell.n_cs - 1);
    std::vector<NodeTx> nodes;
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(nodes.size()) < m) {
      NodeTx n{pa(rng), tag(rng), delay(rng), 1.0};
      if (used.insert({n.pa_index, n.tag_index}).second) nodes.push_back(n);
    }
    const auto report = rx.detect(noiseless_received(cell, nodes));

    std::map<int, std::set<std::pair<int, int>>> expected;
    for (const auto& n : nodes) expected[n.pa_index].insert({n.tag_index, n.delay});
    bool capture_ok = report.pas.size() == expected.size();
    for (const auto& pa_det : report.pas) {
      std::set<std::pair<int, int>> got;
      for (const auto& ta : pa_det.tas) got.insert({ta.tag_index, ta.ta_value});
      capture_ok = capture_ok && expected.contains(pa_det.pa_index) && got == expected[pa_det.pa_index] &&
                   got.size() == pa_det.tas.size();
      if (pa_det.tas.size() >= 2) ++multi_ta_cases;
    }
    capture_failures += !capture_ok;

    const auto rars = generate_rars(report);
    std::set<std::pair<int, int>> rar_keys;
    std::set<int> grants;
    for (const auto& rar : rars) {
      uniqueness_failures += !rar_keys.insert({rar.pa_index, rar.ta_value}).second;
      grant_failures += !grants.insert(rar.grant_id).second;
    }
    for (const auto& pa_det : report.pas) {
      std::map<int, int> count;
      for (const auto& ta : pa_det.tas) ++count[ta.ta_value];
      for (const auto& [ta, k] : count) {
        const bool granted = rar_keys.contains({pa_det.pa_index, ta});
        if (k >= 2) ++duplicate_cases;
        suppression_failures += (k >= 2 && granted) || (k == 1 && !granted);
      }
    }
  }
  r.check(capture_failures == 0, detail::fmt("every (tag, TA) pair captured exactly: %d/%d scenarios failed "
                                             "(%d detected PAs carried >= 2 TAs)",
                                             capture_failures, cases, multi_ta_cases));
  r.check(suppression_failures == 0 && duplicate_cases > 0,
          detail::fmt("duplicate TAs never granted, unique TAs always granted: %d violations over %d duplicate groups",
                      suppression_failures, duplicate_cases));
  r.check(uniqueness_failures == 0 && grant_failures == 0,
          detail::fmt("RAR (pa, ta) and grant ids unique: %d / %d violations", uniqueness_failures, grant_failures));
  r.seconds = sw.seconds();
  return r;
}

// 6. Numeric substrate against independent oracles.
inline CriterionResult numeric_substrate() {
  CriterionResult r{6, "Numeric substrate (ZC, Marcum Q, Bessel I0)"};
  detail::Stopwatch sw;
  for (int n_zc : {kSmallNzc, kDefaultNzc}) {
    double worst_modulus = 0.0, worst_formula = 0.0, worst_cross = 0.0;
    for (int root : {1, 2, 25, n_zc - 1}) {
      const auto z = zc_generate({n_zc, root});
      for (int n = 0; n < n_zc; ++n) {
        worst_modulus = std::max(worst_modulus, std::abs(std::abs(z[static_cast<std::size_t>(n)]) - 1.0));
        worst_formula = std::max(worst_formula, std::abs(z[static_cast<std::size_t>(n)] - testing::zc_sample(root, n, n_zc)));
      }
    }
    for (auto [u, v] : {std::pair{1, 2}, std::pair{7, 29}, std::pair{3, n_zc - 3}}) {
      const auto zu = zc_generate({n_zc, u});
      const auto zv = zc_generate({n_zc, v});
      for (double mag : testing::correlation_magnitudes(zu.samples, zv.samples))
        worst_cross = std::max(worst_cross, std::abs(mag - 1.0));
      for (double mag : circ_correlate(zu.samples, zv).magnitudes) worst_cross = std::max(worst_cross, std::abs(mag - 1.0));
    }
    r.check(worst_modulus <= 1e-12, detail::fmt("N_ZC=%d unit modulus, worst deviation %.2e", n_zc, worst_modulus));
    r.check(worst_formula <= 1e-9, detail::fmt("N_ZC=%d matches closed form, worst deviation %.2e", n_zc, worst_formula));
    r.check(worst_cross <= 1e-9,
            detail::fmt("N_ZC=%d distinct-root cross-correlation = 1, worst deviation %.2e", n_zc, worst_cross));
  }
  double worst_q = 0.0, worst_q_chi2 = 0.0;
  for (double a : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0})
    for (double b : {0.0, 0.5, 1.0, 2.0, 3.0, 4.59, 6.0, 9.0, 15.0, 25.0}) {
      const double q = marcum_q1(a, b);
      worst_q = std::max(worst_q, std::abs(q - testing::marcum_q1_quadrature(a, b)));
      worst_q_chi2 = std::max(worst_q_chi2, std::abs(q - testing::marcum_q1_chi2(a, b)));
    }
  r.check(worst_q <= 1e-8, detail::fmt("Marcum Q1 vs quadrature, worst abs error %.2e", worst_q));
  r.check(worst_q_chi2 <= 1e-8, detail::fmt("Marcum Q1 vs noncentral chi-square, worst abs error %.2e", worst_q_chi2));
  double worst_i0 = 0.0;
  for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0})
    worst_i0 = std::max(worst_i0, std::abs(bessel_i0(x) / testing::bessel_i0_series(x) - 1.0));
  r.check(worst_i0 <= 1e-10, detail::fmt("Bessel I0 vs power series, worst rel error %.2e", worst_i0));
  r.seconds = sw.seconds();
  return r;
}

inline ExperimentConfig golden_config() {
  auto cfg = default_config(ExperimentKind::kRaSuccess);
  cfg.trials = 2000;
  cfg.seed = kSeed;
  return cfg;
}

// 7. Byte-identical reruns and frozen golden output.
inline CriterionResult determinism(const Options& opt) {
  CriterionResult r{7, "Determinism (byte-identical CSV, golden file)"};
  detail::Stopwatch sw;
  const auto cfg = golden_config();
  const auto first = format_csv(cfg, run_experiment(cfg));
  const auto second = format_csv(cfg, run_experiment(cfg));
  r.check(first == second, detail::fmt("two runs, same seed: %zu bytes, identical=%s", first.size(),
                                       first == second ? "yes" : "no"));
  const auto golden_path = opt.golden_dir / "ra_success_seed1_trials2000.csv";
  std::ifstream in(golden_path, std::ios::binary);
  std::stringstream golden;
  golden << in.rdbuf();
  r.check(in.good() || in.eof(), "golden file readable: " + golden_path.string());
  r.check(golden.str() == first, "output matches golden file byte for byte");
  r.seconds = sw.seconds();
  return r;
}

inline std::vector<CriterionResult> run_all(const Options& opt) {
  return {mac_closed_form(),      mac_monte_carlo(opt),  phy_monte_carlo(opt), phy_curve_shape(opt),
          protocol_properties(), numeric_substrate(),   determinism(opt)};
}

inline void print(std::FILE* out, const CriterionResult& r, bool verbose = true) {
  std::fprintf(out, "[%s] criterion %d: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  if (!verbose) return;
  for (const auto& line : r.lines) std::fprintf(out, "        %s\n", line.c_str());
}

}  // namespace pacr::verify
