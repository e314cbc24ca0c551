#pragma once

// eNodeB side of the tagged-preamble random access: PA detection on the PA
// root, multi-TA capture on the tag root of each detected PA, access
// classification and RAR generation with duplicate-TA suppression.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pacr/error.hpp"
#include "pacr/preamble.hpp"
#include "pacr/zc.hpp"

namespace pacr {

/// Thresholds in dB relative to sqrt(N_ZC), the clean peak of a unit-amplitude preamble.
struct DetectionThresholds {
  double gamma_pa_db = -16.0;
  double gamma_tag_db = -16.0;

  static double to_linear(double gamma_db, int n_zc) {
    return std::sqrt(static_cast<double>(n_zc)) * std::pow(10.0, gamma_db / 20.0);
  }
  [[nodiscard]] double pa_linear(int n_zc) const { return to_linear(gamma_pa_db, n_zc); }
  [[nodiscard]] double tag_linear(int n_zc) const { return to_linear(gamma_tag_db, n_zc); }
};

struct CapturedTa {
  int tag_index = 0;
  int ta_value = 0;

  friend bool operator==(const CapturedTa&, const CapturedTa&) = default;
};

enum class AccessClass { kNone, kSingle, kDouble, kTriple, kOver };

inline AccessClass classify_access(std::size_t captured_tas) {
  switch (captured_tas) {
    case 0: return AccessClass::kNone;
    case 1: return AccessClass::kSingle;
    case 2: return AccessClass::kDouble;
    case 3: return AccessClass::kTriple;
    default: return AccessClass::kOver;
  }
}

inline const char* to_string(AccessClass c) {
  switch (c) {
    case AccessClass::kNone: return "none";
    case AccessClass::kSingle: return "single";
    case AccessClass::kDouble: return "double";
    case AccessClass::kTriple: return "triple";
    case AccessClass::kOver: return "over";
  }
  return "?";
}

struct PaDetection {
  int pa_index = 0;
  std::vector<int> peak_positions;  ///< every above-threshold lag in the zone
};

struct DetectedPa {
  int pa_index = 0;
  std::vector<int> peak_positions;
  std::vector<CapturedTa> tas;
  AccessClass access = AccessClass::kNone;
};

struct DetectionReport {
  std::vector<DetectedPa> pas;

  [[nodiscard]] const DetectedPa* find(int pa_index) const {
    for (const auto& p : pas)
      if (p.pa_index == pa_index) return &p;
    return nullptr;
  }
};

struct RarMessage {
  int pa_index = 0;
  int ta_value = 0;
  int grant_id = 0;

  friend bool operator==(const RarMessage&, const RarMessage&) = default;
};

/// A PA index is detected when any lag of its zone [i*N_CS, (i+1)*N_CS - 1]
/// reaches the PA threshold.
inline std::vector<PaDetection> detect_pas(const CorrelationProfile& profile, const CellConfig& cfg,
                                           const DetectionThresholds& thr) {
  detail::require(profile.size() == static_cast<std::size_t>(cfg.n_zc),
                  "detect_pas: profile length does not match n_zc");
  const double gamma = thr.pa_linear(cfg.n_zc);
  std::vector<PaDetection> out;
  for (int i = 0; i < cfg.n_pa; ++i) {
    PaDetection det{i, {}};
    for (int tau = i * cfg.n_cs; tau < (i + 1) * cfg.n_cs; ++tau)
      if (profile[static_cast<std::size_t>(tau)] >= gamma) det.peak_positions.push_back(tau);
    if (!det.peak_positions.empty()) out.push_back(std::move(det));
  }
  return out;
}

/// Scans every tag zone of a tag-root correlation profile; the earliest
/// above-threshold lag in a zone is that tag's TA.
inline std::vector<CapturedTa> capture_tas_from_profile(const CorrelationProfile& tag_profile,
                                                        const CellConfig& cfg,
                                                        const DetectionThresholds& thr) {
  detail::require(tag_profile.size() == static_cast<std::size_t>(cfg.n_zc),
                  "capture_tas: profile length does not match n_zc");
  const double gamma = thr.tag_linear(cfg.n_zc);
  std::vector<CapturedTa> out;
  for (int l = 0; l < cfg.n_tag; ++l) {
    const int start = l * cfg.n_cs;
    for (int tau = start; tau < start + cfg.n_cs; ++tau) {
      if (tag_profile[static_cast<std::size_t>(tau % cfg.n_zc)] >= gamma) {
        out.push_back({l, tau - start});
        break;
      }
    }
  }
  return out;
}

inline std::vector<CapturedTa> capture_tas(std::span<const cd> received, int detected_pa,
                                           const CellConfig& cfg, const DetectionThresholds& thr) {
  const Correlator tag_ref(zc_generate({cfg.n_zc, tag_root_map(cfg, detected_pa)}));
  return capture_tas_from_profile(tag_ref.profile(received), cfg, thr);
}

/// One RAR per TA value captured in exactly one tag zone of a PA. A TA value
/// seen in two or more zones of the same PA is not granted at all.
inline std::vector<RarMessage> generate_rars(const DetectionReport& report) {
  std::vector<RarMessage> out;
  int next_grant = 0;
  for (const auto& pa : report.pas) {
    std::map<int, int> ta_count;
    for (const auto& ta : pa.tas) ++ta_count[ta.ta_value];
    for (const auto& [ta, count] : ta_count)
      if (count == 1) out.push_back({pa.pa_index, ta, next_grant++});
  }
  return out;
}

/// Full receiver for one cell. Holds the PA correlator and one tag
/// correlator per PA index; immutable and shareable across threads.
class Receiver {
 public:
  Receiver(CellConfig cfg, DetectionThresholds thr) : cfg_(std::move(cfg)), thr_(thr), pa_ref_(make_pa_ref(cfg_)) {
    tag_refs_.reserve(static_cast<std::size_t>(cfg_.n_pa));
    for (int i = 0; i < cfg_.n_pa; ++i) tag_refs_.emplace_back(zc_generate({cfg_.n_zc, tag_root_map(cfg_, i)}));
  }

  [[nodiscard]] const CellConfig& cell() const { return cfg_; }
  [[nodiscard]] const DetectionThresholds& thresholds() const { return thr_; }

  [[nodiscard]] CorrelationProfile pa_profile(std::span<const cd> received) const { return pa_ref_.profile(received); }
  [[nodiscard]] CorrelationProfile tag_profile(std::span<const cd> received, int pa_index) const {
    return tag_refs_.at(static_cast<std::size_t>(pa_index)).profile(received);
  }

  [[nodiscard]] std::vector<CapturedTa> capture(std::span<const cd> received, int pa_index) const {
    return capture_tas_from_profile(tag_profile(received, pa_index), cfg_, thr_);
  }

  [[nodiscard]] DetectionReport detect(std::span<const cd> received) const {
    DetectionReport report;
    for (auto& det : detect_pas(pa_profile(received), cfg_, thr_)) {
      DetectedPa pa{det.pa_index, std::move(det.peak_positions), capture(received, det.pa_index), AccessClass::kNone};
      pa.access = classify_access(pa.tas.size());
      report.pas.push_back(std::move(pa));
    }
    return report;
  }

 private:
  static Correlator make_pa_ref(const CellConfig& cfg) {
    cfg.validate();
    return Correlator(zc_generate(cfg.pa_params()));
  }

  CellConfig cfg_;
  DetectionThresholds thr_;
  Correlator pa_ref_;
  std::vector<Correlator> tag_refs_;
};

}  // namespace pacr
