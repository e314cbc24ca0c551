#pragma once

// Zadoff-Chu sequences and normalized circular correlation.
//
// Conventions used throughout the library:
//   z_u[n]        = exp(-j*pi*u*n*(n+1)/N)
//   shift(x, s)[n] = x[(n + s) mod N]
//   c[tau]        = (1/sqrt(N)) * sum_n y[n] * conj(ref[(n + tau) mod N])
//
// With these, a clean amplitude-b copy of shift(z_u, s) correlated against
// z_u peaks at tau = s with magnitude sqrt(N)*b, and two distinct roots
// cross-correlate to magnitude exactly b at every lag.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pacr/error.hpp"

namespace pacr {

using cd = std::complex<double>;
using ComplexVec = std::vector<cd>;

inline constexpr int kDefaultNzc = 839;
inline constexpr int kSmallNzc = 139;

constexpr bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

struct ZcParams {
  int n_zc = kDefaultNzc;
  int root = 1;

  void validate() const {
    detail::require(is_prime(n_zc),
                    "ZcParams: n_zc must be prime, got " + std::to_string(n_zc));
    detail::require(root >= 1 && root <= n_zc - 1,
                    "ZcParams: root must lie in [1, n_zc-1], got " + std::to_string(root));
  }
};

struct ZcSequence {
  ZcParams params;
  ComplexVec samples;

  [[nodiscard]] std::size_t size() const { return samples.size(); }
  const cd& operator[](std::size_t n) const { return samples[n]; }
};

struct CorrelationProfile {
  std::vector<double> magnitudes;
  int ref_root = 0;

  [[nodiscard]] std::size_t size() const { return magnitudes.size(); }
  double operator[](std::size_t tau) const { return magnitudes[tau]; }
};

inline ZcSequence zc_generate(const ZcParams& params) {
  params.validate();
  const std::int64_t n_zc = params.n_zc;
  const std::int64_t two_n = 2 * n_zc;
  ZcSequence seq{params, ComplexVec(static_cast<std::size_t>(n_zc))};
  for (std::int64_t n = 0; n < n_zc; ++n) {
    // Reduce the phase numerator exactly in integers before going to floating point.
    const std::int64_t m = (params.root * ((n * (n + 1)) % two_n)) % two_n;
    const double phase = -std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_zc);
    seq.samples[static_cast<std::size_t>(n)] = std::polar(1.0, phase);
  }
  return seq;
}

/// out[n] = in[(n + shift) mod N]. `shift` must already be reduced to [0, N).
inline ComplexVec rotate(std::span<const cd> in, int shift) {
  const auto n = static_cast<int>(in.size());
  detail::require(shift >= 0 && shift < n,
                  "cyclic shift " + std::to_string(shift) + " outside [0, " + std::to_string(n) + ")");
  ComplexVec out(in.size());
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = in[static_cast<std::size_t>((k + shift) % n)];
  return out;
}

inline ZcSequence cyclic_shift(const ZcSequence& seq, int shift) {
  return ZcSequence{seq.params, rotate(seq.samples, shift)};
}

/// Reference O(N^2) evaluation of the complex correlation.
inline ComplexVec circ_correlate_direct(std::span<const cd> received, std::span<const cd> reference) {
  detail::require(received.size() == reference.size(),
                  "circ_correlate: received length " + std::to_string(received.size()) +
                      " does not match reference length " + std::to_string(reference.size()));
  const std::size_t n = reference.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexVec out(n);
  for (std::size_t tau = 0; tau < n; ++tau) {
    cd acc{};
    for (std::size_t k = 0; k < n; ++k) acc += received[k] * std::conj(reference[(k + tau) % n]);
    out[tau] = acc * scale;
  }
  return out;
}

namespace detail {

// FFTW plans are shared per length. Planning is serialized; fftw_execute_dft
// on an existing plan is thread safe.
class FftPlanCache {
 public:
  struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
  };

  static const Plans& get(int n) {
    static FftPlanCache cache;
    std::lock_guard lock(cache.mutex_);
    auto it = cache.plans_.find(n);
    if (it != cache.plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    Plans p;
    p.forward = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    return cache.plans_.emplace(n, p).first->second;
  }

  FftPlanCache(const FftPlanCache&) = delete;
  FftPlanCache& operator=(const FftPlanCache&) = delete;

 private:
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<int, Plans> plans_;
};

inline fftw_complex* as_fftw(cd* p) { return reinterpret_cast<fftw_complex*>(p); }
// fftw_execute_dft takes non-const input but never writes to it for out-of-place plans.
inline fftw_complex* as_fftw(const cd* p) { return reinterpret_cast<fftw_complex*>(const_cast<cd*>(p)); }

}  // namespace detail

/// Frequency-domain correlator bound to one reference sequence. Immutable
/// after construction and safe to share between threads.
class Correlator {
 public:
  explicit Correlator(const ZcSequence& reference)
      : root_(reference.params.root),
        n_(static_cast<int>(reference.size())),
        plans_(&detail::FftPlanCache::get(n_)),
        ref_spectrum_(reference.size()) {
    fftw_execute_dft(plans_->forward, detail::as_fftw(reference.samples.data()),
                     detail::as_fftw(ref_spectrum_.data()));
  }

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] int root() const { return root_; }

  [[nodiscard]] ComplexVec correlate(std::span<const cd> received) const {
    detail::require(received.size() == static_cast<std::size_t>(n_),
                    "circ_correlate: received length " + std::to_string(received.size()) +
                        " does not match reference length " + std::to_string(n_));
    ComplexVec spec(received.size());
    fftw_execute_dft(plans_->forward, detail::as_fftw(received.data()), detail::as_fftw(spec.data()));
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = ref_spectrum_[k] * std::conj(spec[k]);
    ComplexVec out(received.size());
    fftw_execute_dft(plans_->backward, detail::as_fftw(spec.data()), detail::as_fftw(out.data()));
    // IDFT(R * conj(Y)) is conj of the wanted sum, times N.
    const double scale = 1.0 / (static_cast<double>(n_) * std::sqrt(static_cast<double>(n_)));
    for (auto& v : out) v = std::conj(v) * scale;
    return out;
  }

  [[nodiscard]] CorrelationProfile profile(std::span<const cd> received) const {
    const auto c = correlate(received);
    CorrelationProfile p{std::vector<double>(c.size()), root_};
    for (std::size_t k = 0; k < c.size(); ++k) p.magnitudes[k] = std::abs(c[k]);
    return p;
  }

 private:
  int root_;
  int n_;
  const detail::FftPlanCache::Plans* plans_;
  ComplexVec ref_spectrum_;
};

inline CorrelationProfile circ_correlate(std::span<const cd> received, const ZcSequence& reference) {
  return Correlator(reference).profile(received);
}

}  // namespace pacr
