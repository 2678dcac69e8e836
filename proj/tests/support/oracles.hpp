#pragma once

// Test-only reference implementations. Everything here is deliberately naive
// (direct summation, brute-force overlap-add) and independent of the library
// code paths it is used to check.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "phaseflow/stft.hpp"
#include "phaseflow/synth.hpp"

namespace oracles {

using cplx = std::complex<double>;

// O(n^2) DFT by direct summation.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x, bool inverse = false) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n, cplx(0.0, 0.0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * 3.14159265358979323846 *
                           static_cast<double>(k) * static_cast<double>(j) /
                           static_cast<double>(n);
      out[k] += x[j] * cplx(std::cos(angle), std::sin(angle));
    }
  }
  if (inverse) {
    for (auto& v : out) v /= static_cast<double>(n);
  }
  return out;
}

// One-sided naive DFT of a real frame.
inline std::vector<cplx> naive_real_dft_onesided(const std::vector<double>& frame) {
  std::vector<cplx> x(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) x[i] = cplx(frame[i], 0.0);
  auto full = naive_dft(x);
  full.resize(frame.size() / 2 + 1);
  return full;
}

// Naive STFT with the library's padding convention: (N - H) zeros on both
// sides, frame l covering padded samples [l*H, l*H + N).
inline phaseflow::Spectrogram naive_stft(const std::vector<double>& signal,
                                         const phaseflow::StftConfig& cfg) {
  const std::size_t pad = cfg.frame_len - cfg.hop;
  std::vector<double> padded(signal.size() + 2 * pad, 0.0);
  for (std::size_t i = 0; i < signal.size(); ++i) padded[pad + i] = signal[i];

  const std::size_t frames = (padded.size() - cfg.frame_len) / cfg.hop + 1;
  phaseflow::Spectrogram spec(cfg.frame_len / 2 + 1, frames);
  for (std::size_t l = 0; l < frames; ++l) {
    std::vector<double> frame(cfg.frame_len);
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      frame[i] = padded[l * cfg.hop + i] * cfg.window[i];
    }
    const auto bins = naive_real_dft_onesided(frame);
    for (std::size_t k = 0; k < bins.size(); ++k) spec(k, l) = bins[k];
  }
  return spec;
}

// Brute-force least-squares inverse over the whole frame span, computed from
// two-sided naive inverse DFTs. Returns padded-coordinate samples.
inline std::vector<double> naive_istft_span(const phaseflow::Spectrogram& spec,
                                            const phaseflow::StftConfig& cfg) {
  const std::size_t n = cfg.frame_len;
  const std::size_t span = (spec.frames() - 1) * cfg.hop + n;
  std::vector<double> num(span, 0.0), den(span, 0.0);
  for (std::size_t l = 0; l < spec.frames(); ++l) {
    // Hermitian completion then naive inverse DFT
    std::vector<cplx> full(n);
    for (std::size_t k = 0; k < spec.bins(); ++k) full[k] = spec(k, l);
    for (std::size_t k = spec.bins(); k < n; ++k) full[k] = std::conj(spec(n - k, l));
    const auto frame = naive_dft(full, true);
    for (std::size_t i = 0; i < n; ++i) {
      num[l * cfg.hop + i] += cfg.window[i] * frame[i].real();
      den[l * cfg.hop + i] += cfg.window[i] * cfg.window[i];
    }
  }
  double max_den = 0.0;
  for (double d : den) max_den = std::max(max_den, d);
  std::vector<double> out(span, 0.0);
  for (std::size_t i = 0; i < span; ++i) {
    out[i] = den[i] < 1e-10 * max_den ? 0.0 : num[i] / den[i];
  }
  return out;
}

// Random test data helpers (deterministic).
inline std::vector<double> random_signal(std::size_t len, std::uint64_t seed) {
  phaseflow::DeterministicRng rng(seed);
  std::vector<double> x(len);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

inline phaseflow::Spectrogram random_spectrogram(std::size_t bins, std::size_t frames,
                                                 std::uint64_t seed) {
  phaseflow::DeterministicRng rng(seed);
  phaseflow::Spectrogram spec(bins, frames);
  for (auto& v : spec.data()) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return spec;
}

inline phaseflow::MagnitudeSpectrogram random_magnitude(std::size_t bins, std::size_t frames,
                                                        std::uint64_t seed) {
  phaseflow::DeterministicRng rng(seed);
  phaseflow::MagnitudeSpectrogram mag(bins, frames);
  for (auto& v : mag.data()) v = rng.uniform(0.0, 2.0);
  return mag;
}

// Frobenius / max-abs distances.
inline double frob_norm(const phaseflow::Spectrogram& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return std::sqrt(s);
}

inline double frob_dist(const phaseflow::Spectrogram& a, const phaseflow::Spectrogram& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b,
                           std::size_t count) {
  double m = 0.0;
  for (std::size_t i = 0; i < count; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracles
