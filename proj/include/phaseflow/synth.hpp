#pragma once

// Deterministic signal generators for corpora and fixtures: single tones,
// tone stacks, chirps, and a speech-like generator (voiced harmonic segments
// with pitch glides and formant-shaped envelopes, interleaved with noise
// bursts and silences). Same seed, same samples, on every platform.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "phaseflow/errors.hpp"

namespace phaseflow {

// splitmix64; portable and stateless enough to reproduce bit-exactly anywhere.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double next_unit() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_ = 0;
};

namespace detail {

inline std::size_t sample_count(double seconds, std::uint32_t rate) {
  if (seconds <= 0.0) throw invalid_input("duration must be positive");
  if (rate == 0) throw invalid_input("sample rate must be positive");
  auto n = static_cast<std::size_t>(seconds * rate + 0.5);
  return n > 0 ? n : 1;
}

inline void normalize_peak(std::vector<double>& x, double peak) {
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs > 0.0) {
    const double g = peak / max_abs;
    for (double& v : x) v *= g;
  }
}

}  // namespace detail

inline std::vector<double> synth_sine(double frequency, double seconds, std::uint32_t rate,
                                      double amplitude = 0.8) {
  const std::size_t n = detail::sample_count(seconds, rate);
  std::vector<double> x(n);
  const double w = 2.0 * std::numbers::pi * frequency / rate;
  for (std::size_t i = 0; i < n; ++i) x[i] = amplitude * std::sin(w * static_cast<double>(i));
  return x;
}

// Three-partial tone stack; handy as a deterministic non-trivial fixture.
inline std::vector<double> synth_tones(double base_frequency, double seconds,
                                       std::uint32_t rate, double amplitude = 0.8) {
  const std::size_t n = detail::sample_count(seconds, rate);
  std::vector<double> x(n);
  const double w = 2.0 * std::numbers::pi * base_frequency / rate;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<double>(i);
    x[i] = std::sin(w * t) + 0.5 * std::sin(2.31 * w * t + 0.4) + 0.25 * std::sin(3.7 * w * t + 1.1);
  }
  detail::normalize_peak(x, amplitude);
  return x;
}

inline std::vector<double> synth_chirp(double f_start, double f_end, double seconds,
                                       std::uint32_t rate, double amplitude = 0.8) {
  const std::size_t n = detail::sample_count(seconds, rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double f = f_start + (f_end - f_start) * t / (2.0 * seconds);
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * f * t);
  }
  return x;
}

// Speech-like sequence: voiced segments (harmonic stack under a two-bump
// formant envelope, light pitch glide), fricative-ish noise bursts, and short
// silences, all under raised-cosine on/offsets.
inline std::vector<double> synth_speechlike(double seconds, std::uint32_t rate,
                                            std::uint64_t seed, double amplitude = 0.8) {
  const std::size_t total = detail::sample_count(seconds, rate);
  std::vector<double> x(total, 0.0);
  DeterministicRng rng(seed);

  auto envelope = [](std::size_t i, std::size_t len, std::size_t ramp) {
    if (i < ramp) return 0.5 * (1.0 - std::cos(std::numbers::pi * i / ramp));
    if (i + ramp >= len) {
      const std::size_t j = len - 1 - i;
      return 0.5 * (1.0 - std::cos(std::numbers::pi * j / ramp));
    }
    return 1.0;
  };

  std::size_t pos = 0;
  while (pos < total) {
    const double kind = rng.next_unit();
    const auto seg_len = static_cast<std::size_t>(rng.uniform(0.1, 0.35) * rate);
    const std::size_t len = std::min(seg_len, total - pos);
    if (len < 32) break;
    const std::size_t ramp = std::min<std::size_t>(len / 4, rate / 80);

    if (kind < 0.7) {  // voiced
      const double f0_a = rng.uniform(85.0, 220.0);
      const double f0_b = f0_a * rng.uniform(0.85, 1.18);
      const double formant1 = rng.uniform(300.0, 850.0);
      const double formant2 = rng.uniform(950.0, 2300.0);
      const double gain = rng.uniform(0.5, 1.0);
      const int harmonics = 18;
      std::vector<double> phases(harmonics);
      for (auto& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);

      double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < len; ++i) {
        const double frac = static_cast<double>(i) / len;
        const double f0 = f0_a + (f0_b - f0_a) * frac;
        phase0 += 2.0 * std::numbers::pi * f0 / rate;
        double v = 0.0;
        for (int h = 1; h <= harmonics; ++h) {
          const double fh = f0 * h;
          if (fh > rate / 2.0 - 200.0) break;
          const double d1 = (fh - formant1) / 220.0;
          const double d2 = (fh - formant2) / 380.0;
          const double shape =
              0.25 + std::exp(-0.5 * d1 * d1) + 0.65 * std::exp(-0.5 * d2 * d2);
          v += shape / h * std::sin(h * phase0 + phases[h - 1]);
        }
        x[pos + i] += gain * envelope(i, len, ramp) * v;
      }
    } else if (kind < 0.85) {  // unvoiced burst
      const double gain = rng.uniform(0.04, 0.12);
      double prev = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        const double white = rng.uniform(-1.0, 1.0);
        const double hp = white - 0.92 * prev;  // crude high tilt
        prev = white;
        x[pos + i] += gain * envelope(i, len, ramp) * hp;
      }
    }
    // else: silence, leave zeros

    pos += len;
  }

  detail::normalize_peak(x, amplitude);
  return x;
}

// Quick sanity check used by generators and the CLI: bounded and not silent.
inline bool corpus_signal_valid(const std::vector<double>& x) {
  double energy = 0.0;
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > 1.0) return false;
    energy += v * v;
  }
  return !x.empty() && std::sqrt(energy / x.size()) > 1e-3;
}

}  // namespace phaseflow
