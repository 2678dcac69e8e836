#pragma once

// Self-contained FFT used by the STFT layer. Radix-2 Cooley-Tukey for
// power-of-two sizes, Bluestein's chirp-z for everything else, plus
// one-sided real transforms matching the K = N/2 + 1 spectrogram layout.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "phaseflow/errors.hpp"

namespace phaseflow::fft {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Forward twiddles exp(-2*pi*i*k/n), k < n/2, cached per size.
inline const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<std::vector<cplx>>> cache;
  auto& slot = cache[n];
  if (!slot) {
    auto table = std::make_unique<std::vector<cplx>>(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      (*table)[k] = cplx(std::cos(angle), std::sin(angle));
    }
    slot = std::move(table);
  }
  return *slot;
}

// In-place radix-2; no scaling. n must be a power of two.
inline void transform_pow2(std::span<cplx> a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const auto& tw = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx w = tw[k * stride];
        if (inverse) w = std::conj(w);
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

struct BluesteinTables {
  std::vector<cplx> chirp;       // exp(-i*pi*k^2/n), k < n
  std::vector<cplx> kernel_fft;  // FFT of the chirp filter, length m
  std::size_t m = 0;
};

inline const BluesteinTables& bluestein_tables(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<BluesteinTables>> cache;
  auto& slot = cache[n];
  if (!slot) {
    auto t = std::make_unique<BluesteinTables>();
    t->m = next_pow2(2 * n - 1);
    t->chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      // reduce k^2 mod 2n in integers to keep the angle accurate for large k
      std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % (2 * n);
      double angle = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
      t->chirp[k] = cplx(std::cos(angle), std::sin(angle));
    }
    std::vector<cplx> kernel(t->m, cplx(0.0, 0.0));
    kernel[0] = std::conj(t->chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel[k] = std::conj(t->chirp[k]);
      kernel[t->m - k] = std::conj(t->chirp[k]);
    }
    transform_pow2(kernel, false);
    t->kernel_fft = std::move(kernel);
    slot = std::move(t);
  }
  return *slot;
}

// Arbitrary-size forward transform via chirp-z; no scaling.
inline void transform_bluestein(std::span<cplx> a) {
  const std::size_t n = a.size();
  const auto& t = bluestein_tables(n);

  std::vector<cplx> buf(t.m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) buf[k] = a[k] * t.chirp[k];
  transform_pow2(buf, false);
  for (std::size_t k = 0; k < t.m; ++k) buf[k] *= t.kernel_fft[k];
  transform_pow2(buf, true);
  const double scale = 1.0 / static_cast<double>(t.m);
  for (std::size_t k = 0; k < n; ++k) a[k] = buf[k] * scale * t.chirp[k];
}

}  // namespace detail

// In-place DFT. Forward: X_k = sum_n x_n e^{-2pi i k n / N}. The inverse
// applies the conjugate kernel and scales by 1/N, so idft(dft(x)) == x.
inline void transform(std::span<cplx> a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::transform_pow2(a, inverse);
  } else if (inverse) {
    for (auto& z : a) z = std::conj(z);
    detail::transform_bluestein(a);
    for (auto& z : a) z = std::conj(z);
  } else {
    detail::transform_bluestein(a);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= scale;
  }
}

inline std::vector<cplx> dft(std::vector<cplx> a) {
  transform(a, false);
  return a;
}

inline std::vector<cplx> idft(std::vector<cplx> a) {
  transform(a, true);
  return a;
}

inline constexpr std::size_t onesided_bins(std::size_t n) { return n / 2 + 1; }

// One-sided DFT of a real frame: bins 0 .. N/2 inclusive.
inline std::vector<cplx> real_dft_onesided(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cplx> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = cplx(x[i], 0.0);
  transform(a, false);
  a.resize(onesided_bins(n));
  return a;
}

// Inverse of real_dft_onesided; reconstructs the Hermitian half before the
// inverse transform and returns the real part.
inline std::vector<double> real_idft_onesided(std::span<const cplx> bins, std::size_t n) {
  if (bins.size() != onesided_bins(n)) {
    throw invalid_input("one-sided bin count does not match frame length");
  }
  std::vector<cplx> a(n);
  for (std::size_t k = 0; k < bins.size(); ++k) a[k] = bins[k];
  for (std::size_t k = bins.size(); k < n; ++k) a[k] = std::conj(bins[n - k]);
  transform(a, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
  return out;
}

}  // namespace phaseflow::fft
