#pragma once

// STFT analysis/synthesis. The inverse is the least-squares one: inverse-DFT
// every frame, overlap-add weighted by the window, divide by the running
// squared-window sum.
//
// Coordinate convention. stft() pads the input with (N - H) zeros on both
// sides before framing, so every input sample is covered by a full complement
// of frames; frame l covers padded samples [l*H, l*H + N) and
// L = floor((padded_len - N) / H) + 1. Two inverses are provided:
//
//   istft_span()  synthesizes the whole frame span, (L-1)*H + N samples in
//                 padded coordinates. This is the exact adjoint-style inverse
//                 used inside the consistency projection.
//   istft()       drops the leading pad again, returning L*H samples aligned
//                 with the signal originally given to stft(): for a true STFT
//                 input, istft(stft(x))[i] == x[i].
//
// Where the squared-window sum falls below 1e-10 of its maximum the output
// sample is set to 0 instead of dividing.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "phaseflow/errors.hpp"
#include "phaseflow/fft.hpp"

namespace phaseflow {

using cplx = std::complex<double>;

enum class WindowKind : std::uint32_t { hann = 0, rectangular = 1 };

// Periodic Hann, w[n] = 0.5 * (1 - cos(2*pi*n/N)). w[0] == 0 and the peak
// is 1 for even N.
inline std::vector<double> make_hann_window(std::size_t frame_len) {
  if (frame_len < 2) throw invalid_config("window length must be at least 2");
  std::vector<double> w(frame_len);
  for (std::size_t n = 0; n < frame_len; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                 static_cast<double>(frame_len)));
  }
  return w;
}

inline std::vector<double> make_rect_window(std::size_t frame_len) {
  if (frame_len < 2) throw invalid_config("window length must be at least 2");
  return std::vector<double>(frame_len, 1.0);
}

inline std::vector<double> make_window(WindowKind kind, std::size_t frame_len) {
  switch (kind) {
    case WindowKind::hann: return make_hann_window(frame_len);
    case WindowKind::rectangular: return make_rect_window(frame_len);
  }
  throw invalid_config("unknown window kind");
}

struct StftConfig {
  std::size_t frame_len = 512;  // N
  std::size_t hop = 128;        // H
  std::vector<double> window;   // N coefficients
  std::uint32_t sample_rate = 16000;

  std::size_t bins() const { return fft::onesided_bins(frame_len); }  // K = N/2 + 1
  std::size_t pad() const { return frame_len - hop; }
};

inline void validate(const StftConfig& cfg) {
  if (cfg.frame_len < 2) throw invalid_config("frame length must be at least 2");
  if (cfg.hop < 1) throw invalid_config("hop must be at least 1");
  if (cfg.hop > cfg.frame_len) throw invalid_config("hop must not exceed the frame length");
  if (cfg.sample_rate == 0) throw invalid_config("sample rate must be positive");
  if (cfg.window.size() != cfg.frame_len) {
    throw invalid_config("window length does not match the frame length");
  }
  bool any_nonzero = false;
  for (double w : cfg.window) {
    if (!std::isfinite(w)) throw invalid_config("window coefficients must be finite");
    if (w != 0.0) any_nonzero = true;
  }
  if (!any_nonzero) throw invalid_config("window must not be all zero");
}

inline StftConfig make_stft_config(std::size_t frame_len, std::size_t hop,
                                   WindowKind kind = WindowKind::hann,
                                   std::uint32_t sample_rate = 16000) {
  StftConfig cfg{frame_len, hop, make_window(kind, frame_len), sample_rate};
  validate(cfg);
  return cfg;
}

// Complex K x L matrix of STFT coefficients, column-major so each frame is
// contiguous.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t bins, std::size_t frames)
      : bins_(bins), frames_(frames), data_(bins * frames, cplx(0.0, 0.0)) {}

  std::size_t bins() const { return bins_; }
  std::size_t frames() const { return frames_; }
  std::size_t size() const { return data_.size(); }

  cplx& operator()(std::size_t k, std::size_t l) { return data_[l * bins_ + k]; }
  const cplx& operator()(std::size_t k, std::size_t l) const { return data_[l * bins_ + k]; }

  std::span<cplx> column(std::size_t l) { return {data_.data() + l * bins_, bins_}; }
  std::span<const cplx> column(std::size_t l) const { return {data_.data() + l * bins_, bins_}; }

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  bool same_shape(const Spectrogram& other) const {
    return bins_ == other.bins_ && frames_ == other.frames_;
  }

 private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<cplx> data_;
};

// Nonnegative real K x L matrix, same layout as Spectrogram.
class MagnitudeSpectrogram {
 public:
  MagnitudeSpectrogram() = default;
  MagnitudeSpectrogram(std::size_t bins, std::size_t frames)
      : bins_(bins), frames_(frames), data_(bins * frames, 0.0) {}

  std::size_t bins() const { return bins_; }
  std::size_t frames() const { return frames_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t k, std::size_t l) { return data_[l * bins_ + k]; }
  const double& operator()(std::size_t k, std::size_t l) const { return data_[l * bins_ + k]; }

  std::span<double> column(std::size_t l) { return {data_.data() + l * bins_, bins_}; }
  std::span<const double> column(std::size_t l) const {
    return {data_.data() + l * bins_, bins_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void validate_entries() const {
    for (double v : data_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw invalid_input("magnitude entries must be finite and nonnegative");
      }
    }
  }

 private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<double> data_;
};

inline MagnitudeSpectrogram magnitude(const Spectrogram& spec) {
  MagnitudeSpectrogram mag(spec.bins(), spec.frames());
  for (std::size_t i = 0; i < spec.size(); ++i) mag.data()[i] = std::abs(spec.data()[i]);
  return mag;
}

// Zero-phase spectrogram A * e^{j0}.
inline Spectrogram from_magnitude(const MagnitudeSpectrogram& mag) {
  Spectrogram spec(mag.bins(), mag.frames());
  for (std::size_t i = 0; i < mag.size(); ++i) spec.data()[i] = cplx(mag.data()[i], 0.0);
  return spec;
}

// ---- framing arithmetic ----

// Number of frames produced by stft() for a signal of the given length.
inline std::size_t frame_count(std::size_t signal_len, const StftConfig& cfg) {
  if (signal_len == 0) throw invalid_input("signal must be nonempty");
  const std::size_t padded = signal_len + 2 * cfg.pad();
  if (padded < cfg.frame_len) {
    throw invalid_input("signal shorter than one frame after padding");
  }
  return (padded - cfg.frame_len) / cfg.hop + 1;
}

// Padded-coordinate length covered by L frames: (L-1)*H + N.
inline std::size_t span_length(std::size_t frames, const StftConfig& cfg) {
  if (frames == 0) throw invalid_input("spectrogram must contain at least one frame");
  return (frames - 1) * cfg.hop + cfg.frame_len;
}

// Length of istft() output: the frame span minus the leading pad, L*H.
inline std::size_t aligned_length(std::size_t frames, const StftConfig& cfg) {
  return span_length(frames, cfg) - cfg.pad();
}

namespace detail {

// Windowed one-sided DFT of padded samples [start, start + N), where the
// signal occupies padded coordinates [offset, offset + len) and is zero
// elsewhere.
inline void analyze_frame(std::span<const double> signal, std::int64_t offset,
                          std::int64_t start, const StftConfig& cfg, std::span<cplx> out) {
  const std::size_t n = cfg.frame_len;
  std::vector<double> frame(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t pos = start + static_cast<std::int64_t>(i) - offset;
    if (pos >= 0 && pos < static_cast<std::int64_t>(signal.size())) {
      frame[i] = signal[static_cast<std::size_t>(pos)] * cfg.window[i];
    }
  }
  auto bins = fft::real_dft_onesided(frame);
  std::copy(bins.begin(), bins.end(), out.begin());
}

}  // namespace detail

// Frames a signal that already lives in padded coordinates (no extra padding).
// Needs signal.size() >= N; L = floor((len - N)/H) + 1.
inline Spectrogram stft_span(std::span<const double> signal, const StftConfig& cfg) {
  validate(cfg);
  if (signal.size() < cfg.frame_len) {
    throw invalid_input("signal shorter than one frame");
  }
  const std::size_t frames = (signal.size() - cfg.frame_len) / cfg.hop + 1;
  Spectrogram spec(cfg.bins(), frames);
  for (std::size_t l = 0; l < frames; ++l) {
    detail::analyze_frame(signal, 0, static_cast<std::int64_t>(l * cfg.hop), cfg,
                          spec.column(l));
  }
  return spec;
}

inline Spectrogram stft(std::span<const double> signal, const StftConfig& cfg) {
  validate(cfg);
  const std::size_t frames = frame_count(signal.size(), cfg);
  const auto offset = static_cast<std::int64_t>(cfg.pad());
  Spectrogram spec(cfg.bins(), frames);
  for (std::size_t l = 0; l < frames; ++l) {
    detail::analyze_frame(signal, offset, static_cast<std::int64_t>(l * cfg.hop), cfg,
                          spec.column(l));
  }
  return spec;
}

namespace detail {

inline void check_dims(const Spectrogram& spec, const StftConfig& cfg) {
  if (spec.bins() != cfg.bins()) {
    throw invalid_input("spectrogram bin count does not match the config");
  }
  if (spec.frames() == 0) {
    throw invalid_input("spectrogram must contain at least one frame");
  }
}

inline constexpr double kDenomFloorRatio = 1e-10;

}  // namespace detail

// Least-squares inverse over the full frame span (padded coordinates).
inline std::vector<double> istft_span(const Spectrogram& spec, const StftConfig& cfg) {
  validate(cfg);
  detail::check_dims(spec, cfg);
  const std::size_t n = cfg.frame_len;
  const std::size_t span = span_length(spec.frames(), cfg);

  std::vector<double> num(span, 0.0);
  std::vector<double> den(span, 0.0);
  for (std::size_t l = 0; l < spec.frames(); ++l) {
    const auto frame = fft::real_idft_onesided(spec.column(l), n);
    const std::size_t start = l * cfg.hop;
    for (std::size_t i = 0; i < n; ++i) {
      num[start + i] += cfg.window[i] * frame[i];
      den[start + i] += cfg.window[i] * cfg.window[i];
    }
  }

  const double max_den = *std::max_element(den.begin(), den.end());
  const double floor = detail::kDenomFloorRatio * max_den;
  std::vector<double> out(span, 0.0);
  for (std::size_t i = 0; i < span; ++i) {
    out[i] = den[i] < floor ? 0.0 : num[i] / den[i];
  }
  return out;
}

// Inverse aligned with stft() input coordinates: drops the leading pad.
inline std::vector<double> istft(const Spectrogram& spec, const StftConfig& cfg) {
  auto span = istft_span(spec, cfg);
  span.erase(span.begin(), span.begin() + static_cast<std::ptrdiff_t>(cfg.pad()));
  return span;
}

}  // namespace phaseflow
