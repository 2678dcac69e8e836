#pragma once

// Spectrogram container file. The byte layout is normative:
//
//   bytes 0..7    magic "PHFLOW01"
//   bytes 8..35   seven little-endian u32 fields:
//                 frame_len N, hop H, bins K, frames L, sample_rate,
//                 window kind (0 hann, 1 rectangular),
//                 payload kind (0 magnitude, 1 complex)
//   bytes 36..    row-major little-endian f64 payload: K*L values for a
//                 magnitude file, 2*K*L interleaved re/im for a complex one.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phaseflow/errors.hpp"
#include "phaseflow/stft.hpp"
#include "phaseflow/wav_io.hpp"

namespace phaseflow {

enum class SpecPayload : std::uint32_t { magnitude = 0, complex_full = 1 };

struct SpecFileHeader {
  std::uint32_t frame_len = 0;
  std::uint32_t hop = 0;
  std::uint32_t bins = 0;
  std::uint32_t frames = 0;
  std::uint32_t sample_rate = 0;
  WindowKind window = WindowKind::hann;
  SpecPayload payload = SpecPayload::magnitude;

  StftConfig to_config() const {
    return make_stft_config(frame_len, hop, window, sample_rate);
  }
};

struct SpecFileData {
  SpecFileHeader header;
  std::optional<MagnitudeSpectrogram> magnitude;
  std::optional<Spectrogram> complex_data;
};

namespace detail {

inline constexpr char kSpecFileMagic[8] = {'P', 'H', 'F', 'L', 'O', 'W', '0', '1'};

inline double read_f64le(const std::vector<std::uint8_t>& bytes, std::size_t pos) {
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = (u << 8) | bytes[pos + static_cast<std::size_t>(i)];
  return std::bit_cast<double>(u);
}

}  // namespace detail

inline void write_specfile(const std::filesystem::path& path, const SpecFileHeader& header,
                           const MagnitudeSpectrogram* mag, const Spectrogram* complex_data) {
  if ((header.payload == SpecPayload::magnitude) != (mag != nullptr) ||
      (header.payload == SpecPayload::complex_full) != (complex_data != nullptr)) {
    throw invalid_input("payload kind does not match the provided data");
  }
  const std::size_t bins = header.bins;
  const std::size_t frames = header.frames;
  if (mag && (mag->bins() != bins || mag->frames() != frames)) {
    throw invalid_input("header dimensions do not match the magnitude data");
  }
  if (complex_data && (complex_data->bins() != bins || complex_data->frames() != frames)) {
    throw invalid_input("header dimensions do not match the complex data");
  }
  if (bins != fft::onesided_bins(header.frame_len)) {
    throw invalid_input("bin count must equal frame_len/2 + 1");
  }

  detail::ByteWriter w;
  w.bytes.insert(w.bytes.end(), detail::kSpecFileMagic, detail::kSpecFileMagic + 8);
  w.u32(header.frame_len);
  w.u32(header.hop);
  w.u32(header.bins);
  w.u32(header.frames);
  w.u32(header.sample_rate);
  w.u32(static_cast<std::uint32_t>(header.window));
  w.u32(static_cast<std::uint32_t>(header.payload));

  // row-major: all frames of bin 0, then bin 1, ...
  if (mag) {
    for (std::size_t k = 0; k < bins; ++k) {
      for (std::size_t l = 0; l < frames; ++l) w.f64((*mag)(k, l));
    }
  } else {
    for (std::size_t k = 0; k < bins; ++k) {
      for (std::size_t l = 0; l < frames; ++l) {
        w.f64((*complex_data)(k, l).real());
        w.f64((*complex_data)(k, l).imag());
      }
    }
  }
  detail::write_file_bytes(path, w.bytes);
}

inline SpecFileData read_specfile(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader r{bytes};

  r.need(8, "magic");
  if (std::memcmp(bytes.data(), detail::kSpecFileMagic, 8) != 0) {
    throw io_error("bad magic: not a spectrogram file", 0);
  }
  r.pos = 8;

  SpecFileData out;
  auto& h = out.header;
  h.frame_len = r.u32("frame_len");
  h.hop = r.u32("hop");
  h.bins = r.u32("bins");
  h.frames = r.u32("frames");
  h.sample_rate = r.u32("sample_rate");
  const std::uint32_t window_code = r.u32("window kind");
  const std::uint32_t payload_code = r.u32("payload kind");
  if (window_code > 1) throw io_error("unknown window kind code", r.pos - 8);
  if (payload_code > 1) throw io_error("unknown payload kind code", r.pos - 4);
  h.window = static_cast<WindowKind>(window_code);
  h.payload = static_cast<SpecPayload>(payload_code);

  if (h.bins != fft::onesided_bins(h.frame_len)) {
    throw io_error("bin count does not match frame length", 16);
  }
  if (h.frames == 0 || h.bins == 0) throw io_error("empty spectrogram", 20);

  const std::size_t values =
      static_cast<std::size_t>(h.bins) * h.frames * (h.payload == SpecPayload::magnitude ? 1 : 2);
  if (bytes.size() - r.pos < values * 8) {
    throw io_error("payload truncated: header claims more data than the file holds",
                   bytes.size());
  }
  if (bytes.size() - r.pos > values * 8) {
    throw io_error("trailing bytes after payload", r.pos + values * 8);
  }

  if (h.payload == SpecPayload::magnitude) {
    MagnitudeSpectrogram mag(h.bins, h.frames);
    std::size_t pos = r.pos;
    for (std::size_t k = 0; k < h.bins; ++k) {
      for (std::size_t l = 0; l < h.frames; ++l) {
        const double v = detail::read_f64le(bytes, pos);
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw io_error("magnitude entries must be finite and nonnegative", pos);
        }
        mag(k, l) = v;
        pos += 8;
      }
    }
    out.magnitude = std::move(mag);
  } else {
    Spectrogram spec(h.bins, h.frames);
    std::size_t pos = r.pos;
    for (std::size_t k = 0; k < h.bins; ++k) {
      for (std::size_t l = 0; l < h.frames; ++l) {
        const double re = detail::read_f64le(bytes, pos);
        const double im = detail::read_f64le(bytes, pos + 8);
        if (!std::isfinite(re) || !std::isfinite(im)) {
          throw io_error("complex entries must be finite", pos);
        }
        spec(k, l) = cplx(re, im);
        pos += 16;
      }
    }
    out.complex_data = std::move(spec);
  }
  return out;
}

}  // namespace phaseflow
