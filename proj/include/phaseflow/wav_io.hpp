#pragma once

// Minimal WAV reader/writer. Mono RIFF/WAVE with 16-bit PCM or 32-bit IEEE
// float payloads; anything else is a typed error, never a crash. 16-bit
// samples are scaled by 1/32768 on read.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phaseflow/errors.hpp"

namespace phaseflow {

struct AudioBuffer {
  std::vector<double> samples;
  std::uint32_t sample_rate = 16000;
};

enum class WavFormat { float32, pcm16 };

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path.string());
}

struct ByteReader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > bytes.size()) {
      throw io_error(std::string("truncated file while reading ") + what, pos);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(bytes[pos]) |
                      static_cast<std::uint16_t>(bytes[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[pos + static_cast<std::size_t>(i)];
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[pos + static_cast<std::size_t>(i)];
    pos += 8;
    return v;
  }
  void tag(char out[4], const char* what) {
    need(4, what);
    std::memcpy(out, bytes.data() + pos, 4);
    pos += 4;
  }
  void skip(std::size_t n, const char* what) {
    need(n, what);
    pos += n;
  }
};

struct ByteWriter {
  std::vector<std::uint8_t> bytes;

  void u16(std::uint16_t v) {
    bytes.push_back(static_cast<std::uint8_t>(v));
    bytes.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void tag(const char* t) { bytes.insert(bytes.end(), t, t + 4); }
};

}  // namespace detail

inline AudioBuffer read_wav(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader r{bytes};

  char tag[4];
  r.tag(tag, "RIFF header");
  if (std::memcmp(tag, "RIFF", 4) != 0) throw io_error("not a RIFF file", 0);
  r.u32("RIFF size");
  r.tag(tag, "WAVE tag");
  if (std::memcmp(tag, "WAVE", 4) != 0) throw io_error("not a WAVE file", 8);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_pos = 0, data_len = 0;

  while (r.pos + 8 <= bytes.size()) {
    r.tag(tag, "chunk id");
    const std::uint32_t chunk_len = r.u32("chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      const std::size_t chunk_start = r.pos;
      format = r.u16("format code");
      channels = r.u16("channel count");
      rate = r.u32("sample rate");
      r.u32("byte rate");
      r.u16("block align");
      bits = r.u16("bits per sample");
      have_fmt = true;
      r.pos = chunk_start;
      r.skip(chunk_len + (chunk_len & 1), "fmt chunk");
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data_pos = r.pos;
      data_len = chunk_len;
      r.skip(chunk_len + (chunk_len & 1), "data chunk");
    } else {
      r.skip(chunk_len + (chunk_len & 1), "chunk payload");
    }
  }

  if (!have_fmt) throw io_error("missing fmt chunk");
  if (data_pos == 0) throw io_error("missing data chunk");
  if (channels != 1) throw io_error("only mono files are supported");
  if (rate == 0) throw io_error("sample rate must be positive");

  AudioBuffer buf;
  buf.sample_rate = rate;
  if (format == 1 && bits == 16) {
    const std::size_t count = data_len / 2;
    buf.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t p = data_pos + 2 * i;
      auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(bytes[p]) |
                                         static_cast<std::uint16_t>(bytes[p + 1]) << 8);
      buf.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t count = data_len / 4;
    buf.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t p = data_pos + 4 * i;
      std::uint32_t u = 0;
      for (int b = 3; b >= 0; --b) u = (u << 8) | bytes[p + static_cast<std::size_t>(b)];
      buf.samples[i] = static_cast<double>(std::bit_cast<float>(u));
    }
  } else {
    throw io_error("unsupported codec: only 16-bit PCM and 32-bit float are handled");
  }
  return buf;
}

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& buf,
                      WavFormat format = WavFormat::float32) {
  for (double v : buf.samples) {
    if (!std::isfinite(v)) throw invalid_input("audio samples must be finite");
  }
  if (buf.sample_rate == 0) throw invalid_input("sample rate must be positive");

  detail::ByteWriter w;
  const bool is_float = format == WavFormat::float32;
  const std::uint16_t bytes_per = is_float ? 4 : 2;
  const auto data_len = static_cast<std::uint32_t>(buf.samples.size() * bytes_per);
  const std::uint32_t fact_len = is_float ? 12 : 0;

  w.tag("RIFF");
  w.u32(4 + 24 + fact_len + 8 + data_len);
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(16);
  w.u16(is_float ? 3 : 1);
  w.u16(1);
  w.u32(buf.sample_rate);
  w.u32(buf.sample_rate * bytes_per);
  w.u16(bytes_per);
  w.u16(static_cast<std::uint16_t>(8 * bytes_per));
  if (is_float) {
    w.tag("fact");
    w.u32(4);
    w.u32(static_cast<std::uint32_t>(buf.samples.size()));
  }
  w.tag("data");
  w.u32(data_len);
  for (double v : buf.samples) {
    if (is_float) {
      w.f32(static_cast<float>(v));
    } else {
      double scaled = std::nearbyint(v * 32768.0);
      scaled = std::min(32767.0, std::max(-32768.0, scaled));
      w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
  }
  detail::write_file_bytes(path, w.bytes);
}

}  // namespace phaseflow
