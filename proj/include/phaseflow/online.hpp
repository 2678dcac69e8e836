#pragma once

// Frame-by-frame phase retrieval. Any of the iterative projection algorithms
// runs online by swapping the consistency projection for its partial
// counterpart, which sees two buffers:
//
//   frozen  frames already committed. They are never stored as spectra; the
//           running windowed-signal sum and squared-window sum carry all the
//           information the synthesis needs.
//   fluid   the current frame plus B look-ahead frames, still being iterated.
//
// All bookkeeping below uses the padded coordinates of the stft() framing
// convention: frame l covers samples [l*H, l*H + N). Output samples are
// emitted in stft()-input coordinates, i.e. the leading pad is swallowed, so
// a fully committed stream reproduces istft() of the same spectrogram.
//
// Per input column the engine: slides the fluid window, initializes the new
// frame (zero phase for the first B+1 frames, afterwards the phase of the
// re-analyzed running signal estimate), runs I iterations of the configured
// algorithm over the whole fluid buffer, then commits the oldest fluid frame
// with its target magnitude imposed and emits the hop's worth of samples no
// future frame can touch.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "phaseflow/algorithms.hpp"
#include "phaseflow/errors.hpp"
#include "phaseflow/fft.hpp"
#include "phaseflow/projections.hpp"
#include "phaseflow/stft.hpp"

namespace phaseflow {

// Number of earlier frames a frame overlaps with: ceil(N/H) - 1.
inline std::size_t overlap_depth(const StftConfig& cfg) {
  return (cfg.frame_len + cfg.hop - 1) / cfg.hop - 1;
}

// First padded-coordinate sample shared by frame m and the frozen buffer,
// n0 = H*(m - ceil(N/H - 1)), clamped to 0. Frozen running sums are kept
// from here on; everything earlier is fully determined and already emitted.
inline std::size_t first_overlap_sample(std::size_t frame_index, const StftConfig& cfg) {
  const auto m = static_cast<std::int64_t>(frame_index);
  const auto depth = static_cast<std::int64_t>(overlap_depth(cfg));
  const std::int64_t n0 = static_cast<std::int64_t>(cfg.hop) * (m - depth);
  return n0 > 0 ? static_cast<std::size_t>(n0) : 0;
}

// Running sums for the committed frames: numerator (windowed signal) and
// denominator (squared window) of the least-squares synthesis, both stored
// from padded coordinate `base` onward.
struct FrozenBuffer {
  std::vector<double> signal_sum;
  std::vector<double> window_sum;
  std::size_t base = 0;
  std::size_t frames_committed = 0;  // m

  double signal_at(std::size_t n) const {
    return n >= base && n - base < signal_sum.size() ? signal_sum[n - base] : 0.0;
  }
  double window_at(std::size_t n) const {
    return n >= base && n - base < window_sum.size() ? window_sum[n - base] : 0.0;
  }
};

// Least-squares synthesis of the fluid frames on top of the frozen sums.
// Returns samples for padded coordinates [first_overlap_sample(m), span end),
// where the span end is the last fluid frame's end.
inline std::vector<double> partial_istft(const Spectrogram& fluid, const FrozenBuffer& frozen,
                                         const StftConfig& cfg) {
  validate(cfg);
  detail::check_dims(fluid, cfg);
  const std::size_t n = cfg.frame_len;
  const std::size_t m = frozen.frames_committed;
  const std::size_t n0 = first_overlap_sample(m, cfg);
  const std::size_t end = (m + fluid.frames() - 1) * cfg.hop + n;
  const std::size_t len = end - n0;

  std::vector<double> num(len, 0.0);
  std::vector<double> den(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    num[i] = frozen.signal_at(n0 + i);
    den[i] = frozen.window_at(n0 + i);
  }
  for (std::size_t j = 0; j < fluid.frames(); ++j) {
    const auto frame = fft::real_idft_onesided(fluid.column(j), n);
    const std::size_t start = (m + j) * cfg.hop - n0;
    for (std::size_t i = 0; i < n; ++i) {
      num[start + i] += cfg.window[i] * frame[i];
      den[start + i] += cfg.window[i] * cfg.window[i];
    }
  }

  const double max_den = *std::max_element(den.begin(), den.end());
  const double floor = detail::kDenomFloorRatio * max_den;
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = den[i] < floor ? 0.0 : num[i] / den[i];
  }
  return out;
}

// Partial consistency projection: re-window and re-transform only the fluid
// frames of the partial synthesis. The frozen sums are read, never written.
// With nothing committed and the whole spectrogram fluid this coincides with
// proj_consistency.
inline Spectrogram partial_proj_consistency(const Spectrogram& fluid,
                                            const FrozenBuffer& frozen,
                                            const StftConfig& cfg) {
  const auto estimate = partial_istft(fluid, frozen, cfg);
  const std::size_t m = frozen.frames_committed;
  const std::size_t n0 = first_overlap_sample(m, cfg);
  Spectrogram out(fluid.bins(), fluid.frames());
  for (std::size_t j = 0; j < fluid.frames(); ++j) {
    const auto start = static_cast<std::int64_t>((m + j) * cfg.hop);
    detail::analyze_frame(estimate, static_cast<std::int64_t>(n0), start, cfg, out.column(j));
  }
  return out;
}

// One stream's worth of state. push_column() per magnitude column, flush()
// at end of stream; both return finalized output samples. Strictly
// sequential per instance; independent instances are unrelated.
class OnlineReconstructor {
 public:
  OnlineReconstructor(StftConfig cfg, AlgorithmSpec spec, std::size_t lookahead)
      : cfg_(std::move(cfg)), spec_(spec), lookahead_(lookahead) {
    validate(cfg_);
    spec_.check();
    if (cfg_.hop >= cfg_.frame_len) {
      throw invalid_config("online engine needs overlapping frames (hop < frame length)");
    }
    frozen_.base = 0;
  }

  std::size_t lookahead() const { return lookahead_; }
  std::size_t columns_pushed() const { return pushed_; }
  std::size_t frames_committed() const { return frozen_.frames_committed; }
  const FrozenBuffer& frozen() const { return frozen_; }
  const ProjectionCounter& projections() const { return counter_; }
  const std::vector<double>& per_frame_sc() const { return per_frame_sc_; }

  // Current fluid estimates, oldest first (may hold < B+1 columns while the
  // pipeline warms up or drains).
  Spectrogram fluid() const { return fluid_spectrogram(); }

  void record_committed_columns(bool on) { record_commits_ = on; }
  const std::vector<std::vector<cplx>>& committed_columns() const { return committed_cols_; }

  std::vector<double> push_column(std::span<const double> magnitude_column) {
    if (flushed_) throw invalid_input("stream already flushed");
    if (magnitude_column.size() != cfg_.bins()) {
      throw invalid_input("magnitude column has wrong bin count");
    }
    for (double v : magnitude_column) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw invalid_input("magnitude entries must be finite and nonnegative");
      }
    }

    const std::size_t index = pushed_;
    std::vector<cplx> column(cfg_.bins());
    if (index <= lookahead_) {
      for (std::size_t k = 0; k < column.size(); ++k) {
        column[k] = cplx(magnitude_column[k], 0.0);
      }
    } else {
      column = informed_init(magnitude_column);
    }
    fluid_cols_.push_back(std::move(column));
    fluid_mags_.emplace_back(magnitude_column.begin(), magnitude_column.end());
    ++pushed_;

    if (fluid_cols_.size() <= lookahead_) return {};  // warm-up
    return iterate_and_commit();
  }

  // Commits the remaining fluid frames, one per step with I iterations each,
  // then emits the synthesis tail of the last frame.
  std::vector<double> flush() {
    if (flushed_) return {};
    flushed_ = true;
    std::vector<double> out;
    while (!fluid_cols_.empty()) {
      auto chunk = iterate_and_commit();
      out.insert(out.end(), chunk.begin(), chunk.end());
    }
    if (frozen_.frames_committed > 0) {
      const std::size_t span_end =
          (frozen_.frames_committed - 1) * cfg_.hop + cfg_.frame_len;
      auto tail = emit_range(span_end);
      out.insert(out.end(), tail.begin(), tail.end());
    }
    return out;
  }

 private:
  Spectrogram fluid_spectrogram() const {
    Spectrogram spec(cfg_.bins(), fluid_cols_.size());
    for (std::size_t j = 0; j < fluid_cols_.size(); ++j) {
      std::copy(fluid_cols_[j].begin(), fluid_cols_[j].end(), spec.column(j).begin());
    }
    return spec;
  }

  MagnitudeSpectrogram fluid_magnitude() const {
    MagnitudeSpectrogram mag(cfg_.bins(), fluid_mags_.size());
    for (std::size_t j = 0; j < fluid_mags_.size(); ++j) {
      std::copy(fluid_mags_[j].begin(), fluid_mags_[j].end(), mag.column(j).begin());
    }
    return mag;
  }

  // New-frame phase: re-analyze the running signal estimate with the
  // zero-phase newcomer included, then keep the phase of the newcomer's
  // re-analyzed column and impose its magnitude.
  std::vector<cplx> informed_init(std::span<const double> magnitude_column) const {
    Spectrogram stack(cfg_.bins(), fluid_cols_.size() + 1);
    for (std::size_t j = 0; j < fluid_cols_.size(); ++j) {
      std::copy(fluid_cols_[j].begin(), fluid_cols_[j].end(), stack.column(j).begin());
    }
    auto last = stack.column(fluid_cols_.size());
    for (std::size_t k = 0; k < last.size(); ++k) last[k] = cplx(magnitude_column[k], 0.0);

    const auto estimate = partial_istft(stack, frozen_, cfg_);
    const std::size_t new_frame = frozen_.frames_committed + fluid_cols_.size();
    const std::size_t n0 = first_overlap_sample(frozen_.frames_committed, cfg_);
    std::vector<cplx> bins(cfg_.bins());
    detail::analyze_frame(estimate, static_cast<std::int64_t>(n0),
                          static_cast<std::int64_t>(new_frame * cfg_.hop), cfg_,
                          std::span<cplx>(bins));

    std::vector<cplx> out(cfg_.bins());
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = detail::with_magnitude(bins[k], magnitude_column[k]);
    }
    return out;
  }

  std::vector<double> iterate_and_commit() {
    const std::size_t n = cfg_.frame_len;
    const std::size_t hop = cfg_.hop;
    const std::size_t m = frozen_.frames_committed;

    if (spec_.iterations > 0) {
      // Momentum state never survives a window shift: the partial projection
      // changes with the frozen buffer, so each step starts fresh.
      IterState st = IterState::make(fluid_spectrogram(), spec_.algorithm);
      const MagnitudeSpectrogram fmag = fluid_magnitude();
      auto pc = [this](const Spectrogram& x) {
        return partial_proj_consistency(x, frozen_, cfg_);
      };
      for (std::size_t i = 0; i < spec_.iterations; ++i) {
        algorithm_step(st, fmag, spec_, pc, &counter_);
      }
      for (std::size_t j = 0; j < fluid_cols_.size(); ++j) {
        auto col = st.estimate.column(j);
        fluid_cols_[j].assign(col.begin(), col.end());
      }
    }

    // Commit the oldest fluid frame with its magnitude imposed.
    std::vector<cplx> committed(cfg_.bins());
    for (std::size_t k = 0; k < committed.size(); ++k) {
      committed[k] = detail::with_magnitude(fluid_cols_.front()[k], fluid_mags_.front()[k]);
    }
    const auto frame = fft::real_idft_onesided(committed, n);

    const std::size_t frame_start = m * hop;
    const std::size_t frame_end = frame_start + n;
    ensure_coverage(frame_end);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = frame_start + i - frozen_.base;
      frozen_.signal_sum[pos] += cfg_.window[i] * frame[i];
      frozen_.window_sum[pos] += cfg_.window[i] * cfg_.window[i];
    }

    record_frame_sc(frame_start);
    if (record_commits_) committed_cols_.push_back(committed);

    ++frozen_.frames_committed;
    fluid_cols_.erase(fluid_cols_.begin());
    fluid_mags_.erase(fluid_mags_.begin());

    // Emit everything no future frame can touch; swallow the leading pad so
    // output samples align with the signal originally analyzed.
    auto out = emit_range(frame_start + hop);

    // Drop sums that precede the next frame's overlap region.
    const std::size_t new_base = first_overlap_sample(frozen_.frames_committed, cfg_);
    if (new_base > frozen_.base) {
      const auto drop = static_cast<std::ptrdiff_t>(new_base - frozen_.base);
      frozen_.signal_sum.erase(frozen_.signal_sum.begin(), frozen_.signal_sum.begin() + drop);
      frozen_.window_sum.erase(frozen_.window_sum.begin(), frozen_.window_sum.begin() + drop);
      frozen_.base = new_base;
    }
    return out;
  }

  // Finalized samples in padded coordinates [emitted so far, upper), skipping
  // the leading pad.
  std::vector<double> emit_range(std::size_t upper) {
    std::vector<double> out;
    const std::size_t from = std::max(emitted_upto_, cfg_.pad());
    if (from < upper && !frozen_.window_sum.empty()) {
      const double max_den =
          *std::max_element(frozen_.window_sum.begin(), frozen_.window_sum.end());
      const double floor = detail::kDenomFloorRatio * max_den;
      out.reserve(upper - from);
      for (std::size_t pos = from; pos < upper; ++pos) {
        const double den = frozen_.window_at(pos);
        out.push_back(den < floor ? 0.0 : frozen_.signal_at(pos) / den);
      }
    }
    emitted_upto_ = std::max(emitted_upto_, upper);
    return out;
  }

  void ensure_coverage(std::size_t padded_end) {
    if (padded_end <= frozen_.base) return;
    const std::size_t need = padded_end - frozen_.base;
    if (frozen_.signal_sum.size() < need) {
      frozen_.signal_sum.resize(need, 0.0);
      frozen_.window_sum.resize(need, 0.0);
    }
  }

  // SC between the committed frame's target magnitude and the re-analyzed
  // frozen estimate over the frame's span; a monitoring trace, not part of
  // the algorithm.
  void record_frame_sc(std::size_t frame_start) {
    const std::size_t n = cfg_.frame_len;
    std::vector<double> est(n, 0.0);
    const double max_den =
        *std::max_element(frozen_.window_sum.begin(), frozen_.window_sum.end());
    const double floor = detail::kDenomFloorRatio * max_den;
    for (std::size_t i = 0; i < n; ++i) {
      const double den = frozen_.window_at(frame_start + i);
      est[i] = den < floor ? 0.0 : frozen_.signal_at(frame_start + i) / den;
    }
    for (std::size_t i = 0; i < n; ++i) est[i] *= cfg_.window[i];
    const auto bins = fft::real_dft_onesided(est);

    double err = 0.0, ref = 0.0, got = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double a = fluid_mags_.front()[k];
      const double b = std::abs(bins[k]);
      err += (a - b) * (a - b);
      ref += a * a;
      got += b * b;
    }
    if (ref > 0.0) {
      per_frame_sc_.push_back(std::sqrt(err / ref));
    } else {
      per_frame_sc_.push_back(got > 0.0 ? 1.0 : 0.0);
    }
  }

  StftConfig cfg_;
  AlgorithmSpec spec_;
  std::size_t lookahead_ = 0;
  std::vector<std::vector<cplx>> fluid_cols_;
  std::vector<std::vector<double>> fluid_mags_;
  FrozenBuffer frozen_;
  std::size_t pushed_ = 0;
  std::size_t emitted_upto_ = 0;
  bool flushed_ = false;
  bool record_commits_ = false;
  ProjectionCounter counter_;
  std::vector<double> per_frame_sc_;
  std::vector<std::vector<cplx>> committed_cols_;
};

struct StreamResult {
  std::vector<double> signal;
  std::vector<double> per_frame_sc;
  ProjectionCounter projections;
};

// Drives the reconstructor over all columns of a magnitude spectrogram and
// flushes. The output has the same length istft() would produce.
inline StreamResult stream_reconstruct(const MagnitudeSpectrogram& mag, const StftConfig& cfg,
                                       const AlgorithmSpec& spec, std::size_t lookahead) {
  mag.validate_entries();
  OnlineReconstructor engine(cfg, spec, lookahead);
  StreamResult result;
  result.signal.reserve(aligned_length(mag.frames(), cfg));
  for (std::size_t l = 0; l < mag.frames(); ++l) {
    auto chunk = engine.push_column(mag.column(l));
    result.signal.insert(result.signal.end(), chunk.begin(), chunk.end());
  }
  auto tail = engine.flush();
  result.signal.insert(result.signal.end(), tail.begin(), tail.end());
  result.per_frame_sc = engine.per_frame_sc();
  result.projections = engine.projections();
  return result;
}

}  // namespace phaseflow
