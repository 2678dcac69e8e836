#pragma once

// Reconstruction-quality measures. Spectral convergence is the Frobenius-
// relative magnitude error ||A - |X|||_F / ||A||_F; lower is better.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "phaseflow/errors.hpp"
#include "phaseflow/stft.hpp"

namespace phaseflow {

struct MetricReport {
  double spectral_convergence = 0.0;
  double magnitude_snr_db = 0.0;
  std::size_t signal_length = 0;
  std::string algorithm_label;
  std::optional<double> external_score;  // filled by an external scorer, if any
};

inline double spectral_convergence(const MagnitudeSpectrogram& target,
                                   const Spectrogram& estimate) {
  if (target.bins() != estimate.bins() || target.frames() != estimate.frames()) {
    throw invalid_input("target and estimate dimensions differ");
  }
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double a = target.data()[i];
    const double d = a - std::abs(estimate.data()[i]);
    err += d * d;
    ref += a * a;
  }
  if (ref == 0.0) throw undefined_metric("spectral convergence undefined for all-zero target");
  return std::sqrt(err / ref);
}

// -20*log10(SC); +inf for an exact magnitude match.
inline double magnitude_snr_db(const MagnitudeSpectrogram& target, const Spectrogram& estimate) {
  return -20.0 * std::log10(spectral_convergence(target, estimate));
}

// SC between a target magnitude and the spectrogram of a reconstructed
// signal. The reconstruction is framed with the same config; surplus trailing
// frames (the reconstruction includes pad tails) are ignored.
inline double spectral_convergence_signal(const MagnitudeSpectrogram& target,
                                          std::span<const double> reconstruction,
                                          const StftConfig& cfg) {
  Spectrogram est = stft(reconstruction, cfg);
  if (est.frames() < target.frames() || est.bins() != target.bins()) {
    throw invalid_input("reconstruction too short for the target spectrogram");
  }
  Spectrogram cropped(target.bins(), target.frames());
  for (std::size_t l = 0; l < target.frames(); ++l) {
    auto src = est.column(l);
    auto dst = cropped.column(l);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return spectral_convergence(target, cropped);
}

}  // namespace phaseflow
