#pragma once

// The two constraint projections of iterative STFT phase retrieval, plus the
// reflection and relaxed operators built from them.
//
//   proj_magnitude     replaces magnitudes with the target, keeps phases
//   proj_consistency   inverse STFT followed by STFT; maps onto the set of
//                      spectrograms realizable by some time-domain signal
//   reflect_*          r(X) = 2 p(X) - X
//   relax_*            the difference-map generalizations with parameter beta

#include <cmath>
#include <complex>
#include <cstddef>

#include "phaseflow/errors.hpp"
#include "phaseflow/stft.hpp"

namespace phaseflow {

namespace detail {

inline void check_same_dims(const Spectrogram& spec, const MagnitudeSpectrogram& mag) {
  if (spec.bins() != mag.bins() || spec.frames() != mag.frames()) {
    throw invalid_input("spectrogram and magnitude dimensions differ");
  }
}

// target * z/|z|; phase of a zero bin is taken as 0.
inline cplx with_magnitude(cplx z, double target) {
  const double mod = std::abs(z);
  if (mod == 0.0) return cplx(target, 0.0);
  return cplx(target * (z.real() / mod), target * (z.imag() / mod));
}

}  // namespace detail

inline Spectrogram proj_magnitude(const Spectrogram& spec, const MagnitudeSpectrogram& mag) {
  detail::check_same_dims(spec, mag);
  Spectrogram out(spec.bins(), spec.frames());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out.data()[i] = detail::with_magnitude(spec.data()[i], mag.data()[i]);
  }
  return out;
}

inline Spectrogram proj_consistency(const Spectrogram& spec, const StftConfig& cfg) {
  return stft_span(istft_span(spec, cfg), cfg);
}

inline Spectrogram reflect_magnitude(const Spectrogram& spec, const MagnitudeSpectrogram& mag) {
  Spectrogram out = proj_magnitude(spec, mag);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = 2.0 * out.data()[i] - spec.data()[i];
  }
  return out;
}

inline Spectrogram reflect_consistency(const Spectrogram& spec, const StftConfig& cfg) {
  Spectrogram out = proj_consistency(spec, cfg);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = 2.0 * out.data()[i] - spec.data()[i];
  }
  return out;
}

// f_A(X) = p_A(X) + (p_A(X) - X)/beta
inline Spectrogram relax_magnitude(const Spectrogram& spec, const MagnitudeSpectrogram& mag,
                                   double beta) {
  if (beta == 0.0) throw invalid_parameter("relaxation parameter must be nonzero");
  Spectrogram out = proj_magnitude(spec, mag);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx p = out.data()[i];
    out.data()[i] = p + (p - spec.data()[i]) / beta;
  }
  return out;
}

// f_C(X) = p_C(X) - (p_C(X) - X)/beta
inline Spectrogram relax_consistency(const Spectrogram& spec, const StftConfig& cfg,
                                     double beta) {
  if (beta == 0.0) throw invalid_parameter("relaxation parameter must be nonzero");
  Spectrogram out = proj_consistency(spec, cfg);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx p = out.data()[i];
    out.data()[i] = p - (p - spec.data()[i]) / beta;
  }
  return out;
}

}  // namespace phaseflow
