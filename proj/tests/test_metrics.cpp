#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "phaseflow/metrics.hpp"
#include "support/oracles.hpp"

using namespace phaseflow;

TEST_CASE("spectral convergence basics", "[metrics]") {
  auto mag = oracles::random_magnitude(5, 4, 1);

  SECTION("exact magnitudes give zero") {
    Spectrogram est(5, 4);
    for (std::size_t i = 0; i < est.size(); ++i) est.data()[i] = cplx(0.0, mag.data()[i]);
    CHECK(spectral_convergence(mag, est) == Approx(0.0).margin(1e-15));
  }
  SECTION("a zero estimate gives one") {
    Spectrogram zero(5, 4);
    CHECK(spectral_convergence(mag, zero) == Approx(1.0).margin(1e-15));
  }
  SECTION("all-zero target is undefined") {
    MagnitudeSpectrogram zero(5, 4);
    CHECK_THROWS_AS(spectral_convergence(zero, Spectrogram(5, 4)), undefined_metric);
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(spectral_convergence(mag, Spectrogram(5, 3)), invalid_input);
  }
}

TEST_CASE("spectral convergence matches direct summation on a 3x2 grid", "[metrics][oracle]") {
  MagnitudeSpectrogram target(3, 2);
  Spectrogram est(3, 2);
  phaseflow::DeterministicRng rng(5);
  for (auto& v : target.data()) v = rng.uniform(0.0, 3.0);
  for (auto& v : est.data()) v = cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));

  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = 0; l < 2; ++l) {
      const double d = target(k, l) - std::abs(est(k, l));
      err += d * d;
      ref += target(k, l) * target(k, l);
    }
  }
  const double want = std::sqrt(err) / std::sqrt(ref);
  CHECK(spectral_convergence(target, est) == Approx(want).margin(1e-12));
}

TEST_CASE("magnitude snr in dB", "[metrics]") {
  auto mag = oracles::random_magnitude(4, 4, 9);

  SECTION("SC = 1 maps to 0 dB") {
    Spectrogram zero(4, 4);
    CHECK(magnitude_snr_db(mag, zero) == Approx(0.0).margin(1e-12));
  }
  SECTION("SC = 0.1 maps to 20 dB") {
    // scale the magnitudes so the residual is exactly 0.1 of the reference
    Spectrogram est(4, 4);
    for (std::size_t i = 0; i < est.size(); ++i) est.data()[i] = cplx(0.9 * mag.data()[i], 0.0);
    CHECK(spectral_convergence(mag, est) == Approx(0.1).margin(1e-12));
    CHECK(magnitude_snr_db(mag, est) == Approx(20.0).margin(1e-9));
  }
  SECTION("composition with the SC value") {
    auto est = oracles::random_spectrogram(4, 4, 10);
    const double sc = spectral_convergence(mag, est);
    CHECK(magnitude_snr_db(mag, est) == Approx(-20.0 * std::log10(sc)).margin(1e-12));
  }
}

TEST_CASE("spectral convergence is scale covariant", "[metrics]") {
  auto mag = oracles::random_magnitude(6, 5, 2);
  auto est = oracles::random_spectrogram(6, 5, 3);
  const double base = spectral_convergence(mag, est);

  for (double c : {0.25, 3.0, 1000.0}) {
    MagnitudeSpectrogram smag(6, 5);
    Spectrogram sest(6, 5);
    for (std::size_t i = 0; i < smag.size(); ++i) smag.data()[i] = c * mag.data()[i];
    for (std::size_t i = 0; i < sest.size(); ++i) sest.data()[i] = c * est.data()[i];
    INFO("c = " << c);
    CHECK(spectral_convergence(smag, sest) == Approx(base).margin(1e-12));
  }
}

TEST_CASE("spectral convergence ignores phase", "[metrics]") {
  auto mag = oracles::random_magnitude(6, 5, 4);
  auto est = oracles::random_spectrogram(6, 5, 5);
  const double base = spectral_convergence(mag, est);

  phaseflow::DeterministicRng rng(6);
  Spectrogram rotated(6, 5);
  for (std::size_t i = 0; i < est.size(); ++i) {
    rotated.data()[i] = est.data()[i] * std::polar(1.0, rng.uniform(0.0, 6.28));
  }
  CHECK(spectral_convergence(mag, rotated) == Approx(base).margin(1e-12));
}

TEST_CASE("signal-domain SC crops the reconstruction's surplus frames", "[metrics]") {
  auto cfg = make_stft_config(32, 8);
  auto x = oracles::random_signal(400, 77);
  auto target = magnitude(stft(x, cfg));

  // perfect reconstruction scores (near) zero even though istft() output is
  // longer than the original signal
  auto y = istft(stft(x, cfg), cfg);
  CHECK(spectral_convergence_signal(target, y, cfg) < 1e-9);
}
