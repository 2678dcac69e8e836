#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "phaseflow/projections.hpp"
#include "support/oracles.hpp"

using namespace phaseflow;

namespace {

// Elementwise reference built on std::polar/std::arg, a different code path
// than the implementation's scaling form.
Spectrogram oracle_proj_magnitude(const Spectrogram& spec, const MagnitudeSpectrogram& mag) {
  Spectrogram out(spec.bins(), spec.frames());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const cplx z = spec.data()[i];
    const double phase = z == cplx(0.0, 0.0) ? 0.0 : std::arg(z);
    out.data()[i] = std::polar(mag.data()[i], phase);
  }
  return out;
}

StftConfig small_cfg() { return make_stft_config(16, 4); }

}  // namespace

TEST_CASE("magnitude projection pointwise cases", "[proj]") {
  MagnitudeSpectrogram mag(1, 3);
  mag(0, 0) = 3.0;
  mag(0, 1) = 2.0;
  mag(0, 2) = 2.0;
  Spectrogram spec(1, 3);
  spec(0, 0) = cplx(1.0, 0.0);
  spec(0, 1) = cplx(0.0, 3.0);
  spec(0, 2) = cplx(0.0, 0.0);

  auto out = proj_magnitude(spec, mag);
  CHECK(std::abs(out(0, 0) - cplx(3.0, 0.0)) < 1e-15);
  CHECK(std::abs(out(0, 1) - cplx(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(out(0, 2) - cplx(2.0, 0.0)) < 1e-15);  // arg(0) taken as 0
}

TEST_CASE("magnitude projection is exact and idempotent", "[proj]") {
  auto spec = oracles::random_spectrogram(9, 6, 11);
  auto mag = oracles::random_magnitude(9, 6, 12);
  auto once = proj_magnitude(spec, mag);

  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(std::abs(std::abs(once.data()[i]) - mag.data()[i]) < 1e-12);
  }
  auto twice = proj_magnitude(once, mag);
  CHECK(oracles::frob_dist(twice, once) < 1e-12 * oracles::frob_norm(once));

  auto want = oracle_proj_magnitude(spec, mag);
  CHECK(oracles::frob_dist(once, want) < 1e-12 * oracles::frob_norm(want));
}

TEST_CASE("magnitude projection rejects mismatched dims", "[proj]") {
  CHECK_THROWS_AS(proj_magnitude(Spectrogram(3, 3), MagnitudeSpectrogram(3, 4)),
                  invalid_input);
}

TEST_CASE("consistency projection fixes true spectrograms", "[proj]") {
  auto cfg = small_cfg();
  auto x = oracles::random_signal(200, 21);
  auto spec = stft(x, cfg);
  auto projected = proj_consistency(spec, cfg);
  CHECK(oracles::frob_dist(projected, spec) < 1e-9 * oracles::frob_norm(spec));
}

TEST_CASE("consistency projection is idempotent", "[proj]") {
  auto cfg = small_cfg();
  auto spec = oracles::random_spectrogram(cfg.bins(), 8, 31);
  auto once = proj_consistency(spec, cfg);
  auto twice = proj_consistency(once, cfg);
  CHECK(oracles::frob_dist(twice, once) < 1e-9 * oracles::frob_norm(once));
}

TEST_CASE("consistency projection of zero is zero", "[proj]") {
  auto cfg = small_cfg();
  Spectrogram zero(cfg.bins(), 5);
  auto out = proj_consistency(zero, cfg);
  for (const auto& v : out.data()) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("consistency projection equals composing the synthesis and analysis oracles",
          "[proj][oracle]") {
  auto cfg = small_cfg();
  auto spec = oracles::random_spectrogram(cfg.bins(), 7, 77);
  auto got = proj_consistency(spec, cfg);

  auto signal = oracles::naive_istft_span(spec, cfg);
  // re-analysis without additional padding
  const std::size_t frames = (signal.size() - cfg.frame_len) / cfg.hop + 1;
  REQUIRE(frames == spec.frames());
  Spectrogram want(cfg.bins(), frames);
  for (std::size_t l = 0; l < frames; ++l) {
    std::vector<double> frame(cfg.frame_len);
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      frame[i] = signal[l * cfg.hop + i] * cfg.window[i];
    }
    auto bins = oracles::naive_real_dft_onesided(frame);
    for (std::size_t k = 0; k < bins.size(); ++k) want(k, l) = bins[k];
  }
  CHECK(oracles::frob_dist(got, want) < 1e-9 * oracles::frob_norm(want));
}

TEST_CASE("consistency projection is linear", "[proj]") {
  auto cfg = small_cfg();
  auto a = oracles::random_spectrogram(cfg.bins(), 6, 1);
  auto b = oracles::random_spectrogram(cfg.bins(), 6, 2);
  const double ca = 0.7, cb = -1.3;

  Spectrogram mix(cfg.bins(), 6);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix.data()[i] = ca * a.data()[i] + cb * b.data()[i];
  }
  auto lhs = proj_consistency(mix, cfg);
  auto pa = proj_consistency(a, cfg);
  auto pb = proj_consistency(b, cfg);
  Spectrogram rhs(cfg.bins(), 6);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs.data()[i] = ca * pa.data()[i] + cb * pb.data()[i];
  }
  CHECK(oracles::frob_dist(lhs, rhs) < 1e-9 * oracles::frob_norm(rhs));
}

TEST_CASE("reflections satisfy r = 2p - x", "[reflect]") {
  auto cfg = small_cfg();
  auto spec = oracles::random_spectrogram(cfg.bins(), 5, 3);
  auto mag = oracles::random_magnitude(cfg.bins(), 5, 4);

  auto ra = reflect_magnitude(spec, mag);
  auto pa = proj_magnitude(spec, mag);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(std::abs(ra.data()[i] - (2.0 * pa.data()[i] - spec.data()[i])) < 1e-12);
  }

  auto rc = reflect_consistency(spec, cfg);
  auto pc = proj_consistency(spec, cfg);
  for (std::size_t i = 0; i < rc.size(); ++i) {
    CHECK(std::abs(rc.data()[i] - (2.0 * pc.data()[i] - spec.data()[i])) < 1e-12);
  }
}

TEST_CASE("reflection of a point already in the set is the point", "[reflect]") {
  auto cfg = small_cfg();
  auto x = oracles::random_signal(120, 8);
  auto spec = stft(x, cfg);

  auto rc = reflect_consistency(spec, cfg);
  CHECK(oracles::frob_dist(rc, spec) < 1e-9 * oracles::frob_norm(spec));

  auto mag = magnitude(spec);
  auto ra = reflect_magnitude(spec, mag);
  CHECK(oracles::frob_dist(ra, spec) < 1e-12 * oracles::frob_norm(spec));
}

TEST_CASE("relaxed operators reduce to reflection and identity at beta = 1", "[relax]") {
  auto cfg = small_cfg();
  auto spec = oracles::random_spectrogram(cfg.bins(), 5, 13);
  auto mag = oracles::random_magnitude(cfg.bins(), 5, 14);

  auto fa = relax_magnitude(spec, mag, 1.0);
  auto ra = reflect_magnitude(spec, mag);
  CHECK(oracles::frob_dist(fa, ra) < 1e-12 * oracles::frob_norm(ra));

  auto fc = relax_consistency(spec, cfg, 1.0);
  CHECK(oracles::frob_dist(fc, spec) < 1e-12 * oracles::frob_norm(spec));
}

TEST_CASE("relaxed magnitude operator fixes points with the target magnitude", "[relax]") {
  auto cfg = small_cfg();
  auto spec = oracles::random_spectrogram(cfg.bins(), 4, 23);
  auto mag = magnitude(spec);
  for (double beta : {0.3, 1.0, 2.5, -0.8}) {
    auto fa = relax_magnitude(spec, mag, beta);
    INFO("beta = " << beta);
    CHECK(oracles::frob_dist(fa, spec) < 1e-10 * oracles::frob_norm(spec));
  }
}

TEST_CASE("relaxed operators match their elementwise oracles", "[relax][oracle]") {
  auto cfg = small_cfg();
  auto spec = oracles::random_spectrogram(cfg.bins(), 5, 33);
  auto mag = oracles::random_magnitude(cfg.bins(), 5, 34);
  const double beta = 0.5;

  auto fa = relax_magnitude(spec, mag, beta);
  auto pa = proj_magnitude(spec, mag);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const cplx want = pa.data()[i] + (pa.data()[i] - spec.data()[i]) / beta;
    CHECK(std::abs(fa.data()[i] - want) < 1e-12);
  }

  auto fc = relax_consistency(spec, cfg, beta);
  auto pc = proj_consistency(spec, cfg);
  for (std::size_t i = 0; i < fc.size(); ++i) {
    const cplx want = pc.data()[i] - (pc.data()[i] - spec.data()[i]) / beta;
    CHECK(std::abs(fc.data()[i] - want) < 1e-12);
  }
}

TEST_CASE("relaxed operators reject beta = 0", "[relax]") {
  auto cfg = small_cfg();
  Spectrogram spec(cfg.bins(), 2);
  MagnitudeSpectrogram mag(cfg.bins(), 2);
  CHECK_THROWS_AS(relax_magnitude(spec, mag, 0.0), invalid_parameter);
  CHECK_THROWS_AS(relax_consistency(spec, cfg, 0.0), invalid_parameter);
}
