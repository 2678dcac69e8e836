#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "phaseflow/synth.hpp"

using namespace phaseflow;

TEST_CASE("sine generator", "[synth]") {
  auto x = synth_sine(440.0, 1.0, 16000);
  REQUIRE(x.size() == 16000);
  for (std::size_t i = 0; i < 50; ++i) {
    const double want = 0.8 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0);
    REQUIRE(x[i] == Approx(want).margin(1e-12));
  }
}

TEST_CASE("generators are deterministic", "[synth]") {
  CHECK(synth_speechlike(0.5, 16000, 7) == synth_speechlike(0.5, 16000, 7));
  CHECK(synth_speechlike(0.5, 16000, 7) != synth_speechlike(0.5, 16000, 8));
  CHECK(synth_chirp(100.0, 4000.0, 0.25, 16000) == synth_chirp(100.0, 4000.0, 0.25, 16000));
}

TEST_CASE("speechlike output passes the corpus validity check", "[synth]") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto x = synth_speechlike(1.0, 16000, seed);
    INFO("seed " << seed);
    REQUIRE(x.size() == 16000);
    CHECK(corpus_signal_valid(x));
  }
}

TEST_CASE("chirp sweeps its band", "[synth]") {
  auto x = synth_chirp(100.0, 4000.0, 0.5, 16000);
  REQUIRE(x.size() == 8000);
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  CHECK(peak == Approx(0.8).margin(1e-6));
}

TEST_CASE("generator input validation", "[synth]") {
  CHECK_THROWS_AS(synth_sine(440.0, 0.0, 16000), invalid_input);
  CHECK_THROWS_AS(synth_sine(440.0, -1.0, 16000), invalid_input);
  CHECK_THROWS_AS(synth_speechlike(1.0, 0, 1), invalid_input);
}

TEST_CASE("validity check rejects silence and out-of-range data", "[synth]") {
  CHECK_FALSE(corpus_signal_valid(std::vector<double>(1000, 0.0)));
  CHECK_FALSE(corpus_signal_valid(std::vector<double>(1000, 1.5)));
  CHECK_FALSE(corpus_signal_valid({}));
  CHECK(corpus_signal_valid(std::vector<double>(1000, 0.5)));
}
