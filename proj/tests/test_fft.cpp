#include <catch2/catch.hpp>

#include <complex>
#include <vector>

#include "phaseflow/fft.hpp"
#include "support/oracles.hpp"

using phaseflow::fft::cplx;

namespace {

double rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    err += std::norm(got[i] - want[i]);
    ref += std::norm(want[i]);
  }
  return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
}

std::vector<cplx> random_cplx(std::size_t n, std::uint64_t seed) {
  phaseflow::DeterministicRng rng(seed);
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return x;
}

}  // namespace

TEST_CASE("fft matches the naive DFT", "[fft]") {
  for (std::size_t n : {1UL, 2UL, 4UL, 8UL, 16UL, 64UL, 256UL, 512UL, 1024UL}) {
    auto x = random_cplx(n, 100 + n);
    auto want = oracles::naive_dft(x);
    auto got = phaseflow::fft::dft(x);
    INFO("n = " << n);
    CHECK(rel_err(got, want) < 1e-11);
  }
}

TEST_CASE("fft handles non-power-of-two sizes", "[fft]") {
  for (std::size_t n : {3UL, 5UL, 6UL, 7UL, 12UL, 17UL, 100UL, 257UL, 480UL}) {
    auto x = random_cplx(n, 300 + n);
    auto want = oracles::naive_dft(x);
    auto got = phaseflow::fft::dft(x);
    INFO("n = " << n);
    CHECK(rel_err(got, want) < 1e-10);
  }
}

TEST_CASE("inverse transform undoes the forward one", "[fft]") {
  for (std::size_t n : {2UL, 9UL, 64UL, 130UL, 512UL}) {
    auto x = random_cplx(n, 7 * n + 1);
    auto back = phaseflow::fft::idft(phaseflow::fft::dft(x));
    INFO("n = " << n);
    CHECK(rel_err(back, x) < 1e-12);
  }
}

TEST_CASE("one-sided real transform agrees with the complex one", "[fft]") {
  for (std::size_t n : {2UL, 4UL, 8UL, 15UL, 512UL}) {
    auto sig = oracles::random_signal(n, 40 + n);
    auto got = phaseflow::fft::real_dft_onesided(sig);
    auto want = oracles::naive_real_dft_onesided(sig);
    REQUIRE(got.size() == n / 2 + 1);
    INFO("n = " << n);
    CHECK(rel_err(got, want) < 1e-10);
  }
}

TEST_CASE("one-sided real round trip", "[fft]") {
  for (std::size_t n : {2UL, 4UL, 9UL, 512UL}) {
    auto sig = oracles::random_signal(n, 90 + n);
    auto bins = phaseflow::fft::real_dft_onesided(sig);
    auto back = phaseflow::fft::real_idft_onesided(bins, n);
    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_err = std::max(max_err, std::abs(back[i] - sig[i]));
    INFO("n = " << n);
    CHECK(max_err < 1e-12);
  }
}

TEST_CASE("one-sided inverse rejects mismatched bin counts", "[fft]") {
  std::vector<cplx> bins(5);
  CHECK_THROWS_AS(phaseflow::fft::real_idft_onesided(bins, 16), phaseflow::invalid_input);
}
