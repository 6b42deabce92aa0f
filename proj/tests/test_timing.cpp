#include <cmath>
#include <random>

#include "doctest.h"
#include "pulsesync/errors.hpp"
#include "pulsesync/timing.hpp"

using namespace pulsesync;

namespace {
const OscillatorSpec kDefaultOsc{10e3, 1e-6, 500.0};
constexpr double us = 1e-6;
}  // namespace

TEST_SUITE("timing") {

TEST_CASE("heartbeat skew is distance over propagation speed") {
  CHECK(heartbeat_skew(BodyChannel(0.15)) == doctest::Approx(600 * us).epsilon(1e-12));
  CHECK(heartbeat_skew(BodyChannel(0.0)) == 0.0);
  CHECK(heartbeat_skew(BodyChannel(0.5, 250)) == doctest::Approx(2e-3).epsilon(1e-12));
  CHECK_THROWS_AS(BodyChannel(-0.1), ValidationError);
  CHECK_THROWS_AS(BodyChannel(0.1, 0.0), ValidationError);
}

TEST_CASE("counter quantization is one oscillator period") {
  CHECK(counter_quantization(kDefaultOsc) == doctest::Approx(100 * us).epsilon(1e-12));
  CHECK(counter_quantization(OscillatorSpec(1.0, 0, 0)) == 1.0);
  CHECK(counter_quantization(OscillatorSpec(1e3, 0, 0)) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(counter_quantization(OscillatorSpec(1e3, 0, 0, true)) == 0.0);
}

TEST_CASE("oscillator invariants") {
  CHECK_THROWS_AS(OscillatorSpec(0.0, 0, 0), ValidationError);
  CHECK_THROWS_AS(OscillatorSpec(-1.0, 0, 0), ValidationError);
  CHECK_THROWS_AS(OscillatorSpec(1e3, -1e-6, 0), ValidationError);
  CHECK_THROWS_AS(OscillatorSpec(1e3, 0, -1), ValidationError);
}

TEST_CASE("drift inaccuracy") {
  CHECK(drift_inaccuracy(kDefaultOsc, 0.8) == doctest::Approx(400 * us).epsilon(1e-12));
  CHECK(drift_inaccuracy(kDefaultOsc, 0.0) == 0.0);
  CHECK(drift_inaccuracy(kDefaultOsc, 0.05) == doctest::Approx(25 * us).epsilon(1e-12));
  CHECK_THROWS_AS(drift_inaccuracy(kDefaultOsc, -0.1), ValidationError);
}

TEST_CASE("jitter inaccuracy is a 4-sigma window on accumulated jitter") {
  CHECK(jitter_inaccuracy(kDefaultOsc, 0.8) == doctest::Approx(357.77087639996637 * us).epsilon(1e-12));
  CHECK(jitter_inaccuracy(kDefaultOsc, 0.0) == 0.0);
  CHECK(jitter_inaccuracy(kDefaultOsc, 0.05) == doctest::Approx(89.44271909999159 * us).epsilon(1e-12));
  CHECK_THROWS_AS(jitter_inaccuracy(kDefaultOsc, -1.0), ValidationError);
}

TEST_CASE("sync margin composition") {
  const BodyChannel ch(0.15);
  const MarginBreakdown m = sync_margin(kDefaultOsc, ch, 0.8);
  CHECK(m.t_hb == doctest::Approx(600 * us));
  CHECK(m.dt_counter == doctest::Approx(100 * us));
  CHECK(m.dt_drift == doctest::Approx(400 * us));
  CHECK(m.dt_jitter == doctest::Approx(357.7708764 * us));
  CHECK(m.m_s == doctest::Approx(2315.5417528 * us).epsilon(1e-9));
  CHECK(sync_margin(kDefaultOsc, ch, 0.05).m_s == doctest::Approx(1028.8854382 * us).epsilon(1e-9));

  const OscillatorSpec quiet(10e3, 0, 0);
  for (double t : {0.0, 0.01, 0.3, 5.0}) CHECK(sync_margin(quiet, BodyChannel(0), t).m_s == 2.0 / 10e3);
  CHECK_THROWS_AS(sync_margin(kDefaultOsc, ch, -1e-9), ValidationError);
}

TEST_CASE("margin identity holds bit-exactly and components are non-negative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const OscillatorSpec osc(std::pow(10.0, 1 + 6 * u(rng)), 1e-5 * u(rng), 1000 * u(rng));
    const BodyChannel ch(u(rng), 100 + 400 * u(rng));
    const MarginBreakdown m = sync_margin(osc, ch, 2.0 * u(rng));
    REQUIRE(m.m_s == m.t_hb + 2.0 * (m.dt_counter + m.dt_drift + m.dt_jitter));
    REQUIRE(m.t_hb >= 0);
    REQUIRE(m.dt_counter >= 0);
    REQUIRE(m.dt_drift >= 0);
    REQUIRE(m.dt_jitter >= 0);
  }
}

TEST_CASE("margin is monotone in elapsed time; drift linear; jitter scales as sqrt") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const BodyChannel ch(0.15);
  for (int i = 0; i < 1000; ++i) {
    const OscillatorSpec osc(std::pow(10.0, 2 + 4 * u(rng)), 1e-5 * u(rng), 1000 * u(rng));
    const double a = u(rng), b = u(rng);
    CHECK(sync_margin(osc, ch, std::min(a, b)).m_s <= sync_margin(osc, ch, std::max(a, b)).m_s);
    CHECK(drift_inaccuracy(osc, a + b) == doctest::Approx(drift_inaccuracy(osc, a) + drift_inaccuracy(osc, b)).epsilon(1e-14));
    CHECK(jitter_inaccuracy(osc, 4 * a) == doctest::Approx(2 * jitter_inaccuracy(osc, a)).epsilon(1e-14));
  }
  // Exact for representable inputs where the sqrt is exact.
  const OscillatorSpec binary(1024, 1e-6, 0);
  CHECK(jitter_inaccuracy(binary, 4 * 0.25) == 2 * jitter_inaccuracy(binary, 0.25));
  CHECK(drift_inaccuracy(kDefaultOsc, 0.5 + 0.25) == drift_inaccuracy(kDefaultOsc, 0.5) + drift_inaccuracy(kDefaultOsc, 0.25));
}

TEST_CASE("accumulated per-cycle jitter has standard deviation sigma*sqrt(N)") {
  // Independent oracle: sum N independent per-cycle draws directly.
  constexpr int kCycles = 10'000;
  constexpr int kSamples = 10'000;
  const double sigma = 1e-6;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> cycle(0.0, sigma);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    double acc = 0.0;
    for (int c = 0; c < kCycles; ++c) acc += cycle(rng);
    sum += acc;
    sum_sq += acc * acc;
  }
  const double mean = sum / kSamples;
  const double sd = std::sqrt((sum_sq - kSamples * mean * mean) / (kSamples - 1));
  const double expected = sigma * std::sqrt(static_cast<double>(kCycles));
  CHECK(std::abs(sd / expected - 1.0) < 0.03);
  // The 4-sigma window of Eq. 2 is exactly four of these at t = N / f.
  CHECK(jitter_inaccuracy(OscillatorSpec(1e4, sigma, 0), kCycles / 1e4) == doctest::Approx(4 * expected));
}

}  // TEST_SUITE
