#include <cmath>

#include "doctest.h"
#include "pulsesync/baseline.hpp"
#include "pulsesync/errors.hpp"

using namespace pulsesync;

namespace {

constexpr double kTwb = 160e-6;  // 16 b at 100 kb/s
constexpr double kPrx = 10e-6;
constexpr double kPtx = 10e-6;

DutyCycleConfig config_at(double delta, double t_lat = 0.05) {
  DutyCycleConfig c;
  c.delta = delta;
  c.t_lat = t_lat;
  return c;
}

// Expected mean power under a uniform wake phase, written from the model
// description: leaf listening + beacon airtime + data + timers.
double mean_power_oracle(double delta, double t_lat, double gap) {
  const double window = 2 * kTwb + gap;
  const double rho = kTwb / (kTwb + gap);
  const double mean_wait = delta >= 1.0 ? 0.0 : window / delta / 2.0;
  return delta * kPrx + kPtx * (rho * mean_wait + kTwb) / t_lat + (kPtx + kPrx) * 0.01 + 2 * 100e-9;
}

}  // namespace

TEST_SUITE("baseline") {

TEST_CASE("listening window spans two beacons and one gap") {
  CHECK(listen_window(config_at(0.1)) == doctest::Approx(480e-6).epsilon(1e-12));
  DutyCycleConfig c = config_at(0.1);
  c.gap = 0.0;
  CHECK(listen_window(c) == doctest::Approx(320e-6).epsilon(1e-12));
  c.link.wb_bits = 32;
  c.gap = c.beacon_time();
  CHECK(listen_window(c) == doctest::Approx(960e-6).epsilon(1e-12));
  CHECK(config_at(0.1).wake_period() == doctest::Approx(4.8e-3).epsilon(1e-12));
}

TEST_CASE("per-trial accounting") {
  const DutyCycleConfig c = config_at(0.1);
  const RendezvousTrial r = rendezvous_outcome(c, 2e-3);
  CHECK(r.extra_latency == doctest::Approx(2e-3 + kTwb));
  CHECK(r.beacon_airtime == doctest::Approx(0.5 * 2e-3 + kTwb));
  CHECK(r.ca == doctest::Approx(1.0 - (1.16e-3 + 0.5e-3) / 0.05));
  CHECK(r.power == doctest::Approx(0.1 * kPrx + kPtx * 1.16e-3 / 0.05 + 20e-6 * 0.01));
}

TEST_CASE("always-on receiver rendezvous within one beacon") {
  const DutyCycleReport r = simulate_rendezvous(config_at(1.0), 1000, 5);
  CHECK(r.extra_latency_max <= kTwb + 1e-15);
  CHECK(r.extra_latency_min == r.extra_latency_max);
  // Leaf receiver power is at its maximum n * P_Rx.
  CHECK(r.p_mean == doctest::Approx(mean_power_oracle(1.0, 0.05, kTwb)).epsilon(1e-12));
}

TEST_CASE("extra latency follows the uniform-phase oracle") {
  const DutyCycleReport r = simulate_rendezvous(config_at(0.1), 100000, 17);
  CHECK(r.extra_latency_max <= 4.8e-3 + kTwb);
  CHECK(r.extra_latency_max == doctest::Approx(4.96e-3).epsilon(0.01));
  const double expected_mean = 2.4e-3 + kTwb;
  CHECK(std::abs(r.extra_latency_mean - expected_mean) <= 3 * r.extra_latency_stderr);
  CHECK(r.extra_latency_stderr == doctest::Approx(4.8e-3 / std::sqrt(12.0 * 100000)).epsilon(0.02));

  const DutyCycleReport slow = simulate_rendezvous(config_at(0.01), 100000, 17);
  CHECK(slow.extra_latency_max <= 48e-3 + kTwb);
  CHECK(slow.extra_latency_max == doctest::Approx(48e-3 + kTwb).epsilon(0.01));
}

TEST_CASE("mean power matches the closed-form expectation") {
  for (double delta : {0.01, 0.05, 0.2}) {
    const DutyCycleReport r = simulate_rendezvous(config_at(delta), 100000, 3);
    CHECK(r.p_mean == doctest::Approx(mean_power_oracle(delta, 0.05, kTwb)).epsilon(0.01));
  }
}

TEST_CASE("power is U-shaped in the duty-cycle ratio") {
  std::vector<double> deltas;
  for (int i = 0; i <= 80; ++i) deltas.push_back(0.005 * std::pow(100.0, i / 80.0));
  const auto reports = sweep_delta(config_at(0.1), deltas, 10000, 42);
  const double d_star = optimal_delta(config_at(0.1));
  CHECK(d_star == doctest::Approx(std::sqrt(0.5 * 480e-6 * kPtx / (2 * 0.05 * kPrx))).epsilon(1e-12));
  CHECK(d_star < 0.10);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (deltas[i] <= d_star) CHECK(reports[i].p_mean < reports[i - 1].p_mean);
    if (deltas[i - 1] >= d_star) CHECK(reports[i].p_mean > reports[i - 1].p_mean);
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (reports[i].p_mean < reports[best].p_mean) best = i;
  CHECK(reports[best].delta < 0.10);
  CHECK(reports[best].delta == doctest::Approx(d_star).epsilon(0.08));

  // Without gaps the beacon train is on air continuously.
  DutyCycleConfig no_gap = config_at(0.1);
  no_gap.gap = 0.0;
  CHECK(optimal_delta(no_gap) == doctest::Approx(std::sqrt(320e-6 * kPtx / (2 * 0.05 * kPrx))).epsilon(1e-12));
}

TEST_CASE("mean extra latency grows as one over delta") {
  const auto reports = sweep_delta(config_at(0.1), {0.04, 0.02, 0.01, 0.005}, 20000, 8);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const double ratio = (reports[i].extra_latency_mean - kTwb) / (reports[i - 1].extra_latency_mean - kTwb);
    CHECK(ratio == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("reproducibility and error bars") {
  const DutyCycleReport a = simulate_rendezvous(config_at(0.07), 5000, 123);
  const DutyCycleReport b = simulate_rendezvous(config_at(0.07), 5000, 123);
  CHECK(a.p_mean == b.p_mean);
  CHECK(a.ca_min == b.ca_min);
  CHECK(a.extra_latency_max == b.extra_latency_max);
  CHECK(a.seed == 123);
  const DutyCycleReport c = simulate_rendezvous(config_at(0.07), 5000, 124);
  CHECK(c.p_mean != a.p_mean);

  for (double delta : {0.005, 0.1, 0.5, 0.99}) {
    const DutyCycleReport r = simulate_rendezvous(config_at(delta), 100, 9);
    CHECK(r.ca_min < r.ca_mean);
    CHECK(r.ca_mean < r.ca_max);
    CHECK(r.p_min < r.p_mean);
    CHECK(r.p_mean < r.p_max);
    CHECK(r.extra_latency_min < r.extra_latency_mean);
    CHECK(r.extra_latency_mean < r.extra_latency_max);
    CHECK(r.extra_latency_max <= listen_window(config_at(delta)) / delta + kTwb);
  }
}

TEST_CASE("missed detections add whole wake periods") {
  DutyCycleConfig c = config_at(0.1);
  c.retry_prob = 0.5;
  const DutyCycleReport r = simulate_rendezvous(c, 100000, 4);
  // Geometric retries: expected extra wait p / (1 - p) periods.
  CHECK(r.extra_latency_mean == doctest::Approx(2.4e-3 + 4.8e-3 + kTwb).epsilon(0.02));
}

TEST_CASE("several leaves") {
  DutyCycleConfig c = config_at(1.0);
  c.n_leaves = 3;
  const DutyCycleReport r = simulate_rendezvous(c, 10, 1);
  CHECK(r.p_mean == doctest::Approx(3 * kPrx + 3 * kPtx * kTwb / 0.05 + 3 * 20e-6 * 0.01 + 4 * 100e-9));
  CHECK(r.ca_mean == doctest::Approx(1.0 - 3 * (kTwb + 0.5e-3) / 0.05));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(simulate_rendezvous(config_at(0.1), 0, 1), ValidationError);
  CHECK_THROWS_AS(simulate_rendezvous(config_at(0.0), 10, 1), ValidationError);
  CHECK_THROWS_AS(simulate_rendezvous(config_at(1.5), 10, 1), ValidationError);
  CHECK_THROWS_AS(sweep_delta(config_at(0.1), {0.1, 2.0}, 10, 1), ValidationError);
  DutyCycleConfig c = config_at(0.1);
  c.gap = -1.0;
  CHECK_THROWS_AS(simulate_rendezvous(c, 10, 1), ValidationError);
}

}  // TEST_SUITE
