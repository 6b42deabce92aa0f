#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pulsesync/analytic.hpp"

namespace pulsesync {

// Unsynchronized duty-cycled wake-up receiver network used as the comparison
// point. Leaves wake at a random phase of their own wake cycle, listen for
// two beacons plus one gap, and rendezvous with a hub that keeps beaconing
// from the moment data is ready.
struct DutyCycleConfig {
  double delta = 0.1;         // fraction of time a leaf listens, (0, 1]
  std::optional<double> gap;  // inter-beacon gap, s; defaults to one beacon time
  LinkSpec link;
  PowerSpec power;
  double t_lat = 0.05;  // data-ready interval, s
  int n_leaves = 1;
  // Probability that a leaf misses a beacon it should have caught. Each miss
  // costs one more wake period.
  double retry_prob = 0.0;

  void validate() const;

  double beacon_time() const { return link.wb_bits / link.data_rate; }
  double gap_time() const { return gap.value_or(beacon_time()); }
  double wake_period() const;
  // Fraction of the beacon train that is actually on air.
  double beacon_duty() const { return beacon_time() / (beacon_time() + gap_time()); }
  bool always_on() const { return delta >= 1.0; }
};

struct DutyCycleReport {
  double delta = 0.0;
  double ca_mean = 0.0, ca_min = 0.0, ca_max = 0.0;
  double p_mean = 0.0, p_min = 0.0, p_max = 0.0;
  double extra_latency_mean = 0.0, extra_latency_min = 0.0, extra_latency_max = 0.0;
  double extra_latency_stderr = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

double listen_window(const DutyCycleConfig& config);

// Outcome of one data-ready event.
struct RendezvousTrial {
  double extra_latency = 0.0;
  double beacon_airtime = 0.0;
  double ca = 0.0;
  double power = 0.0;
};

// Per-trial model for a given rendezvous wait (time from data-ready to the
// leaf's listening window). Exposed so tests can check the accounting.
RendezvousTrial rendezvous_outcome(const DutyCycleConfig& config, double wait);

DutyCycleReport simulate_rendezvous(const DutyCycleConfig& config, std::uint64_t trials, std::uint64_t seed);

std::vector<DutyCycleReport> sweep_delta(const DutyCycleConfig& config_template, const std::vector<double>& deltas,
                                         std::uint64_t trials, std::uint64_t seed);

// Analytic minimizer of the mean system power over delta (no retries).
double optimal_delta(const DutyCycleConfig& config);

}  // namespace pulsesync
