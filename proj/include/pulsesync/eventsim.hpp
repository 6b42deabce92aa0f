#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pulsesync/analytic.hpp"

namespace pulsesync {

struct ClockReading {
  double raw = 0.0;        // drifted + jittered local elapsed time
  double quantized = 0.0;  // raw floored to whole oscillator periods
  double jitter = 0.0;     // accumulated jitter sample included in raw
};

// Free-running timer of one node, reset on every heartbeat detection. Jitter
// accumulates as a random walk between queries since the last reset.
class NodeClock {
 public:
  NodeClock(int id, const OscillatorSpec& osc, double realized_drift_ppm, std::uint64_t seed);

  int id() const { return id_; }
  const OscillatorSpec& osc() const { return osc_; }
  double realized_drift_ppm() const { return realized_drift_ppm_; }
  double last_reset() const { return last_reset_; }
  double skew() const { return skew_; }

  void reset(double true_time, double skew);

  // Local reading after nominal_elapsed seconds of true time since the last
  // reset. Queries since a reset must be non-decreasing.
  ClockReading advance(double nominal_elapsed);

  // True time at which the counter reaches the nominal target.
  double fire_time(double nominal_elapsed);

 private:
  int id_;
  OscillatorSpec osc_;
  double realized_drift_ppm_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double last_reset_ = 0.0;
  double skew_ = 0.0;
  double accumulated_ = 0.0;
  long long cycles_ = 0;
  double last_elapsed_ = 0.0;
};

enum class EventKind { heartbeat, timer_tick, tx_start, tx_end, rx_open, rx_close, hit, miss };

std::string_view event_kind_name(EventKind kind);
EventKind parse_event_kind(std::string_view name);

struct SimEvent {
  EventKind kind = EventKind::heartbeat;
  double true_time = 0.0;
  int node = 0;  // hub = 0, leaves 1..n; puncture events carry the owning leaf
  std::int64_t superframe = 0;
  int puncture = -1;  // 1..N_p, 0 = leaf listening window, -1 = none

  bool operator==(const SimEvent&) const = default;
};

struct SimTrace {
  std::vector<SimEvent> events;
  std::vector<double> periods;  // realized superframe durations

  double total_time() const;
  void write(std::ostream& out) const;
  std::string to_string() const;
  static SimTrace read(std::istream& in);
};

struct EmpiricalMetrics {
  std::uint64_t punctures_total = 0;
  std::uint64_t punctures_hit = 0;
  double hit_rate = 1.0;
  double ca_empirical = 1.0;
  double p_empirical = 0.0;
  double mean_rx_wait = 0.0;
  // Raw accumulations behind the ratios.
  double total_time = 0.0;
  double tx_time = 0.0;
  double rx_time = 0.0;
  double occupied_time = 0.0;
  double energy = 0.0;

  bool operator==(const EmpiricalMetrics&) const = default;
};

struct SimOptions {
  std::uint64_t n_superframes = 1000;
  std::uint64_t seed = 1;
  // Heart-rate model: per-superframe period uniform in [t_min, t_max]. Unset
  // means the fixed scenario superframe.
  std::optional<double> t_min;
  std::optional<double> t_max;
};

struct SimResult {
  SimTrace trace;
  EmpiricalMetrics metrics;
};

SimResult run_simulation(const Scenario& scenario, const SimOptions& options);
SimResult run_simulation(const Scenario& scenario, std::uint64_t n_superframes, std::uint64_t seed);

EmpiricalMetrics empirical_metrics(const SimTrace& trace, const Scenario& scenario);

}  // namespace pulsesync
