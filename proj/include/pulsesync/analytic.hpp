#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pulsesync/timing.hpp"

namespace pulsesync {

struct LinkSpec {
  double data_rate = 100e3;  // D_R, b/s
  double data_gen = 1e3;     // D_gen per leaf, b/s
  double wb_bits = 16;       // wake-up beacon length, bits

  void validate() const;
};

struct PowerSpec {
  double p_hbd = 100e-9;    // W
  double p_timer = 100e-9;  // W
  double e_tx = 100e-12;    // J/b
  double e_rx = 100e-12;    // J/b

  void validate() const;
  double p_tx(const LinkSpec& link) const { return link.data_rate * e_tx; }
  double p_rx(const LinkSpec& link) const { return link.data_rate * e_rx; }
};

// Per-leaf deviations from the homogeneous defaults held by the scenario.
struct LeafOverride {
  std::optional<double> distance_m;
  std::optional<double> latency_s;
  std::optional<double> data_gen_bps;
};

// Effective parameters of one leaf, after overrides are applied.
struct LeafProfile {
  BodyChannel channel;
  double latency;
  double data_gen;
};

struct Scenario {
  int n_leaves = 1;
  OscillatorSpec osc{10e3, 1e-6, 500.0};
  BodyChannel channel{0.15};
  LinkSpec link;
  PowerSpec power;
  double superframe = 0.8;  // T, s (75 bpm)
  double latency = 0.05;    // upload interval t_lat, s
  std::vector<LeafOverride> leaves;  // optional, indexed by leaf (0-based)

  // Once-per-superframe leaf listening window, excluded from power by default.
  bool include_listen_window = false;
  double listen_window = 1e-3;

  void validate() const;
  LeafProfile leaf(int index) const;
};

struct PunctureSchedule {
  int n_p = 0;
  std::vector<double> instants;  // t_j = j * t_lat, j = 1..n_p
  double tx_per_puncture = 0.0;
  double tx_total = 0.0;
};

struct MetricsReport {
  double ca_ideal = 1.0;
  double ca_real = 1.0;
  double p_ideal = 0.0;
  double p_real = 0.0;
  double m_tot = 0.0;   // summed over leaves
  double t_wait = 0.0;  // summed over leaves, = 2 * m_tot
  double latency = 0.0;
  // Sum of t_w_i / T. The availability loss and the power penalty are both
  // derived from this one value.
  double wait_fraction = 0.0;
  int n_p = 0;  // punctures per superframe of the first leaf
  bool saturated = false;
};

// Schedule of one leaf (the first one unless told otherwise).
PunctureSchedule build_schedule(const Scenario& scenario, int leaf_index = 0);
// Same rules, explicit inputs.
PunctureSchedule build_schedule(double superframe, double latency, double data_gen, double data_rate);

double total_margin(const PunctureSchedule& schedule, const OscillatorSpec& osc, const BodyChannel& channel);
double wait_time(const PunctureSchedule& schedule, const OscillatorSpec& osc, const BodyChannel& channel);

double ca_ideal(const Scenario& scenario);
// Throws ModelError when the waits exceed the superframe.
double ca_real(const Scenario& scenario);
double p_ideal(const Scenario& scenario);
double p_real(const Scenario& scenario);

// Never throws on saturation: clamps ca_real to 0 and sets the flag.
MetricsReport evaluate(const Scenario& scenario);

struct InaccuracyPoint {
  double f_osc = 0.0;
  double dt_counter = 0.0;
  double dt_drift = 0.0;
  double dt_jitter = 0.0;
  double total = 0.0;
};

// Single-clock timer inaccuracy at elapsed time t for each frequency, keeping
// sigma and drift of the template.
std::vector<InaccuracyPoint> inaccuracy_vs_fosc(const OscillatorSpec& osc_template, double t,
                                                const std::vector<double>& f_grid);

enum class SweepAxis { superframe, latency, n_leaves, distance, f_osc, drift_ppm, sigma };

SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

// Copy of the scenario with one parameter replaced. Throws ValidationError for
// values the axis does not accept.
Scenario with_axis_value(const Scenario& scenario, SweepAxis axis, double value);

std::vector<MetricsReport> sweep(const Scenario& scenario_template, SweepAxis axis,
                                 const std::vector<double>& values);

}  // namespace pulsesync
