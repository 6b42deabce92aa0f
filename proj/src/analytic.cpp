#include "pulsesync/analytic.hpp"

#include <array>
#include <cmath>
#include <string>

#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace {

// Tolerance on T / t_lat so that e.g. 0.6 / 0.2 counts three punctures.
constexpr double kCountSlack = 1e-9;

struct Totals {
  double tx_fraction = 0.0;    // sum_i T_Tx_i / T
  double wait_fraction = 0.0;  // sum_i t_w_i / T
  double m_tot = 0.0;
  int n_p_first = 0;
};

Totals accumulate(const Scenario& s) {
  s.validate();
  Totals totals;
  double tx_sum = 0.0;
  double wait_sum = 0.0;
  for (int i = 0; i < s.n_leaves; ++i) {
    const LeafProfile leaf = s.leaf(i);
    const PunctureSchedule schedule = build_schedule(s.superframe, leaf.latency, leaf.data_gen, s.link.data_rate);
    if (i == 0) totals.n_p_first = schedule.n_p;
    const double margin = total_margin(schedule, s.osc, leaf.channel);
    tx_sum += schedule.tx_total;
    totals.m_tot += margin;
    wait_sum += 2.0 * margin;
  }
  if (tx_sum > s.superframe)
    throw ModelError("channel oversubscribed: leaves transmit " + std::to_string(tx_sum) + " s per " +
                     std::to_string(s.superframe) + " s superframe");
  totals.tx_fraction = tx_sum / s.superframe;
  totals.wait_fraction = wait_sum / s.superframe;
  return totals;
}

double ideal_power(const Scenario& s, const Totals& totals) {
  const double nodes = static_cast<double>(s.n_leaves) + 1.0;
  double p = nodes * (s.power.p_hbd + s.power.p_timer) +
             (s.power.p_tx(s.link) + s.power.p_rx(s.link)) * totals.tx_fraction;
  if (s.include_listen_window)
    p += static_cast<double>(s.n_leaves) * s.power.p_rx(s.link) * (s.listen_window / s.superframe);
  return p;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void LinkSpec::validate() const {
  require(data_rate > 0.0 && std::isfinite(data_rate), "link data rate must be > 0");
  require(data_gen >= 0.0 && data_gen <= data_rate, "link data generation rate must be in [0, data rate]");
  require(wb_bits >= 1.0, "wake-up beacon length must be >= 1 bit");
}

void PowerSpec::validate() const {
  require(p_hbd >= 0.0, "heartbeat detector power must be >= 0");
  require(p_timer >= 0.0, "timer power must be >= 0");
  require(e_tx >= 0.0, "Tx energy per bit must be >= 0");
  require(e_rx >= 0.0, "Rx energy per bit must be >= 0");
}

void Scenario::validate() const {
  require(n_leaves >= 0, "leaf count must be >= 0");
  require(superframe > 0.0 && std::isfinite(superframe), "superframe period must be > 0");
  require(latency > 0.0 && latency <= superframe, "latency must be in (0, superframe]");
  require(leaves.size() <= static_cast<std::size_t>(n_leaves), "more leaf overrides than leaves");
  require(listen_window >= 0.0 && listen_window <= superframe, "listen window must be in [0, superframe]");
  link.validate();
  power.validate();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto& o = leaves[i];
    const std::string where = "leaf " + std::to_string(i) + ": ";
    if (o.latency_s) require(*o.latency_s > 0.0 && *o.latency_s <= superframe, where + "latency must be in (0, superframe]");
    if (o.data_gen_bps)
      require(*o.data_gen_bps >= 0.0 && *o.data_gen_bps <= link.data_rate, where + "data generation rate out of range");
    if (o.distance_m) require(*o.distance_m >= 0.0, where + "distance must be >= 0");
  }
}

LeafProfile Scenario::leaf(int index) const {
  if (index < 0 || index >= n_leaves) throw ValidationError("leaf index out of range");
  LeafProfile p{channel, latency, link.data_gen};
  if (static_cast<std::size_t>(index) < leaves.size()) {
    const auto& o = leaves[static_cast<std::size_t>(index)];
    if (o.distance_m) p.channel = BodyChannel(*o.distance_m, channel.v_hb());
    if (o.latency_s) p.latency = *o.latency_s;
    if (o.data_gen_bps) p.data_gen = *o.data_gen_bps;
  }
  return p;
}

PunctureSchedule build_schedule(double superframe, double latency, double data_gen, double data_rate) {
  require(superframe > 0.0 && latency > 0.0 && data_rate > 0.0, "schedule needs positive period, latency and rate");
  const double count = std::floor(superframe / latency + kCountSlack);
  if (count < 1.0)
    throw ValidationError("no puncture fits: latency " + std::to_string(latency) + " s exceeds superframe " +
                          std::to_string(superframe) + " s");
  PunctureSchedule s;
  s.n_p = static_cast<int>(count);
  s.instants.reserve(static_cast<std::size_t>(s.n_p));
  for (int j = 1; j <= s.n_p; ++j) s.instants.push_back(j * latency);
  s.tx_per_puncture = data_gen * latency / data_rate;
  s.tx_total = s.n_p * s.tx_per_puncture;
  return s;
}

PunctureSchedule build_schedule(const Scenario& scenario, int leaf_index) {
  scenario.validate();
  const LeafProfile leaf = scenario.leaf(leaf_index);
  return build_schedule(scenario.superframe, leaf.latency, leaf.data_gen, scenario.link.data_rate);
}

double total_margin(const PunctureSchedule& schedule, const OscillatorSpec& osc, const BodyChannel& channel) {
  double sum = 0.0;
  for (double t : schedule.instants) sum += sync_margin(osc, channel, t).m_s;
  return sum;
}

double wait_time(const PunctureSchedule& schedule, const OscillatorSpec& osc, const BodyChannel& channel) {
  return 2.0 * total_margin(schedule, osc, channel);
}

double ca_ideal(const Scenario& scenario) { return 1.0 - accumulate(scenario).tx_fraction; }

double ca_real(const Scenario& scenario) {
  const Totals totals = accumulate(scenario);
  const double ca = (1.0 - totals.tx_fraction) - totals.wait_fraction;
  if (ca < 0.0)
    throw ModelError("channel availability saturated: synchronization waits exceed the superframe");
  return ca;
}

double p_ideal(const Scenario& scenario) { return ideal_power(scenario, accumulate(scenario)); }

double p_real(const Scenario& scenario) {
  const Totals totals = accumulate(scenario);
  return ideal_power(scenario, totals) + scenario.power.p_rx(scenario.link) * totals.wait_fraction;
}

MetricsReport evaluate(const Scenario& scenario) {
  const Totals totals = accumulate(scenario);
  MetricsReport r;
  r.ca_ideal = 1.0 - totals.tx_fraction;
  r.ca_real = r.ca_ideal - totals.wait_fraction;
  if (r.ca_real < 0.0) {
    r.ca_real = 0.0;
    r.saturated = true;
  }
  r.p_ideal = ideal_power(scenario, totals);
  r.p_real = r.p_ideal + scenario.power.p_rx(scenario.link) * totals.wait_fraction;
  r.m_tot = totals.m_tot;
  r.t_wait = 2.0 * totals.m_tot;
  r.latency = scenario.latency;
  r.wait_fraction = totals.wait_fraction;
  r.n_p = totals.n_p_first;
  return r;
}

std::vector<InaccuracyPoint> inaccuracy_vs_fosc(const OscillatorSpec& osc_template, double t,
                                                const std::vector<double>& f_grid) {
  require(!f_grid.empty(), "frequency grid must not be empty");
  std::vector<InaccuracyPoint> curve;
  curve.reserve(f_grid.size());
  for (double f : f_grid) {
    require(f > 0.0, "frequency grid values must be > 0");
    const OscillatorSpec osc(f, osc_template.sigma(), osc_template.drift_ppm(), osc_template.ideal_counter());
    InaccuracyPoint p;
    p.f_osc = f;
    p.dt_counter = counter_quantization(osc);
    p.dt_drift = drift_inaccuracy(osc, t);
    p.dt_jitter = jitter_inaccuracy(osc, t);
    p.total = p.dt_counter + p.dt_drift + p.dt_jitter;
    curve.push_back(p);
  }
  return curve;
}

namespace {

constexpr std::array<std::pair<SweepAxis, std::string_view>, 7> kAxisNames{{
    {SweepAxis::superframe, "superframe"},
    {SweepAxis::latency, "latency"},
    {SweepAxis::n_leaves, "n_leaves"},
    {SweepAxis::distance, "distance"},
    {SweepAxis::f_osc, "f_osc"},
    {SweepAxis::drift_ppm, "drift_ppm"},
    {SweepAxis::sigma, "sigma"},
}};

}  // namespace

SweepAxis parse_axis(std::string_view name) {
  for (const auto& [axis, label] : kAxisNames)
    if (label == name) return axis;
  throw ValidationError("unknown sweep axis '" + std::string(name) +
                        "' (expected superframe, latency, n_leaves, distance, f_osc, drift_ppm or sigma)");
}

std::string_view axis_name(SweepAxis axis) {
  for (const auto& [a, label] : kAxisNames)
    if (a == axis) return label;
  return "?";
}

Scenario with_axis_value(const Scenario& scenario, SweepAxis axis, double value) {
  Scenario s = scenario;
  const OscillatorSpec& o = scenario.osc;
  switch (axis) {
    case SweepAxis::superframe: s.superframe = value; break;
    case SweepAxis::latency: s.latency = value; break;
    case SweepAxis::n_leaves:
      require(value >= 0.0 && std::floor(value) == value, "n_leaves sweep values must be non-negative integers");
      s.n_leaves = static_cast<int>(value);
      if (s.leaves.size() > static_cast<std::size_t>(s.n_leaves)) s.leaves.resize(static_cast<std::size_t>(s.n_leaves));
      break;
    case SweepAxis::distance: s.channel = BodyChannel(value, scenario.channel.v_hb()); break;
    case SweepAxis::f_osc: s.osc = OscillatorSpec(value, o.sigma(), o.drift_ppm(), o.ideal_counter()); break;
    case SweepAxis::drift_ppm: s.osc = OscillatorSpec(o.f_osc(), o.sigma(), value, o.ideal_counter()); break;
    case SweepAxis::sigma: s.osc = OscillatorSpec(o.f_osc(), value, o.drift_ppm(), o.ideal_counter()); break;
  }
  s.validate();
  return s;
}

std::vector<MetricsReport> sweep(const Scenario& scenario_template, SweepAxis axis, const std::vector<double>& values) {
  std::vector<Scenario> points;
  points.reserve(values.size());
  for (double v : values) points.push_back(with_axis_value(scenario_template, axis, v));
  std::vector<MetricsReport> out;
  out.reserve(points.size());
  for (const auto& s : points) out.push_back(evaluate(s));
  return out;
}

}  // namespace pulsesync
