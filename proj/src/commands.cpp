#include "pulsesync/commands.hpp"

#include <algorithm>
#include <cmath>

#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace {

const std::vector<std::string> kMetricColumns{
    "n_p",         "m_tot_s",  "t_wait_s",          "ca_ideal",       "ca_real",     "p_ideal_w",
    "p_real_w",    "latency_s", "extra_latency_s",  "dt_counter_s",   "dt_drift_s",  "dt_jitter_s",
    "timer_inaccuracy_s",       "saturated"};

std::vector<double> metric_row(const Scenario& s, const MetricsReport& r) {
  // Single-clock inaccuracy at the end of the superframe (the oscillator
  // trade-off curve).
  const MarginBreakdown m = sync_margin(s.osc, s.channel, s.superframe);
  return {static_cast<double>(r.n_p), r.m_tot, r.t_wait, r.ca_ideal, r.ca_real, r.p_ideal, r.p_real, r.latency,
          0.0, m.dt_counter, m.dt_drift, m.dt_jitter, m.timer_inaccuracy(), r.saturated ? 1.0 : 0.0};
}

ResultTable table_for(const ScenarioConfig& c, std::vector<std::string> columns) {
  ResultTable t;
  t.columns = std::move(columns);
  t.provenance = {{"tool", kToolVersion}, {"seed", std::to_string(c.sim.seed)}, {"scenario", c.hash()}};
  return t;
}

}  // namespace

std::vector<double> make_grid(const RangeSpec& r) {
  if (r.points < 1) throw ValidationError("--points must be >= 1");
  if (!std::isfinite(r.from) || !std::isfinite(r.to)) throw ValidationError("range bounds must be finite");
  if (r.log && !(r.from > 0.0 && r.to > 0.0)) throw ValidationError("log range needs positive bounds");
  if (r.points == 1) return {r.from};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r.points));
  const double n = r.points - 1;
  for (int i = 0; i < r.points; ++i) {
    double v;
    if (r.log)
      v = std::exp(std::log(r.from) + (std::log(r.to) - std::log(r.from)) * (i / n));
    else
      v = r.from + (r.to - r.from) * (i / n);
    if (i == 0) v = r.from;
    if (i == r.points - 1) v = r.to;
    out.push_back(v);
  }
  return out;
}

ResultTable cmd_analyze(const ScenarioConfig& config) {
  ResultTable t = table_for(config, kMetricColumns);
  t.add_row(metric_row(config.scenario, evaluate(config.scenario)));
  return t;
}

ResultTable cmd_sweep(const ScenarioConfig& config, SweepAxis axis, const RangeSpec& range) {
  std::vector<std::string> columns{std::string(axis_name(axis))};
  columns.insert(columns.end(), kMetricColumns.begin(), kMetricColumns.end());
  ResultTable t = table_for(config, columns);
  const std::vector<double> values = make_grid(range);
  const std::vector<MetricsReport> reports = sweep(config.scenario, axis, values);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<double> row{values[i]};
    const auto metrics = metric_row(with_axis_value(config.scenario, axis, values[i]), reports[i]);
    row.insert(row.end(), metrics.begin(), metrics.end());
    t.add_row(std::move(row));
  }
  return t;
}

SimulateOutput cmd_simulate(const ScenarioConfig& config) {
  SimResult run = run_simulation(config.scenario, config.sim_options());
  const MetricsReport analytic = evaluate(config.scenario);
  ResultTable t = table_for(config, {"superframes", "punctures_total", "punctures_hit", "hit_rate", "ca_empirical",
                                     "p_empirical_w", "mean_rx_wait_s", "ca_ideal", "ca_real", "p_ideal_w",
                                     "p_real_w"});
  const EmpiricalMetrics& m = run.metrics;
  t.add_row({static_cast<double>(config.sim.superframes), static_cast<double>(m.punctures_total),
             static_cast<double>(m.punctures_hit), m.hit_rate, m.ca_empirical, m.p_empirical, m.mean_rx_wait,
             analytic.ca_ideal, analytic.ca_real, analytic.p_ideal, analytic.p_real});
  return {std::move(t), std::move(run.trace)};
}

ResultTable cmd_baseline(const ScenarioConfig& config, const std::optional<RangeSpec>& deltas) {
  const std::vector<double> grid = deltas ? make_grid(*deltas) : std::vector<double>{config.baseline.delta};
  const auto reports = sweep_delta(config.duty_cycle(), grid, config.baseline.trials, config.sim.seed);
  ResultTable t = table_for(config, {"delta", "ca_mean", "ca_min", "ca_max", "p_mean_w", "p_min_w", "p_max_w",
                                     "extra_latency_mean_s", "extra_latency_min_s", "extra_latency_max_s",
                                     "trials"});
  for (const auto& r : reports)
    t.add_row({r.delta, r.ca_mean, r.ca_min, r.ca_max, r.p_mean, r.p_min, r.p_max, r.extra_latency_mean,
               r.extra_latency_min, r.extra_latency_max, static_cast<double>(r.trials)});
  return t;
}

RangeSpec default_compare_deltas() { return RangeSpec{0.005, 0.5, 60, true}; }

ResultTable cmd_compare(const ScenarioConfig& config, const std::optional<RangeSpec>& deltas) {
  // Heartbeat side: worst P_real over the heart-period range.
  const auto [t_lo, t_hi] = config.period_range();
  const std::vector<double> periods = make_grid(RangeSpec{t_lo, t_hi, t_lo == t_hi ? 1 : 21, false});
  MetricsReport worst;
  double worst_ca = 1.0;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const MetricsReport r = evaluate(with_axis_value(config.scenario, SweepAxis::superframe, periods[i]));
    if (i == 0 || r.p_real > worst.p_real) worst = r;
    worst_ca = std::min(worst_ca, r.ca_real);
  }

  const std::vector<double> grid = make_grid(deltas.value_or(default_compare_deltas()));
  const auto reports = sweep_delta(config.duty_cycle(), grid, config.baseline.trials, config.sim.seed);
  const auto best = std::min_element(reports.begin(), reports.end(),
                                     [](const DutyCycleReport& a, const DutyCycleReport& b) { return a.p_mean < b.p_mean; });

  ResultTable t = table_for(config, {"latency_s", "p_hb_real_w", "ca_hb_real", "extra_latency_hb_s", "delta_opt",
                                     "p_dc_min_w", "ca_dc_at_opt", "extra_latency_dc_mean_s",
                                     "extra_latency_dc_max_s", "saving"});
  t.add_row({config.scenario.latency, worst.p_real, worst_ca, 0.0, best->delta, best->p_mean, best->ca_mean,
             best->extra_latency_mean, best->extra_latency_max, 1.0 - worst.p_real / best->p_mean});
  return t;
}

PlotSpec default_plot(const std::string& command, const ResultTable& table) {
  PlotSpec p;
  if (command == "baseline") {
    p.x = "delta";
    p.y = {"p_mean_w"};
    p.err_lo = "p_min_w";
    p.err_hi = "p_max_w";
    p.log_x = true;
    p.title = "Duty-cycled baseline: system power";
    return p;
  }
  if (command == "sweep") {
    p.x = table.columns.front();
    if (p.x == "f_osc") {
      p.y = {"timer_inaccuracy_s", "dt_counter_s", "dt_drift_s", "dt_jitter_s"};
      p.log_x = true;
      p.log_y = true;
      p.title = "Timer inaccuracy vs oscillator frequency";
    } else {
      p.y = {"ca_real", "ca_ideal"};
      p.title = "Channel availability vs " + p.x;
    }
    return p;
  }
  if (command == "compare") {
    p.x = "latency_s";
    p.y = {"p_hb_real_w", "p_dc_min_w"};
    p.title = "Heartbeat vs duty-cycled power";
    return p;
  }
  if (command == "simulate") {
    p.x = "superframes";
    p.y = {"ca_empirical", "ca_real", "ca_ideal"};
    p.title = "Empirical vs analytic availability";
    return p;
  }
  p.x = "latency_s";
  p.y = {"ca_real", "ca_ideal"};
  p.title = "Channel availability";
  return p;
}

}  // namespace pulsesync
