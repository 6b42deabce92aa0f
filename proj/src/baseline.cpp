#include "pulsesync/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pulsesync/errors.hpp"
#include "pulsesync/rng.hpp"

namespace pulsesync {

void DutyCycleConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("duty-cycle ratio must be in (0, 1]");
  if (gap && !(*gap >= 0.0)) throw ValidationError("inter-beacon gap must be >= 0");
  if (!(t_lat > 0.0)) throw ValidationError("data-ready interval must be > 0");
  if (n_leaves < 0) throw ValidationError("leaf count must be >= 0");
  if (!(retry_prob >= 0.0 && retry_prob < 1.0)) throw ValidationError("retry probability must be in [0, 1)");
  link.validate();
  power.validate();
}

double DutyCycleConfig::wake_period() const { return listen_window(*this) / delta; }

double listen_window(const DutyCycleConfig& config) { return 2.0 * config.beacon_time() + config.gap_time(); }

RendezvousTrial rendezvous_outcome(const DutyCycleConfig& c, double wait) {
  const double t_wb = c.beacon_time();
  const double data_tx = c.link.data_gen * c.t_lat / c.link.data_rate;
  const double p_tx = c.power.p_tx(c.link);
  const double p_rx = c.power.p_rx(c.link);

  RendezvousTrial r;
  r.extra_latency = wait + t_wb;
  r.beacon_airtime = c.beacon_duty() * wait + t_wb;
  r.ca = 1.0 - (r.beacon_airtime + data_tx) / c.t_lat;
  r.power = c.delta * p_rx + p_tx * (r.beacon_airtime / c.t_lat) + (p_tx + p_rx) * (data_tx / c.t_lat);
  return r;
}

namespace {

struct Range {
  double sum = 0.0;
  double sum_sq = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  // Clamped so that rounding in the sum never pushes the mean outside [lo, hi].
  double mean(std::uint64_t n) const { return std::clamp(sum / static_cast<double>(n), lo, hi); }
};

// Rendezvous wait of one leaf for one data-ready event.
double draw_wait(const DutyCycleConfig& c, std::mt19937_64& rng) {
  if (c.always_on()) return 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double period = c.wake_period();
  double wait = unit(rng) * period;
  if (c.retry_prob > 0.0)
    while (unit(rng) < c.retry_prob) wait += period;
  return wait;
}

}  // namespace

DutyCycleReport simulate_rendezvous(const DutyCycleConfig& config, std::uint64_t trials, std::uint64_t seed) {
  config.validate();
  if (trials == 0) throw ValidationError("baseline needs at least one trial");

  const double fixed_power = (config.n_leaves + 1.0) * config.power.p_timer;
  Range ca, power, latency;
  for (std::uint64_t k = 0; k < trials; ++k) {
    // Sub-seed depends on (seed, trial) only, so every delta sees the same
    // uniform draws.
    std::mt19937_64 rng(sub_seed(seed, k));
    double trial_ca = 1.0;
    double trial_power = fixed_power;
    double worst_latency = 0.0;
    for (int leaf = 0; leaf < config.n_leaves; ++leaf) {
      const RendezvousTrial r = rendezvous_outcome(config, draw_wait(config, rng));
      trial_ca -= 1.0 - r.ca;
      trial_power += r.power;
      worst_latency = std::max(worst_latency, r.extra_latency);
    }
    ca.add(std::max(trial_ca, 0.0));
    power.add(trial_power);
    latency.add(worst_latency);
  }

  DutyCycleReport rep;
  rep.delta = config.delta;
  rep.trials = trials;
  rep.seed = seed;
  rep.ca_mean = ca.mean(trials);
  rep.ca_min = ca.lo;
  rep.ca_max = ca.hi;
  rep.p_mean = power.mean(trials);
  rep.p_min = power.lo;
  rep.p_max = power.hi;
  rep.extra_latency_mean = latency.mean(trials);
  rep.extra_latency_min = latency.lo;
  rep.extra_latency_max = latency.hi;
  if (trials > 1) {
    const double n = static_cast<double>(trials);
    const double var = std::max(0.0, (latency.sum_sq - latency.sum * latency.sum / n) / (n - 1.0));
    rep.extra_latency_stderr = std::sqrt(var / n);
  }
  return rep;
}

std::vector<DutyCycleReport> sweep_delta(const DutyCycleConfig& config_template, const std::vector<double>& deltas,
                                         std::uint64_t trials, std::uint64_t seed) {
  for (double d : deltas)
    if (!(d > 0.0 && d <= 1.0)) throw ValidationError("duty-cycle ratios must be in (0, 1]");
  std::vector<DutyCycleReport> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    DutyCycleConfig c = config_template;
    c.delta = d;
    out.push_back(simulate_rendezvous(c, trials, seed));
  }
  return out;
}

double optimal_delta(const DutyCycleConfig& c) {
  c.validate();
  const double p_rx = c.power.p_rx(c.link);
  const double p_tx = c.power.p_tx(c.link);
  if (p_rx <= 0.0) return 1.0;
  // Mean power: delta * P_Rx + P_Tx * rho * (W / (2 delta)) / t_lat + const.
  const double d = std::sqrt(c.beacon_duty() * listen_window(c) * p_tx / (2.0 * c.t_lat * p_rx));
  return std::min(d, 1.0);
}

}  // namespace pulsesync
