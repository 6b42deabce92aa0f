#pragma once

// Per-node timing inaccuracy models. All durations are seconds.

namespace pulsesync {

class OscillatorSpec {
 public:
  // ideal_counter forces the counter-quantization term to zero; only used to
  // build a perfectly ideal timer surrogate.
  OscillatorSpec(double f_osc_hz, double sigma_s, double drift_ppm, bool ideal_counter = false);

  double f_osc() const { return f_osc_; }
  double sigma() const { return sigma_; }
  double drift_ppm() const { return drift_ppm_; }
  double drift_ratio() const { return drift_ppm_ * 1e-6; }
  double period() const { return 1.0 / f_osc_; }
  bool ideal_counter() const { return ideal_counter_; }

 private:
  double f_osc_;
  double sigma_;
  double drift_ppm_;
  bool ideal_counter_;
};

class BodyChannel {
 public:
  static constexpr double kDefaultSpeed = 250.0;  // m/s, lower bound on cardiac signal speed

  explicit BodyChannel(double distance_m, double v_hb_mps = kDefaultSpeed);

  double distance() const { return distance_; }
  double v_hb() const { return v_hb_; }

 private:
  double distance_;
  double v_hb_;
};

struct MarginBreakdown {
  double t_hb = 0.0;
  double dt_counter = 0.0;
  double dt_drift = 0.0;
  double dt_jitter = 0.0;
  double m_s = 0.0;

  // Sum of the per-clock terms, i.e. one node's timer inaccuracy.
  double timer_inaccuracy() const { return dt_counter + dt_drift + dt_jitter; }
};

// Worst-case propagation delay of the heartbeat between two nodes.
double heartbeat_skew(const BodyChannel& channel);

// Residual uncertainty after a one-time offset calibration: one period.
double counter_quantization(const OscillatorSpec& osc);

double drift_inaccuracy(const OscillatorSpec& osc, double t);

// 4-sigma window on the jitter accumulated over N = f_osc * t cycles.
double jitter_inaccuracy(const OscillatorSpec& osc, double t);

// Rx/Tx synchronization margin for one puncture at elapsed time t since the
// last heartbeat: t_hb + 2 * (counter + drift + jitter).
MarginBreakdown sync_margin(const OscillatorSpec& osc, const BodyChannel& channel, double t);

}  // namespace pulsesync
