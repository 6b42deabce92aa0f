#include "pulsesync/timing.hpp"

#include <cmath>
#include <string>

#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace {

void require_elapsed(double t) {
  if (!(t >= 0.0)) throw ValidationError("elapsed time must be >= 0, got " + std::to_string(t));
}

}  // namespace

OscillatorSpec::OscillatorSpec(double f_osc_hz, double sigma_s, double drift_ppm, bool ideal_counter)
    : f_osc_(f_osc_hz), sigma_(sigma_s), drift_ppm_(drift_ppm), ideal_counter_(ideal_counter) {
  if (!(f_osc_hz > 0.0) || !std::isfinite(f_osc_hz))
    throw ValidationError("oscillator frequency must be > 0");
  if (!(sigma_s >= 0.0) || !std::isfinite(sigma_s))
    throw ValidationError("oscillator jitter sigma must be >= 0");
  if (!(drift_ppm >= 0.0) || !std::isfinite(drift_ppm))
    throw ValidationError("oscillator drift must be >= 0 ppm");
}

BodyChannel::BodyChannel(double distance_m, double v_hb_mps) : distance_(distance_m), v_hb_(v_hb_mps) {
  if (!(distance_m >= 0.0) || !std::isfinite(distance_m))
    throw ValidationError("node distance must be >= 0");
  if (!(v_hb_mps > 0.0) || !std::isfinite(v_hb_mps))
    throw ValidationError("heartbeat propagation speed must be > 0");
}

double heartbeat_skew(const BodyChannel& channel) { return channel.distance() / channel.v_hb(); }

double counter_quantization(const OscillatorSpec& osc) {
  return osc.ideal_counter() ? 0.0 : 1.0 / osc.f_osc();
}

double drift_inaccuracy(const OscillatorSpec& osc, double t) {
  require_elapsed(t);
  return osc.drift_ratio() * t;
}

double jitter_inaccuracy(const OscillatorSpec& osc, double t) {
  require_elapsed(t);
  return 4.0 * std::sqrt(osc.f_osc() * t) * osc.sigma();
}

MarginBreakdown sync_margin(const OscillatorSpec& osc, const BodyChannel& channel, double t) {
  require_elapsed(t);
  MarginBreakdown m;
  m.t_hb = heartbeat_skew(channel);
  m.dt_counter = counter_quantization(osc);
  m.dt_drift = drift_inaccuracy(osc, t);
  m.dt_jitter = jitter_inaccuracy(osc, t);
  m.m_s = m.t_hb + 2.0 * (m.dt_counter + m.dt_drift + m.dt_jitter);
  return m;
}

}  // namespace pulsesync
