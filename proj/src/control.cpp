#include "cpsgen/control.hpp"

#include <algorithm>
#include <cmath>

namespace cpsgen::control {

const char* to_string(ControlMode m) {
  return m == ControlMode::AUTO ? "AUTO" : "MANUAL";
}

void ControllerConfig::validate() const {
  if (!(u_min < u_max)) throw ConfigError("controller: u_min must be < u_max");
  if (!(sample_period > 0.0)) {
    throw ConfigError("controller: sample_period must be > 0");
  }
  if (!(haz_threshold > setpoint)) {
    throw ConfigError("controller: haz_threshold must exceed the setpoint");
  }
}

PiResult pi_update(double y, const ControllerConfig& cfg,
                   const ControllerState& st) {
  if (st.mode != ControlMode::AUTO) {
    throw ModeError("pi_update called in MANUAL mode");
  }
  if (st.tripped) {
    throw ModeError("pi_update called on a tripped controller");
  }
  if (!std::isfinite(y)) throw NumericError("pi_update: non-finite input");

  const double e = cfg.setpoint - y;
  const double integral_next = st.integral_accum + e * cfg.sample_period;
  const double u_unclamped =
      cfg.u_bias + cfg.kp_gain * e + cfg.ki_gain * integral_next;

  PiResult r;
  r.st = st;
  r.st.last_y = y;
  if (u_unclamped > cfg.u_max) {
    r.u = cfg.u_max;
  } else if (u_unclamped < cfg.u_min) {
    r.u = cfg.u_min;
  } else {
    r.u = u_unclamped;
    r.st.integral_accum = integral_next;
  }
  r.st.last_u = r.u;
  return r;
}

TripResult safety_check(double y, const ControllerConfig& cfg,
                        const ControllerState& st) {
  TripResult r;
  r.st = st;
  r.st.last_y = y;
  if (st.tripped || y > cfg.haz_threshold) {
    r.tripped = true;
    r.st.tripped = true;
    r.st.last_u = 0.0;
  }
  return r;
}

double predict_action(double y, const ControllerConfig& cfg,
                      const ControllerState& st) {
  return pi_update(y, cfg, st).u;
}

ControllerState set_control_mode(const ControllerState& st, ControlMode mode,
                                 std::optional<double> manual_u,
                                 const ControllerConfig& cfg) {
  ControllerState out = st;
  if (mode == ControlMode::MANUAL) {
    out.mode = ControlMode::MANUAL;
    if (manual_u) {
      if (*manual_u < cfg.u_min || *manual_u > cfg.u_max) {
        throw RangeError("manual output outside actuator limits");
      }
      if (!out.tripped) out.last_u = *manual_u;
    }
    return out;
  }

  out.mode = ControlMode::AUTO;
  if (cfg.ki_gain != 0.0) {
    // Invert the PI law at the current error, accounting for the integral
    // increment the first AUTO sample will add, so that pi_update(last_y)
    // reproduces last_u exactly.
    const double e = cfg.setpoint - st.last_y;
    out.integral_accum =
        (st.last_u - cfg.u_bias - cfg.kp_gain * e) / cfg.ki_gain -
        e * cfg.sample_period;
  }
  return out;
}

}  // namespace cpsgen::control
