#pragma once

#include <optional>
#include <string>

#include "cpsgen/errors.hpp"

namespace cpsgen::control {

enum class ControlMode { AUTO, MANUAL };

const char* to_string(ControlMode m);

/// Regulatory PI controller plus the hard safety trip level. A PI law (no
/// derivative term) keeps predictions exactly replayable from logged data.
struct ControllerConfig {
  double setpoint = 0.4625;      // mol/m^3
  double kp_gain = 2.0;          // (m^3/min) / (mol/m^3)
  double ki_gain = 4.0;          // (m^3/min) / (mol/m^3 * min)
  double u_bias = 1.0;           // m^3/min, output at zero error
  double u_min = 0.0;            // m^3/min
  double u_max = 5.0;            // m^3/min
  double sample_period = 0.1;    // min
  double haz_threshold = 0.9;    // mol/m^3, safety trip level

  void validate() const;
};

struct ControllerState {
  ControlMode mode = ControlMode::AUTO;
  double integral_accum = 0.0;  // accumulated error * time
  double last_u = 0.0;          // m^3/min, last emitted output
  double last_y = 0.0;          // last measurement seen by the controller
  bool tripped = false;         // latched safety trip
};

struct PiResult {
  double u = 0.0;
  ControllerState st;
};

/// One PI sample:
///   u = clamp(u_bias + kp*e + ki*integral, u_min, u_max),  e = setpoint - y.
/// Anti-windup: the integral is only advanced when the unclamped output
/// stays within the actuator limits. Throws ModeError outside AUTO or when
/// tripped.
PiResult pi_update(double y, const ControllerConfig& cfg,
                   const ControllerState& st);

struct TripResult {
  bool tripped = false;
  ControllerState st;
};

/// Latching safety check: strictly above haz_threshold trips the controller
/// and forces the output to zero until the scenario ends.
TripResult safety_check(double y, const ControllerConfig& cfg,
                        const ControllerState& st);

/// Pure replay of pi_update for trace checking: returns exactly the output
/// pi_update would emit for (y, cfg, st) without mutating anything. Throws
/// ModeError for samples taken outside AUTO.
double predict_action(double y, const ControllerConfig& cfg,
                      const ControllerState& st);

/// Switches AUTO/MANUAL. Entering MANUAL installs manual_u (validated
/// against the actuator limits) as the held output. Returning to AUTO
/// re-seeds the integral by inverting the PI law at the current error so the
/// first AUTO output equals the held output (bumpless transfer).
ControllerState set_control_mode(const ControllerState& st, ControlMode mode,
                                 std::optional<double> manual_u,
                                 const ControllerConfig& cfg);

}  // namespace cpsgen::control
