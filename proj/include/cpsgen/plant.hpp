#pragma once

#include <string>

#include "cpsgen/errors.hpp"
#include "cpsgen/rng.hpp"

namespace cpsgen::plant {

/// Discrete operating mode of the hybrid automaton. F1 is catalyst decay
/// (parametric: effective rate constant scaled by kappa < 1), F2 is inlet
/// valve stiction (structural: flow frozen at its last value), F12 is both.
enum class SystemMode { NORMAL, F1, F2, F12 };

const char* to_string(SystemMode m);
SystemMode mode_from_string(const std::string& s);

/// First-order CSTR with the inlet concentration as measurable disturbance.
/// The static gain and time constant follow from the mass balance:
///   gain = F / (F + V*k),  tau = V / (F + V*k).
struct PlantParams {
  double inlet_flow = 1.0;  // F, m^3/min (nominal)
  double volume = 1.0;      // V, m^3
  double rate_const = 1.0;  // k, 1/min
  double noise_std = 0.0;   // sensor noise sigma, mol/m^3
  double dt = 1e-3;         // integration step, min

  double process_gain() const {
    return inlet_flow / (inlet_flow + volume * rate_const);
  }
  double time_constant() const {
    return volume / (inlet_flow + volume * rate_const);
  }

  /// Throws ConfigError if any invariant (F>0, V>0, k>=0, dt>0, noise>=0)
  /// fails.
  void validate() const;
};

struct PlantState {
  double t = 0.0;            // min
  double outlet_conc = 0.0;  // mol/m^3
  double inlet_conc = 0.0;   // disturbance, mol/m^3
  SystemMode mode = SystemMode::NORMAL;
  double rate_scale = 1.0;    // catalyst effectiveness, < 1 under F1/F12
  double applied_flow = 0.0;  // flow entering the tank; frozen under F2/F12
};

/// State at the exact model fixed point for the given disturbance.
PlantState steady_state(const PlantParams& p, double inlet_conc);

enum class FaultKind { F1_CAUSES, F2_CAUSES, F1_AND_F2_CAUSES };

const char* to_string(FaultKind k);
FaultKind fault_kind_from_string(const std::string& s);

struct FaultEvent {
  double at = 0.0;  // min
  FaultKind kind = FaultKind::F1_CAUSES;
  double kappa = 0.5;  // rate scale installed by F1, in (0,1)
};

/// Advances the state by one step of params.dt using classical RK4 on
///   d(conc)/dt = (F_eff/V) * (inlet_conc - conc) - k_eff * conc
/// where F_eff tracks the flow command except under stiction and
/// k_eff = k * rate_scale. Rejects non-finite inputs with NumericError.
PlantState integrate_step(const PlantState& s, double flow_cmd,
                          const PlantParams& p);

/// Deviation of the outlet concentration t_since_step minutes after a step
/// of delta_inlet_conc in the disturbance, starting from steady state:
///   gain * delta * (1 - exp(-t/tau)).
double analytic_response(const PlantParams& p, double delta_inlet_conc,
                         double t_since_step);

/// Inverts the step response to recover the disturbance from observed
/// concentrations. Throws NumericError when t_since_step <= 0 (the
/// (1 - exp(-t/tau)) factor vanishes).
double estimate_disturbance(double conc_now, double conc_init,
                            double inlet_conc_init, double t_since_step,
                            const PlantParams& p);

/// Applies a scheduled fault, enforcing the legal transition edges:
/// NORMAL->F1, NORMAL->F2, NORMAL->F12, F1->F12, F2->F12. Anything else
/// (including repeats and self-repair) throws TransitionError.
PlantState apply_fault_event(const PlantState& s, const FaultEvent& e);

/// Sensor reading: outlet concentration plus Gaussian noise from the
/// scenario's dedicated stream, clamped at zero.
double measure(const PlantState& s, const PlantParams& p, rng::Stream& noise);

}  // namespace cpsgen::plant
