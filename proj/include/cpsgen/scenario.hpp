#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpsgen/attacks.hpp"
#include "cpsgen/control.hpp"
#include "cpsgen/netsim.hpp"
#include "cpsgen/plant.hpp"

namespace cpsgen::scenario {

struct DisturbanceEvent {
  double at = 0.0;
  double value = 0.0;  // new inlet concentration
};

enum class IrregularKind { OPERATOR_MANUAL_POLL, MODE_SWITCH_TRAFFIC, SAFETY_TRIP_BCAST };
const char* to_string(IrregularKind k);
IrregularKind irregular_kind_from_string(const std::string& s);

struct IrregularEvent {
  double at = 0.0;
  IrregularKind kind = IrregularKind::OPERATOR_MANUAL_POLL;
  control::ControlMode mode = control::ControlMode::MANUAL;  // MODE_SWITCH_TRAFFIC
  std::optional<double> manual_u;
};

/// The three initiators of the same operator command pattern: a real
/// operator, an attacker on a compromised HMI, and an attacker spoofing the
/// HMI address from the network. Network traffic is identical across the
/// three; only the host log separates them.
enum class SessionVariant { LEGIT, COMPROMISED_HMI, SPOOFED };
const char* to_string(SessionVariant v);
SessionVariant session_variant_from_string(const std::string& s);

struct SessionConfig {
  std::string operator_id = "op1";
  double login = 0.0;
  double logout = 0.0;
  double mode_switch_at = 0.0;  // MANUAL switch + manual command instant
  double manual_u = 0.0;
  double auto_return_at = -1.0;  // < 0: stay in MANUAL until scenario end
  SessionVariant variant = SessionVariant::LEGIT;
  int attack_id = 0;  // required for non-LEGIT variants
};

/// Behavior of the actuator when an expected command write never arrives
/// (dropped in flight or starved).
enum class Failsafe { LAST_KNOWN_GOOD, FAIL_CLOSED };
const char* to_string(Failsafe f);
Failsafe failsafe_from_string(const std::string& s);

/// Decision-making layer above the regulatory controller: the HMI watches
/// the reported measurement and issues a remote trip when it crosses the
/// alarm level. The communication capacity bounds how many frames per
/// minute the controller's reporting service survives under flooding.
struct SupervisionConfig {
  bool enabled = true;
  double alarm_threshold = 0.85;  // mol/m^3, below the hard trip level
  Failsafe failsafe = Failsafe::LAST_KNOWN_GOOD;
  double dos_capacity = 600.0;  // frames/min
};

struct SplitPolicy {
  double train_fraction = 0.7;
};

struct ScenarioConfig {
  double duration = 10.0;  // min
  std::uint64_t seed = 1;
  double init_inlet_conc = 0.925;  // mol/m^3

  plant::PlantParams plant_params;
  control::ControllerConfig controller;
  netsim::TrafficSchedule traffic;
  SupervisionConfig supervision;
  SplitPolicy split;

  std::vector<DisturbanceEvent> disturbances;
  std::vector<plant::FaultEvent> faults;
  std::vector<SessionConfig> sessions;
  std::vector<IrregularEvent> irregulars;
  std::vector<attacks::AttackSpec> attack_specs;
  std::optional<attacks::AttackGrid> attack_plan;

  ScenarioConfig() { plant_params.noise_std = 0.002; }

  /// Returns every violated invariant; empty when the scenario is runnable.
  std::vector<std::string> validate() const;
  /// Throws ConfigError carrying all issues at once.
  void validate_or_throw() const;
};

/// Parses the TOML-like scenario format. All parse and semantic problems are
/// collected and reported together in the ConfigError message, each with the
/// offending file:line or key path.
ScenarioConfig parse_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin);

/// Canonical serialization; parse_scenario_text(emit_scenario_text(c)) is
/// equivalent to c. Doubles are printed losslessly.
std::string emit_scenario_text(const ScenarioConfig& cfg);

/// Attack-vector steps are written as
///   "EFFECT LAYER METHOD FROM>TO [offset]".
attacks::AttackStep parse_vector_step(const std::string& s);
std::string format_vector_step(const attacks::AttackStep& st);

}  // namespace cpsgen::scenario
