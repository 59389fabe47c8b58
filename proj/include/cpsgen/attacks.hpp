#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpsgen/errors.hpp"
#include "cpsgen/netsim.hpp"

namespace cpsgen::attacks {

enum class AttackKind { INTEGRITY_SCA, INTEGRITY_DM, STEALTHY, DOS, ZERO_DAY_VARIANT };
enum class InjectionPoint {
  SENSOR_TO_CONTROLLER,
  CONTROLLER_PARAM,
  ACTUATOR_CMD,
  SENSOR_TO_DM,
  DM_TO_ACTUATOR,
};
enum class AttackAction { DROP, REPLAY, MODIFY };
enum class WaveKind { STEP, PULSE, RAMP, STEALTH_RAMP };
enum class StepEffect { RECON, CREDENTIAL, PIVOT, PAYLOAD };
enum class EntryLayer { PHYSICAL, CONTROL, APPLICATION };
enum class EntryMethod { INTRUSION, REMOTE };

/// How tampered report streams feed the decision-making nodes. The first two
/// fabricate plausible values (freeze the last pre-attack report, or loop a
/// captured safe segment); OFFSET_WAVEFORM adds a waveform to the true value
/// and is how fake-unsafe reporting is produced.
enum class ReportPolicy { FREEZE_LAST_GOOD, SAFE_ENVELOPE_REPLAY, OFFSET_WAVEFORM };

const char* to_string(AttackKind k);
const char* to_string(InjectionPoint p);
const char* to_string(AttackAction a);
const char* to_string(WaveKind w);
const char* to_string(StepEffect e);
const char* to_string(EntryLayer l);
const char* to_string(EntryMethod m);
const char* to_string(ReportPolicy p);
AttackKind attack_kind_from_string(const std::string& s);
InjectionPoint injection_point_from_string(const std::string& s);
AttackAction attack_action_from_string(const std::string& s);
WaveKind wave_kind_from_string(const std::string& s);
StepEffect step_effect_from_string(const std::string& s);
EntryLayer entry_layer_from_string(const std::string& s);
EntryMethod entry_method_from_string(const std::string& s);
ReportPolicy report_policy_from_string(const std::string& s);

struct Waveform {
  WaveKind kind = WaveKind::STEP;
  double magnitude = 0.0;  // payload units; cap for ramps
  double duration = 0.0;   // min; 0 = whole attack window
  double rate = 0.0;       // units/min, ramps only
  double threshold = 0.0;  // detection bound, STEALTH_RAMP only
};

/// Injected payload offset at time t after the window opens. Outside
/// [0, duration] the contribution is zero.
double design_waveform(const Waveform& w, double t);

/// One hop of a multi-step attack vector. Consecutive steps chain through a
/// shared node; the final step is the PAYLOAD that arms the injection,
/// either on a compromised node (host flavor, leaves a log artifact) or at
/// the attacker's own on-path position (MITM flavor, leaves none).
struct AttackStep {
  double offset = 0.0;  // min, relative to the attack window start
  EntryLayer layer = EntryLayer::CONTROL;
  EntryMethod method = EntryMethod::REMOTE;
  netsim::NodeId from = netsim::NodeId::ATTACKER;
  netsim::NodeId to = netsim::NodeId::ATTACKER;
  StepEffect effect = StepEffect::PAYLOAD;
};

struct AttackSpec {
  int id = 0;
  AttackKind kind = AttackKind::INTEGRITY_SCA;
  InjectionPoint point = InjectionPoint::SENSOR_TO_CONTROLLER;
  AttackAction action = AttackAction::MODIFY;
  Waveform waveform;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<AttackStep> steps;
  std::vector<netsim::NodeId> dm_targets;  // stealthy / DM-stream scope
  double dos_rate = 0.0;                   // frames/min, DOS only
  bool zero_day = false;

  // Stealthy extras.
  ReportPolicy report_policy = ReportPolicy::FREEZE_LAST_GOOD;
  Waveform report_waveform;        // OFFSET_WAVEFORM payload
  bool true_manipulation = false;  // also tamper the control path via action/waveform

  bool log_wipe = false;  // attacker overwrites the target node's log window
};

/// Appends human-readable problems to `issues`; an empty result means the
/// spec satisfies every structural invariant.
void validate_attack_spec(const AttackSpec& spec, double scenario_duration,
                          double sample_period, std::vector<std::string>& issues);

/// Ring depth used by replay interceptors and safe-envelope reporting.
inline constexpr std::size_t kReplayDepth = 16;

/// MITM interceptor for the frame streams (sensor->controller,
/// controller->actuator, HMI->controller commands). Stateful: replay rings
/// record pre-window traffic through the observe hook.
netsim::Interceptor build_stream_interceptor(const AttackSpec& spec);

/// Tamper description for the controller->DM report streams. Transforms are
/// pure given the window context so the dataset's released values can be
/// derived from the same rule the frames obey; the engine snapshots the
/// frozen values and replay rings when the window opens.
///
/// The fabrication rules (freeze, envelope replay, drop) cover the whole
/// reported process picture: the measurement and the measured disturbance
/// ride the same falsifiable feed. The waveform rule only offsets the
/// measurement.
struct ReportStreamTamper {
  int attack_id = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double report_period = 0.0;
  std::vector<netsim::NodeId> targets;

  enum class Rule { DROP, MODIFY, REPLAY, FREEZE, ENVELOPE_REPLAY } rule = Rule::MODIFY;
  Waveform wave;

  bool armed = false;
  double frozen_value = 0.0;
  double frozen_disturbance = 0.0;
  std::vector<double> replay_ring;
  std::vector<double> replay_ring_d;

  bool applies_to(netsim::NodeId dm, double t) const;
  /// Value the targeted DM receives for a true report value `base` at time
  /// t; nullopt means the report is suppressed.
  std::optional<double> transform(double base, double t) const;
  /// Disturbance channel of the same feed.
  std::optional<double> transform_disturbance(double base, double t) const;
};

ReportStreamTamper build_report_tamper(const AttackSpec& spec,
                                       double report_period);

/// Behavioral fingerprint over a canonical 100-sample probe: two specs that
/// transform the probe stream identically at the same injection point are
/// duplicates, however their irrelevant attributes differ.
std::uint64_t fingerprint(const AttackSpec& spec, double sample_period);

struct AttackGrid {
  std::vector<AttackKind> kinds;
  std::vector<InjectionPoint> points;
  std::vector<AttackAction> actions;
  std::vector<WaveKind> waveforms;
  std::vector<double> magnitudes;
  double window_len = 1.0;
  double gap = 0.5;
  double start_after = 2.0;
  int limit = 8;
  int zero_day_count = 0;
  double ramp_rate = 0.5;
  double stealth_threshold = 0.01;
};

/// Deterministic coverage plan: enumerate the attribute grid, prune illegal
/// combinations and duplicate fingerprints, truncate round-robin across
/// kinds, and pack non-overlapping windows separated by normal-traffic
/// gaps. Zero-day picks use (point, action, waveform) combinations held out
/// of the rest of the plan and take the latest windows.
std::vector<AttackSpec> plan_attacks(const AttackGrid& grid, double duration,
                                     double sample_period, std::uint64_t seed);

}  // namespace cpsgen::attacks
