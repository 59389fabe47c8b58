#include "cpsgen/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "cpsgen/rng.hpp"

namespace cpsgen::attacks {

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::INTEGRITY_SCA: return "INTEGRITY_SCA";
    case AttackKind::INTEGRITY_DM: return "INTEGRITY_DM";
    case AttackKind::STEALTHY: return "STEALTHY";
    case AttackKind::DOS: return "DOS";
    case AttackKind::ZERO_DAY_VARIANT: return "ZERO_DAY_VARIANT";
  }
  return "?";
}

const char* to_string(InjectionPoint p) {
  switch (p) {
    case InjectionPoint::SENSOR_TO_CONTROLLER: return "SENSOR_TO_CONTROLLER";
    case InjectionPoint::CONTROLLER_PARAM: return "CONTROLLER_PARAM";
    case InjectionPoint::ACTUATOR_CMD: return "ACTUATOR_CMD";
    case InjectionPoint::SENSOR_TO_DM: return "SENSOR_TO_DM";
    case InjectionPoint::DM_TO_ACTUATOR: return "DM_TO_ACTUATOR";
  }
  return "?";
}

const char* to_string(AttackAction a) {
  switch (a) {
    case AttackAction::DROP: return "DROP";
    case AttackAction::REPLAY: return "REPLAY";
    case AttackAction::MODIFY: return "MODIFY";
  }
  return "?";
}

const char* to_string(WaveKind w) {
  switch (w) {
    case WaveKind::STEP: return "STEP";
    case WaveKind::PULSE: return "PULSE";
    case WaveKind::RAMP: return "RAMP";
    case WaveKind::STEALTH_RAMP: return "STEALTH_RAMP";
  }
  return "?";
}

const char* to_string(StepEffect e) {
  switch (e) {
    case StepEffect::RECON: return "RECON";
    case StepEffect::CREDENTIAL: return "CREDENTIAL";
    case StepEffect::PIVOT: return "PIVOT";
    case StepEffect::PAYLOAD: return "PAYLOAD";
  }
  return "?";
}

const char* to_string(EntryLayer l) {
  switch (l) {
    case EntryLayer::PHYSICAL: return "PHYSICAL";
    case EntryLayer::CONTROL: return "CONTROL";
    case EntryLayer::APPLICATION: return "APPLICATION";
  }
  return "?";
}

const char* to_string(EntryMethod m) {
  return m == EntryMethod::INTRUSION ? "INTRUSION" : "REMOTE";
}

const char* to_string(ReportPolicy p) {
  switch (p) {
    case ReportPolicy::FREEZE_LAST_GOOD: return "FREEZE_LAST_GOOD";
    case ReportPolicy::SAFE_ENVELOPE_REPLAY: return "SAFE_ENVELOPE_REPLAY";
    case ReportPolicy::OFFSET_WAVEFORM: return "OFFSET_WAVEFORM";
  }
  return "?";
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "INTEGRITY_SCA") return AttackKind::INTEGRITY_SCA;
  if (s == "INTEGRITY_DM") return AttackKind::INTEGRITY_DM;
  if (s == "STEALTHY") return AttackKind::STEALTHY;
  if (s == "DOS") return AttackKind::DOS;
  if (s == "ZERO_DAY_VARIANT") return AttackKind::ZERO_DAY_VARIANT;
  throw ConfigError("unknown attack kind: " + s);
}

InjectionPoint injection_point_from_string(const std::string& s) {
  if (s == "SENSOR_TO_CONTROLLER") return InjectionPoint::SENSOR_TO_CONTROLLER;
  if (s == "CONTROLLER_PARAM") return InjectionPoint::CONTROLLER_PARAM;
  if (s == "ACTUATOR_CMD") return InjectionPoint::ACTUATOR_CMD;
  if (s == "SENSOR_TO_DM") return InjectionPoint::SENSOR_TO_DM;
  if (s == "DM_TO_ACTUATOR") return InjectionPoint::DM_TO_ACTUATOR;
  throw ConfigError("unknown injection point: " + s);
}

AttackAction attack_action_from_string(const std::string& s) {
  if (s == "DROP") return AttackAction::DROP;
  if (s == "REPLAY") return AttackAction::REPLAY;
  if (s == "MODIFY") return AttackAction::MODIFY;
  throw ConfigError("unknown attack action: " + s);
}

WaveKind wave_kind_from_string(const std::string& s) {
  if (s == "STEP") return WaveKind::STEP;
  if (s == "PULSE") return WaveKind::PULSE;
  if (s == "RAMP") return WaveKind::RAMP;
  if (s == "STEALTH_RAMP") return WaveKind::STEALTH_RAMP;
  throw ConfigError("unknown waveform kind: " + s);
}

StepEffect step_effect_from_string(const std::string& s) {
  if (s == "RECON") return StepEffect::RECON;
  if (s == "CREDENTIAL") return StepEffect::CREDENTIAL;
  if (s == "PIVOT") return StepEffect::PIVOT;
  if (s == "PAYLOAD") return StepEffect::PAYLOAD;
  throw ConfigError("unknown attack step effect: " + s);
}

EntryLayer entry_layer_from_string(const std::string& s) {
  if (s == "PHYSICAL") return EntryLayer::PHYSICAL;
  if (s == "CONTROL") return EntryLayer::CONTROL;
  if (s == "APPLICATION") return EntryLayer::APPLICATION;
  throw ConfigError("unknown entry layer: " + s);
}

EntryMethod entry_method_from_string(const std::string& s) {
  if (s == "INTRUSION") return EntryMethod::INTRUSION;
  if (s == "REMOTE") return EntryMethod::REMOTE;
  throw ConfigError("unknown entry method: " + s);
}

ReportPolicy report_policy_from_string(const std::string& s) {
  if (s == "FREEZE_LAST_GOOD") return ReportPolicy::FREEZE_LAST_GOOD;
  if (s == "SAFE_ENVELOPE_REPLAY") return ReportPolicy::SAFE_ENVELOPE_REPLAY;
  if (s == "OFFSET_WAVEFORM") return ReportPolicy::OFFSET_WAVEFORM;
  throw ConfigError("unknown report policy: " + s);
}

double design_waveform(const Waveform& w, double t) {
  if (t < 0.0 || (w.duration > 0.0 && t > w.duration)) return 0.0;
  switch (w.kind) {
    case WaveKind::STEP:
      return w.magnitude;
    case WaveKind::PULSE:
      return w.magnitude;  // duration bound applied above
    case WaveKind::RAMP: {
      double v = w.rate * t;
      if (w.magnitude > 0.0) v = std::min(v, w.magnitude);
      if (w.magnitude < 0.0) v = std::max(-w.rate * t, w.magnitude);
      return w.magnitude < 0.0 ? std::max(-w.rate * t, w.magnitude) : v;
    }
    case WaveKind::STEALTH_RAMP: {
      double v = w.rate * t;
      if (w.magnitude > 0.0) v = std::min(v, w.magnitude);
      return v;
    }
  }
  return 0.0;
}

namespace {

bool is_stream_point(InjectionPoint p) {
  return p == InjectionPoint::SENSOR_TO_CONTROLLER ||
         p == InjectionPoint::ACTUATOR_CMD ||
         p == InjectionPoint::DM_TO_ACTUATOR;
}

bool point_legal_for_kind(AttackKind kind, InjectionPoint point) {
  switch (kind) {
    case AttackKind::INTEGRITY_SCA:
    case AttackKind::ZERO_DAY_VARIANT:
      return point == InjectionPoint::SENSOR_TO_CONTROLLER ||
             point == InjectionPoint::CONTROLLER_PARAM ||
             point == InjectionPoint::ACTUATOR_CMD;
    case AttackKind::INTEGRITY_DM:
      return point == InjectionPoint::SENSOR_TO_DM ||
             point == InjectionPoint::DM_TO_ACTUATOR;
    case AttackKind::STEALTHY:
      return point == InjectionPoint::SENSOR_TO_CONTROLLER ||
             point == InjectionPoint::ACTUATOR_CMD;
    case AttackKind::DOS:
      return true;  // target is the controller regardless
  }
  return false;
}

std::set<netsim::NodeId> terminal_nodes(InjectionPoint p) {
  using N = netsim::NodeId;
  switch (p) {
    case InjectionPoint::SENSOR_TO_CONTROLLER: return {N::SENSOR, N::CONTROLLER};
    case InjectionPoint::CONTROLLER_PARAM: return {N::CONTROLLER};
    case InjectionPoint::ACTUATOR_CMD: return {N::CONTROLLER, N::ACTUATOR};
    case InjectionPoint::SENSOR_TO_DM: return {N::CONTROLLER, N::HMI, N::LOGSERVER};
    case InjectionPoint::DM_TO_ACTUATOR: return {N::HMI, N::CONTROLLER};
  }
  return {};
}

bool matches_stream(InjectionPoint p, const netsim::Frame& f) {
  using netsim::NodeId;
  switch (p) {
    case InjectionPoint::SENSOR_TO_CONTROLLER:
      return f.src == NodeId::SENSOR && f.dst == NodeId::CONTROLLER &&
             f.addr == netsim::kRegSensorConc;
    case InjectionPoint::ACTUATOR_CMD:
      return f.src == NodeId::CONTROLLER && f.dst == NodeId::ACTUATOR &&
             f.addr == netsim::kRegActuatorFlow;
    case InjectionPoint::DM_TO_ACTUATOR:
      return f.src == NodeId::HMI && f.dst == NodeId::CONTROLLER &&
             (f.addr == netsim::kRegMode || f.addr == netsim::kRegManualFlow);
    default:
      return false;
  }
}

}  // namespace

void validate_attack_spec(const AttackSpec& spec, double scenario_duration,
                          double sample_period,
                          std::vector<std::string>& issues) {
  const std::string tag = "attack " + std::to_string(spec.id) + ": ";
  if (spec.id <= 0) issues.push_back(tag + "id must be a positive integer");
  if (!(spec.t_start >= 0.0) || !(spec.t_end <= scenario_duration) ||
      !(spec.t_end > spec.t_start)) {
    issues.push_back(tag + "window must lie inside the scenario");
  }
  if (!point_legal_for_kind(spec.kind, spec.point)) {
    issues.push_back(tag + std::string("injection point ") +
                     to_string(spec.point) + " is inconsistent with kind " +
                     to_string(spec.kind));
  }
  if (spec.kind == AttackKind::STEALTHY && spec.dm_targets.empty()) {
    issues.push_back(tag + "stealthy attacks need at least one DM target");
  }
  if (spec.kind == AttackKind::DOS && !(spec.dos_rate > 0.0)) {
    issues.push_back(tag + "dos_rate must be > 0");
  }
  for (netsim::NodeId dm : spec.dm_targets) {
    if (dm != netsim::NodeId::HMI && dm != netsim::NodeId::LOGSERVER) {
      issues.push_back(tag + "dm_targets must be HMI or LOGSERVER nodes");
    }
  }

  const double window_len = spec.t_end - spec.t_start;
  const auto check_wave = [&](const Waveform& w, const char* which) {
    if (w.duration > window_len + 1e-12) {
      issues.push_back(tag + std::string(which) +
                       " duration exceeds the attack window");
    }
    if (w.kind == WaveKind::STEALTH_RAMP) {
      if (!(w.threshold > 0.0)) {
        issues.push_back(tag + std::string(which) +
                         " stealth ramp needs a positive threshold");
      } else if (!(w.rate * sample_period < w.threshold)) {
        issues.push_back(tag + std::string(which) +
                         " stealth ramp per-sample increment must stay below "
                         "the threshold");
      }
    }
    if ((w.kind == WaveKind::RAMP || w.kind == WaveKind::STEALTH_RAMP) &&
        w.rate == 0.0) {
      issues.push_back(tag + std::string(which) + " ramp needs a nonzero rate");
    }
  };
  if (spec.kind != AttackKind::DOS &&
      (spec.action == AttackAction::MODIFY || spec.true_manipulation)) {
    check_wave(spec.waveform, "waveform");
  }
  if (spec.kind == AttackKind::STEALTHY &&
      spec.report_policy == ReportPolicy::OFFSET_WAVEFORM) {
    check_wave(spec.report_waveform, "report waveform");
  }

  if (spec.steps.empty()) {
    issues.push_back(tag + "attack vector must not be empty");
    return;
  }
  for (std::size_t i = 0; i + 1 < spec.steps.size(); ++i) {
    if (spec.steps[i].to != spec.steps[i + 1].from) {
      issues.push_back(tag + "broken pivot chain at step " +
                       std::to_string(i + 1));
    }
    if (spec.steps[i].effect == StepEffect::PAYLOAD) {
      issues.push_back(tag + "PAYLOAD must be the final step");
    }
    if (spec.steps[i].offset > spec.steps[i + 1].offset) {
      issues.push_back(tag + "step offsets must be non-decreasing");
    }
  }
  const AttackStep& last = spec.steps.back();
  if (last.effect != StepEffect::PAYLOAD) {
    issues.push_back(tag + "final vector step must be the PAYLOAD");
  }
  if (spec.kind != AttackKind::DOS) {
    auto terminals = terminal_nodes(spec.point);
    if (last.to != netsim::NodeId::ATTACKER && !terminals.count(last.to)) {
      issues.push_back(tag +
                       "PAYLOAD node does not own the injection point (and is "
                       "not an on-path attacker position)");
    }
  }
  for (const AttackStep& st : spec.steps) {
    if (spec.t_start + st.offset < -1e-12) {
      issues.push_back(tag + "vector step scheduled before the scenario start");
    }
    if (st.effect == StepEffect::RECON &&
        !netsim::legal_edge(st.from, st.to, netsim::Proto::REPORTPROTO) &&
        !netsim::legal_edge(st.from, st.to, netsim::Proto::POLLPROTO)) {
      issues.push_back(tag + "RECON step crosses a non-existent topology edge");
    }
  }
}

netsim::Interceptor build_stream_interceptor(const AttackSpec& spec) {
  if (!is_stream_point(spec.point)) {
    throw ConfigError("no frame stream at injection point " +
                      std::string(to_string(spec.point)));
  }
  netsim::Interceptor ic;
  ic.attack_id = spec.id;
  ic.window_begin = spec.t_start;
  ic.window_end = spec.t_end;
  const InjectionPoint point = spec.point;
  ic.matches = [point](const netsim::Frame& f) {
    return matches_stream(point, f);
  };

  const int id = spec.id;
  switch (spec.action) {
    case AttackAction::DROP:
      ic.act = [](const netsim::Frame&, double) {
        return netsim::Outcome{netsim::Disposition::DROPPED, {}, 0.0};
      };
      break;
    case AttackAction::MODIFY: {
      const Waveform w = spec.waveform;
      const double t0 = spec.t_start;
      ic.act = [w, t0, id](const netsim::Frame& f, double now) {
        netsim::Frame out = f;
        out.value += design_waveform(w, now - t0);
        out.attack_id = id;
        return netsim::Outcome{netsim::Disposition::DELIVERED, out, 0.0};
      };
      break;
    }
    case AttackAction::REPLAY: {
      // Ring of pre-window values on the link, looped for the duration of
      // the window. The delivered frame keeps its own (fresh) txn.
      auto ring = std::make_shared<std::deque<double>>();
      auto cursor = std::make_shared<std::size_t>(0);
      ic.observe = [ring](const netsim::Frame& f) {
        ring->push_back(f.value);
        if (ring->size() > kReplayDepth) ring->pop_front();
      };
      ic.act = [ring, cursor, id](const netsim::Frame& f, double) {
        netsim::Frame out = f;
        if (!ring->empty()) {
          out.value = (*ring)[*cursor % ring->size()];
          ++*cursor;
        }
        out.attack_id = id;
        return netsim::Outcome{netsim::Disposition::DELIVERED, out, 0.0};
      };
      break;
    }
  }
  return ic;
}

bool ReportStreamTamper::applies_to(netsim::NodeId dm, double t) const {
  if (t < t_start - netsim::kTimeEps || t > t_end + netsim::kTimeEps) {
    return false;
  }
  return std::find(targets.begin(), targets.end(), dm) != targets.end();
}

std::optional<double> ReportStreamTamper::transform(double base,
                                                    double t) const {
  switch (rule) {
    case Rule::DROP:
      return std::nullopt;
    case Rule::MODIFY:
      return base + design_waveform(wave, t - t_start);
    case Rule::FREEZE:
      return frozen_value;
    case Rule::REPLAY:
    case Rule::ENVELOPE_REPLAY: {
      if (replay_ring.empty()) return base;
      const auto idx = static_cast<std::size_t>(
          std::floor((t - t_start) / report_period + 1e-9));
      return replay_ring[idx % replay_ring.size()];
    }
  }
  return base;
}

std::optional<double> ReportStreamTamper::transform_disturbance(
    double base, double t) const {
  switch (rule) {
    case Rule::DROP:
      return std::nullopt;
    case Rule::MODIFY:
      return base;  // the waveform targets the measurement only
    case Rule::FREEZE:
      return frozen_disturbance;
    case Rule::REPLAY:
    case Rule::ENVELOPE_REPLAY: {
      if (replay_ring_d.empty()) return base;
      const auto idx = static_cast<std::size_t>(
          std::floor((t - t_start) / report_period + 1e-9));
      return replay_ring_d[idx % replay_ring_d.size()];
    }
  }
  return base;
}

ReportStreamTamper build_report_tamper(const AttackSpec& spec,
                                       double report_period) {
  ReportStreamTamper rt;
  rt.attack_id = spec.id;
  rt.t_start = spec.t_start;
  rt.t_end = spec.t_end;
  rt.report_period = report_period;
  rt.targets = spec.dm_targets;
  if (rt.targets.empty()) rt.targets = {netsim::NodeId::HMI};

  if (spec.kind == AttackKind::STEALTHY) {
    switch (spec.report_policy) {
      case ReportPolicy::FREEZE_LAST_GOOD:
        rt.rule = ReportStreamTamper::Rule::FREEZE;
        break;
      case ReportPolicy::SAFE_ENVELOPE_REPLAY:
        rt.rule = ReportStreamTamper::Rule::ENVELOPE_REPLAY;
        break;
      case ReportPolicy::OFFSET_WAVEFORM:
        rt.rule = ReportStreamTamper::Rule::MODIFY;
        rt.wave = spec.report_waveform;
        break;
    }
    return rt;
  }

  switch (spec.action) {
    case AttackAction::DROP: rt.rule = ReportStreamTamper::Rule::DROP; break;
    case AttackAction::REPLAY: rt.rule = ReportStreamTamper::Rule::REPLAY; break;
    case AttackAction::MODIFY:
      rt.rule = ReportStreamTamper::Rule::MODIFY;
      rt.wave = spec.waveform;
      break;
  }
  return rt;
}

std::uint64_t fingerprint(const AttackSpec& spec, double sample_period) {
  // Canonical probe: 100 samples on a gently drifting baseline, plus a
  // synthetic pre-window ring for replay semantics.
  std::uint64_t h = rng::fnv1a64(to_string(spec.point));
  const bool report_side = spec.point == InjectionPoint::SENSOR_TO_DM;
  if (report_side || spec.kind == AttackKind::STEALTHY) {
    for (netsim::NodeId dm :
         spec.dm_targets.empty()
             ? std::vector<netsim::NodeId>{netsim::NodeId::HMI}
             : spec.dm_targets) {
      h = rng::fnv1a64(netsim::to_string(dm), h);
    }
  }
  if (spec.kind == AttackKind::DOS) {
    h = rng::fnv1a64("dos", h);
    h = rng::fnv1a64_bytes(&spec.dos_rate, sizeof(double), h);
    return h;
  }

  std::vector<double> ring;
  for (std::size_t i = 0; i < kReplayDepth; ++i) {
    ring.push_back(0.4 + 0.001 * static_cast<double>(i));
  }
  std::size_t cursor = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = static_cast<double>(i) * sample_period;
    const double base = 0.5 + 0.002 * static_cast<double>(i);
    double out = base;
    bool delivered = true;
    switch (spec.action) {
      case AttackAction::DROP:
        delivered = false;
        break;
      case AttackAction::MODIFY:
        out = base + design_waveform(spec.waveform, t);
        break;
      case AttackAction::REPLAY:
        out = ring[cursor % ring.size()];
        ++cursor;
        break;
    }
    unsigned char d = delivered ? 1 : 0;
    h = rng::fnv1a64_bytes(&d, 1, h);
    if (delivered) h = rng::fnv1a64_bytes(&out, sizeof(double), h);
  }
  if (spec.kind == AttackKind::STEALTHY) {
    h = rng::fnv1a64(to_string(spec.report_policy), h);
    h = rng::fnv1a64_bytes(&spec.report_waveform.magnitude, sizeof(double), h);
    unsigned char tm = spec.true_manipulation ? 1 : 0;
    h = rng::fnv1a64_bytes(&tm, 1, h);
  }
  return h;
}

namespace {

AttackStep default_payload_step() {
  AttackStep st;
  st.offset = 0.0;
  st.layer = EntryLayer::CONTROL;
  st.method = EntryMethod::INTRUSION;
  st.from = netsim::NodeId::ATTACKER;
  st.to = netsim::NodeId::ATTACKER;
  st.effect = StepEffect::PAYLOAD;
  return st;
}

}  // namespace

std::vector<AttackSpec> plan_attacks(const AttackGrid& grid, double duration,
                                     double sample_period, std::uint64_t seed) {
  if (grid.kinds.empty() || grid.points.empty() || grid.actions.empty() ||
      grid.waveforms.empty()) {
    throw PlanningError("attack grid must list kinds, points, actions and waveforms");
  }
  if (grid.limit <= 0) throw PlanningError("attack plan limit must be positive");
  if (grid.zero_day_count >= grid.limit) {
    throw PlanningError("zero-day count must be smaller than the plan limit");
  }

  std::vector<double> mags = grid.magnitudes;
  if (mags.empty()) mags = {0.2};

  // Full enumeration in fixed attribute order.
  struct Candidate {
    AttackSpec spec;
    std::size_t kind_idx;
  };
  std::vector<Candidate> all;
  for (std::size_t ki = 0; ki < grid.kinds.size(); ++ki) {
    for (InjectionPoint point : grid.points) {
      if (!point_legal_for_kind(grid.kinds[ki], point)) continue;
      for (AttackAction action : grid.actions) {
        if (point == InjectionPoint::CONTROLLER_PARAM &&
            action != AttackAction::MODIFY) {
          continue;  // parameters are values, not frame streams
        }
        for (WaveKind wk : grid.waveforms) {
          for (double mag : mags) {
            AttackSpec s;
            s.kind = grid.kinds[ki];
            s.point = point;
            s.action = action;
            s.waveform.kind = wk;
            s.waveform.magnitude = mag;
            s.waveform.duration = grid.window_len;
            if (wk == WaveKind::RAMP) s.waveform.rate = grid.ramp_rate;
            if (wk == WaveKind::STEALTH_RAMP) {
              s.waveform.threshold = grid.stealth_threshold;
              s.waveform.rate = grid.stealth_threshold / (2.0 * sample_period);
            }
            if (s.kind == AttackKind::STEALTHY) {
              s.dm_targets = {netsim::NodeId::HMI, netsim::NodeId::LOGSERVER};
              s.report_policy = ReportPolicy::FREEZE_LAST_GOOD;
              s.true_manipulation = true;
            }
            if (s.kind == AttackKind::INTEGRITY_DM &&
                s.point == InjectionPoint::SENSOR_TO_DM) {
              s.dm_targets = {netsim::NodeId::HMI};
            }
            if (s.kind == AttackKind::DOS) s.dos_rate = 1200.0;
            if (s.kind == AttackKind::ZERO_DAY_VARIANT) s.zero_day = true;
            s.steps = {default_payload_step()};
            all.push_back({s, ki});
          }
        }
      }
    }
  }

  // Duplicate-fingerprint elimination keeps the first of each behavior.
  std::set<std::uint64_t> seen;
  std::vector<std::vector<Candidate>> by_kind(grid.kinds.size());
  for (auto& c : all) {
    const std::uint64_t fp = fingerprint(c.spec, sample_period);
    if (!seen.insert(fp).second) continue;
    by_kind[c.kind_idx].push_back(c);
  }

  // Seeded shuffle inside each kind group, then round-robin truncation.
  std::mt19937_64 gen(seed);
  for (auto& group : by_kind) {
    std::shuffle(group.begin(), group.end(), gen);
  }
  std::vector<AttackSpec> picked;
  const int train_target = grid.limit - grid.zero_day_count;
  {
    std::vector<std::size_t> cursors(by_kind.size(), 0);
    bool progress = true;
    while (static_cast<int>(picked.size()) < train_target && progress) {
      progress = false;
      for (std::size_t ki = 0; ki < by_kind.size() &&
                               static_cast<int>(picked.size()) < train_target;
           ++ki) {
        if (cursors[ki] < by_kind[ki].size()) {
          picked.push_back(by_kind[ki][cursors[ki]++].spec);
          progress = true;
        }
      }
    }
    if (static_cast<int>(picked.size()) < train_target) {
      throw PlanningError("attack grid too small for the requested limit");
    }

    // Zero-day picks must use attribute combinations held out of the rest
    // of the plan.
    std::set<std::string> train_combos;
    for (const auto& s : picked) {
      train_combos.insert(std::string(to_string(s.point)) + "/" +
                          to_string(s.action) + "/" + to_string(s.waveform.kind));
    }
    int zd_needed = grid.zero_day_count;
    while (zd_needed > 0) {
      bool found = false;
      for (std::size_t ki = 0; ki < by_kind.size() && zd_needed > 0; ++ki) {
        while (cursors[ki] < by_kind[ki].size()) {
          AttackSpec s = by_kind[ki][cursors[ki]++].spec;
          const std::string combo = std::string(to_string(s.point)) + "/" +
                                    to_string(s.action) + "/" +
                                    to_string(s.waveform.kind);
          if (train_combos.count(combo)) continue;
          train_combos.insert(combo);
          s.zero_day = true;
          picked.push_back(s);
          --zd_needed;
          found = true;
          break;
        }
      }
      if (!found) {
        throw PlanningError(
            "attack grid has no held-out attribute combination left for "
            "zero-day attacks");
      }
    }
  }

  // Non-overlapping windows with normal-traffic gaps, zero-days last.
  double t = grid.start_after;
  int next_id = 1;
  for (auto& s : picked) {
    s.id = next_id++;
    s.t_start = t;
    s.t_end = t + grid.window_len;
    s.waveform.duration = grid.window_len;
    if (s.kind == AttackKind::STEALTHY &&
        s.report_policy == ReportPolicy::OFFSET_WAVEFORM) {
      s.report_waveform.duration = grid.window_len;
    }
    t = s.t_end + grid.gap;
    if (s.t_end > duration) {
      throw PlanningError("attack plan does not fit inside the scenario length");
    }
  }
  return picked;
}

}  // namespace cpsgen::attacks
