#include "cpsgen/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <set>

#include "cpsgen/rng.hpp"

namespace cpsgen::engine {

namespace {

using netsim::FnCode;
using netsim::Frame;
using netsim::NodeId;
using netsim::Proto;

constexpr double kModeAuto = 0.0;
constexpr double kModeManual = 1.0;

/// Catalog entry for a command-scenario session driven by an attacker. The
/// behavior itself is produced by the session machinery; the spec exists so
/// every executed attack id is documented in the manifest.
attacks::AttackSpec session_attack_spec(const scenario::SessionConfig& s) {
  attacks::AttackSpec a;
  a.id = s.attack_id;
  a.kind = attacks::AttackKind::INTEGRITY_DM;
  a.point = attacks::InjectionPoint::DM_TO_ACTUATOR;
  a.action = attacks::AttackAction::MODIFY;
  a.t_start = s.login;
  a.t_end = s.logout;
  if (s.variant == scenario::SessionVariant::COMPROMISED_HMI) {
    attacks::AttackStep cred;
    cred.offset = 0.0;
    cred.layer = attacks::EntryLayer::APPLICATION;
    cred.method = attacks::EntryMethod::REMOTE;
    cred.from = NodeId::ATTACKER;
    cred.to = NodeId::HMI;
    cred.effect = attacks::StepEffect::CREDENTIAL;
    attacks::AttackStep payload = cred;
    payload.from = NodeId::HMI;
    payload.to = NodeId::HMI;
    payload.effect = attacks::StepEffect::PAYLOAD;
    a.steps = {cred, payload};
  } else {
    attacks::AttackStep payload;
    payload.layer = attacks::EntryLayer::CONTROL;
    payload.method = attacks::EntryMethod::INTRUSION;
    a.steps = {payload};
  }
  return a;
}

struct DosState {
  const attacks::AttackSpec* spec = nullptr;
  double flood_acc = 0.0;
  double drop_acc = 0.0;
};

struct Simulation {
  explicit Simulation(const scenario::ScenarioConfig& config)
      : cfg(config), noise(config.seed, "sensor_noise") {}

  const scenario::ScenarioConfig& cfg;
  rng::Stream noise;

  // Grid.
  double dt = 0.0;
  std::int64_t total_steps = 0;
  std::int64_t poll_stride = 0;
  std::int64_t report_stride = 0;

  // Components.
  plant::PlantParams params;
  plant::PlantState tank;
  control::ControllerState ctl;
  netsim::Network net;
  std::unique_ptr<hostlog::HostLogBook> book;

  // Runtime.
  double act_applied = 0.0;  // command held by the actuator
  std::optional<double> runtime_setpoint;
  bool supervision_latched = false;
  double last_record_y = 0.0;
  double last_record_d = 0.0;
  std::deque<std::pair<double, double>> report_history;  // (y, d) as reported
  std::map<std::int64_t, std::vector<Frame>> pending;
  std::vector<DosState> dos;
  std::vector<std::shared_ptr<attacks::ReportStreamTamper>> report_tampers;
  std::vector<attacks::AttackSpec> executed;
  std::vector<std::pair<double, plant::SystemMode>> mode_schedule;
  RunArtifacts out;

  std::int64_t step_of(double t) const {
    return static_cast<std::int64_t>(std::llround(t / dt));
  }
  double time_of(std::int64_t k) const { return static_cast<double>(k) * dt; }

  int active_attack_id(double t) const {
    for (const auto& a : executed) {
      if (t >= a.t_start - netsim::kTimeEps && t <= a.t_end + netsim::kTimeEps) return a.id;
    }
    return 0;
  }

  const attacks::AttackSpec* active_param_tamper(double t) const {
    for (const auto& a : executed) {
      if (a.point != attacks::InjectionPoint::CONTROLLER_PARAM) continue;
      if (a.kind == attacks::AttackKind::DOS) continue;
      if (t >= a.t_start - netsim::kTimeEps && t <= a.t_end + netsim::kTimeEps) return &a;
    }
    return nullptr;
  }

  control::ControllerConfig effective_law(double t) const {
    control::ControllerConfig law = cfg.controller;
    if (runtime_setpoint) law.setpoint = *runtime_setpoint;
    if (const auto* a = active_param_tamper(t)) {
      law.setpoint += attacks::design_waveform(a->waveform, t - a->t_start);
    }
    return law;
  }

  void host(double t, NodeId node, hostlog::EventKind kind,
            const std::string& actor, const std::string& detail,
            int attack_id) {
    hostlog::HostEvent e;
    e.ts = t;
    e.node = node;
    e.kind = kind;
    e.actor = actor;
    e.detail = detail;
    e.attack_id = attack_id;
    book->record(std::move(e));
  }

  void trip(double t, const std::string& origin) {
    if (ctl.tripped) return;
    ctl.tripped = true;
    ctl.last_u = 0.0;
    host(t, NodeId::CONTROLLER, hostlog::EventKind::MODE_SWITCH, origin,
         "safety trip engaged", active_attack_id(t));
    for (NodeId dm : {NodeId::HMI, NodeId::LOGSERVER}) {
      send(net.make_frame(t, NodeId::CONTROLLER, dm, Proto::REPORTPROTO,
                          FnCode::TRIP_BCAST, netsim::kRegTrip, 1.0));
    }
  }

  /// Receiver-side effects of a frame that reached its destination.
  void on_receive(const Frame& f) {
    if (f.fn == FnCode::WRITE) book->mirror_write(f);

    if (f.dst == NodeId::CONTROLLER && f.fn == FnCode::READ &&
        f.addr == netsim::kRegSensorConc) {
      ctl.last_y = f.value;
      return;
    }
    if (f.dst == NodeId::ACTUATOR && f.fn == FnCode::WRITE &&
        f.addr == netsim::kRegActuatorFlow) {
      act_applied = f.value;
      return;
    }
    if (f.dst == NodeId::CONTROLLER && f.fn == FnCode::WRITE) {
      switch (f.addr) {
        case netsim::kRegMode:
          ctl = control::set_control_mode(
              ctl,
              f.value == kModeManual ? control::ControlMode::MANUAL
                                     : control::ControlMode::AUTO,
              std::nullopt, cfg.controller);
          break;
        case netsim::kRegManualFlow:
          if (ctl.mode == control::ControlMode::MANUAL && !ctl.tripped) {
            ctl.last_u = std::clamp(f.value, cfg.controller.u_min,
                                    cfg.controller.u_max);
          }
          break;
        case netsim::kRegSetpoint:
          runtime_setpoint = f.value;
          break;
        case netsim::kRegTrip:
          trip(f.ts, "remote_trip");
          break;
        default:
          break;
      }
      return;
    }
    if (f.dst == NodeId::HMI && f.fn == FnCode::WRITE &&
        f.addr == netsim::kRegReportConc) {
      if (cfg.supervision.enabled && !supervision_latched && !ctl.tripped &&
          f.value > cfg.supervision.alarm_threshold) {
        supervision_latched = true;
        host(f.ts, NodeId::HMI, hostlog::EventKind::CMD_ISSUED,
             "hmi_supervisor", "remote_trip " +
                 hostlog::value_detail(netsim::kRegTrip, 1.0),
             active_attack_id(f.ts));
        send(net.make_frame(f.ts, NodeId::HMI, NodeId::CONTROLLER,
                            Proto::REPORTPROTO, FnCode::WRITE, netsim::kRegTrip,
                            1.0, active_attack_id(f.ts)));
      }
    }
  }

  /// Delivers a frame, routing interception outcomes: delivered frames take
  /// effect, delayed ones queue for their due step, drops apply nothing.
  netsim::Disposition send(const Frame& f) {
    netsim::Delivery d = net.deliver(f);
    switch (d.kind) {
      case netsim::Disposition::DELIVERED:
        on_receive(d.frame);
        break;
      case netsim::Disposition::DELAYED:
        pending[step_of(d.deliver_at)].push_back(d.frame);
        break;
      case netsim::Disposition::DROPPED:
        break;
    }
    return d.kind;
  }

  /// Values the data-collection stream (the log-server feed) carries for the
  /// current sample: the reported measurement and the reported disturbance.
  /// Report tampering rules apply at sample resolution so released records
  /// match the frames the targeted node actually received.
  std::pair<double, double> logserver_view(double t, double base_y,
                                           double base_d) {
    for (const auto& rt : report_tampers) {
      if (!rt->armed || !rt->applies_to(NodeId::LOGSERVER, t)) continue;
      auto y = rt->transform(base_y, t);
      auto d = rt->transform_disturbance(base_d, t);
      // A suppressed report means the feed holds its last values.
      return {y ? *y : last_record_y, d ? *d : last_record_d};
    }
    return {base_y, base_d};
  }
};

}  // namespace

RunArtifacts simulate(const scenario::ScenarioConfig& cfg) {
  cfg.validate_or_throw();

  Simulation sim(cfg);
  sim.params = cfg.plant_params;
  sim.dt = cfg.plant_params.dt;
  sim.total_steps = sim.step_of(cfg.duration);
  sim.poll_stride = sim.step_of(cfg.traffic.poll_period);
  sim.report_stride = sim.step_of(cfg.traffic.report_period);
  sim.book = std::make_unique<hostlog::HostLogBook>(0.0, cfg.duration);

  // Attack catalog: explicit specs, then the planned grid, then the
  // command-scenario sessions.
  sim.executed = cfg.attack_specs;
  if (cfg.attack_plan) {
    int base_id = 0;
    for (const auto& a : sim.executed) base_id = std::max(base_id, a.id);
    auto planned = attacks::plan_attacks(*cfg.attack_plan, cfg.duration,
                                         cfg.controller.sample_period, cfg.seed);
    for (auto& a : planned) a.id += base_id;
    std::vector<std::string> issues;
    for (const auto& a : planned) {
      attacks::validate_attack_spec(a, cfg.duration,
                                    cfg.controller.sample_period, issues);
    }
    if (!issues.empty()) {
      std::string msg = "planned attacks invalid:";
      for (const auto& s : issues) msg += "\n  " + s;
      throw PlanningError(msg);
    }
    sim.executed.insert(sim.executed.end(), planned.begin(), planned.end());
  }
  for (const auto& s : cfg.sessions) {
    if (s.variant != scenario::SessionVariant::LEGIT) {
      sim.executed.push_back(session_attack_spec(s));
    }
  }
  {
    std::vector<const attacks::AttackSpec*> sorted;
    for (const auto& a : sim.executed) sorted.push_back(&a);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->t_start < b->t_start; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i]->t_start <= sorted[i - 1]->t_end) {
        throw PlanningError("attack windows overlap: ids " +
                            std::to_string(sorted[i - 1]->id) + " and " +
                            std::to_string(sorted[i]->id));
      }
    }
  }

  // Initial closed-loop rest point.
  sim.tank = plant::steady_state(sim.params, cfg.init_inlet_conc);
  sim.ctl.mode = control::ControlMode::AUTO;
  sim.ctl.integral_accum = 0.0;
  sim.ctl.last_u = cfg.controller.u_bias;
  sim.ctl.last_y = sim.tank.outlet_conc;
  sim.act_applied = cfg.controller.u_bias;
  sim.last_record_y = sim.tank.outlet_conc;
  sim.last_record_d = sim.tank.inlet_conc;
  sim.report_history.push_back({sim.tank.outlet_conc, sim.tank.inlet_conc});
  sim.mode_schedule.emplace_back(0.0, sim.tank.mode);

  // Interceptors and tampers.
  const std::set<int> session_ids = [&] {
    std::set<int> ids;
    for (const auto& s : cfg.sessions) {
      if (s.variant != scenario::SessionVariant::LEGIT) ids.insert(s.attack_id);
    }
    return ids;
  }();
  for (const auto& a : sim.executed) {
    if (session_ids.count(a.id)) continue;
    if (a.kind == attacks::AttackKind::DOS) {
      sim.dos.push_back(DosState{&a, 0.0, 0.0});
      continue;
    }
    const bool report_side =
        a.point == attacks::InjectionPoint::SENSOR_TO_DM ||
        a.kind == attacks::AttackKind::STEALTHY;
    const bool stream_side =
        a.point == attacks::InjectionPoint::SENSOR_TO_CONTROLLER ||
        a.point == attacks::InjectionPoint::ACTUATOR_CMD ||
        a.point == attacks::InjectionPoint::DM_TO_ACTUATOR;
    if (stream_side &&
        (a.kind != attacks::AttackKind::STEALTHY || a.true_manipulation)) {
      sim.net.add_interceptor(attacks::build_stream_interceptor(a));
    }
    if (report_side) {
      auto rt = std::make_shared<attacks::ReportStreamTamper>(
          attacks::build_report_tamper(a, cfg.traffic.report_period));
      sim.report_tampers.push_back(rt);
      netsim::Interceptor ic;
      ic.attack_id = a.id;
      ic.window_begin = a.t_start;
      ic.window_end = a.t_end;
      ic.matches = [rt](const Frame& f) {
        return f.src == NodeId::CONTROLLER && f.fn == FnCode::WRITE &&
               f.addr == netsim::kRegReportConc &&
               std::find(rt->targets.begin(), rt->targets.end(), f.dst) !=
                   rt->targets.end();
      };
      const int id = a.id;
      ic.act = [rt, id](const Frame& f, double now) {
        auto v = rt->transform(f.value, now);
        if (!v) return netsim::Outcome{netsim::Disposition::DROPPED, {}, 0.0};
        Frame g = f;
        g.value = *v;
        g.attack_id = id;
        return netsim::Outcome{netsim::Disposition::DELIVERED, g, 0.0};
      };
      sim.net.add_interceptor(std::move(ic));
    }
  }

  // Scheduled event tables keyed by step.
  std::map<std::int64_t, std::vector<scenario::DisturbanceEvent>> disturbances;
  for (const auto& d : cfg.disturbances) {
    disturbances[sim.step_of(d.at)].push_back(d);
  }
  std::map<std::int64_t, std::vector<plant::FaultEvent>> faults;
  for (const auto& f : cfg.faults) faults[sim.step_of(f.at)].push_back(f);

  struct VectorEvent {
    const attacks::AttackSpec* spec;
    attacks::AttackStep step;
  };
  std::map<std::int64_t, std::vector<VectorEvent>> vector_events;
  for (const auto& a : sim.executed) {
    if (session_ids.count(a.id)) continue;
    for (const auto& st : a.steps) {
      vector_events[sim.step_of(a.t_start + st.offset)].push_back(
          VectorEvent{&a, st});
    }
  }

  enum class SessionPhase { LOGIN, SWITCH, RETURN, LOGOUT };
  struct SessionEvent {
    const scenario::SessionConfig* s;
    SessionPhase phase;
  };
  std::map<std::int64_t, std::vector<SessionEvent>> session_events;
  for (const auto& s : cfg.sessions) {
    session_events[sim.step_of(s.login)].push_back({&s, SessionPhase::LOGIN});
    session_events[sim.step_of(s.mode_switch_at)].push_back(
        {&s, SessionPhase::SWITCH});
    if (s.auto_return_at >= 0.0) {
      session_events[sim.step_of(s.auto_return_at)].push_back(
          {&s, SessionPhase::RETURN});
    }
    session_events[sim.step_of(s.logout)].push_back({&s, SessionPhase::LOGOUT});
  }
  std::map<std::int64_t, std::vector<const scenario::IrregularEvent*>>
      irregular_events;
  for (const auto& ev : cfg.irregulars) {
    irregular_events[sim.step_of(ev.at)].push_back(&ev);
  }

  const auto emit_vector_step = [&](double t, const VectorEvent& ve) {
    const int id = ve.spec->id;
    const auto& st = ve.step;
    switch (st.effect) {
      case attacks::StepEffect::RECON: {
        if (st.to == NodeId::ATTACKER) break;
        const Proto proto =
            netsim::legal_edge(st.from, st.to, Proto::REPORTPROTO)
                ? Proto::REPORTPROTO
                : Proto::POLLPROTO;
        for (int i = 0; i < 3; ++i) {
          sim.send(sim.net.make_frame(t, st.from, st.to, proto, FnCode::READ,
                                      netsim::kRegScan, 0.0, id));
        }
        sim.host(t, st.to, hostlog::EventKind::SYS_ERROR, "netmon",
                 "repeated connection probes", id);
        break;
      }
      case attacks::StepEffect::CREDENTIAL:
        if (st.to == NodeId::ATTACKER) break;
        sim.host(t, st.to, hostlog::EventKind::AUTH_FAIL, "svc_remote",
                 "bad credentials", id);
        sim.host(t, st.to, hostlog::EventKind::AUTH_FAIL, "svc_remote",
                 "bad credentials", id);
        sim.host(t, st.to, hostlog::EventKind::AUTH_LOGIN, "svc_remote",
                 "session opened", id);
        break;
      case attacks::StepEffect::PIVOT:
        if (st.to == NodeId::ATTACKER) break;
        sim.host(t, st.to, hostlog::EventKind::PROC_START, "svc_remote",
                 "remote agent started", id);
        break;
      case attacks::StepEffect::PAYLOAD:
        if (st.to == NodeId::ATTACKER) break;  // on-path MITM, no host artifact
        sim.host(t, st.to, hostlog::EventKind::CONFIG_CHANGE, "svc_remote",
                 "io parameter map rewritten", id);
        break;
    }
  };

  const auto session_command_frames = [&](double t,
                                          const scenario::SessionConfig& s,
                                          double mode_value,
                                          std::optional<double> manual) {
    const int id =
        s.variant == scenario::SessionVariant::LEGIT ? 0 : s.attack_id;
    sim.send(sim.net.make_frame(t, NodeId::HMI, NodeId::CONTROLLER,
                                Proto::REPORTPROTO, FnCode::WRITE,
                                netsim::kRegMode, mode_value, id));
    if (manual) {
      sim.send(sim.net.make_frame(t, NodeId::HMI, NodeId::CONTROLLER,
                                  Proto::REPORTPROTO, FnCode::WRITE,
                                  netsim::kRegManualFlow, *manual, id));
    }
  };

  const auto emit_session_event = [&](double t, const SessionEvent& se) {
    const auto& s = *se.s;
    const bool spoofed = s.variant == scenario::SessionVariant::SPOOFED;
    const bool compromised =
        s.variant == scenario::SessionVariant::COMPROMISED_HMI;
    const int id =
        s.variant == scenario::SessionVariant::LEGIT ? 0 : s.attack_id;
    switch (se.phase) {
      case SessionPhase::LOGIN:
        if (spoofed) break;  // no session, no fingerprint
        if (compromised) {
          sim.host(t, NodeId::HMI, hostlog::EventKind::AUTH_FAIL,
                   s.operator_id, "bad credentials", id);
          sim.host(t, NodeId::HMI, hostlog::EventKind::AUTH_FAIL,
                   s.operator_id, "bad credentials", id);
        }
        sim.host(t, NodeId::HMI, hostlog::EventKind::AUTH_LOGIN, s.operator_id,
                 "session opened", id);
        if (compromised) {
          sim.host(t, NodeId::HMI, hostlog::EventKind::PROC_START,
                   s.operator_id, "unsigned tool launched", id);
        }
        break;
      case SessionPhase::SWITCH:
        if (!spoofed) {
          sim.host(t, NodeId::HMI, hostlog::EventKind::MODE_SWITCH,
                   s.operator_id, "mode=MANUAL", id);
          sim.host(t, NodeId::HMI, hostlog::EventKind::CMD_ISSUED,
                   s.operator_id,
                   hostlog::value_detail(netsim::kRegManualFlow, s.manual_u),
                   id);
        }
        session_command_frames(t, s, kModeManual, s.manual_u);
        break;
      case SessionPhase::RETURN:
        if (!spoofed) {
          sim.host(t, NodeId::HMI, hostlog::EventKind::MODE_SWITCH,
                   s.operator_id, "mode=AUTO", id);
        }
        session_command_frames(t, s, kModeAuto, std::nullopt);
        break;
      case SessionPhase::LOGOUT:
        if (spoofed) break;
        sim.host(t, NodeId::HMI, hostlog::EventKind::AUTH_LOGOUT,
                 s.operator_id, "session closed", id);
        break;
    }
  };

  const auto emit_irregular = [&](double t, const scenario::IrregularEvent& ev) {
    switch (ev.kind) {
      case scenario::IrregularKind::OPERATOR_MANUAL_POLL: {
        sim.host(t, NodeId::HMI, hostlog::EventKind::CMD_ISSUED, "operator",
                 "manual_poll reg=" + std::to_string(netsim::kRegReportConc),
                 0);
        sim.send(sim.net.make_frame(t, NodeId::HMI, NodeId::CONTROLLER,
                                    Proto::REPORTPROTO, FnCode::READ,
                                    netsim::kRegReportConc, 0.0));
        sim.send(sim.net.make_frame(t, NodeId::CONTROLLER, NodeId::HMI,
                                    Proto::REPORTPROTO, FnCode::READ,
                                    netsim::kRegReportConc, sim.ctl.last_y));
        break;
      }
      case scenario::IrregularKind::MODE_SWITCH_TRAFFIC: {
        const bool manual = ev.mode == control::ControlMode::MANUAL;
        sim.host(t, NodeId::HMI, hostlog::EventKind::MODE_SWITCH, "operator",
                 manual ? "mode=MANUAL" : "mode=AUTO", 0);
        sim.send(sim.net.make_frame(t, NodeId::HMI, NodeId::CONTROLLER,
                                    Proto::REPORTPROTO, FnCode::WRITE,
                                    netsim::kRegMode,
                                    manual ? kModeManual : kModeAuto));
        if (manual && ev.manual_u) {
          sim.send(sim.net.make_frame(t, NodeId::HMI, NodeId::CONTROLLER,
                                      Proto::REPORTPROTO, FnCode::WRITE,
                                      netsim::kRegManualFlow, *ev.manual_u));
        }
        break;
      }
      case scenario::IrregularKind::SAFETY_TRIP_BCAST:
        sim.trip(t, "scheduled_trip");
        break;
    }
  };

  // ---- main loop ----------------------------------------------------------
  for (std::int64_t k = 0; k <= sim.total_steps; ++k) {
    const double t = sim.time_of(k);

    // Late deliveries due now.
    if (auto it = sim.pending.find(k); it != sim.pending.end()) {
      for (const Frame& f : it->second) {
        sim.net.deliver_direct(f);
        sim.on_receive(f);
      }
      sim.pending.erase(it);
    }

    if (auto it = disturbances.find(k); it != disturbances.end()) {
      for (const auto& d : it->second) sim.tank.inlet_conc = d.value;
    }
    if (auto it = faults.find(k); it != faults.end()) {
      for (const auto& f : it->second) {
        sim.tank = plant::apply_fault_event(sim.tank, f);
        sim.mode_schedule.emplace_back(t, sim.tank.mode);
      }
    }

    // Arm report tampers whose window opens here: capture the last pre-window
    // reported values.
    for (auto& rt : sim.report_tampers) {
      if (!rt->armed && k == sim.step_of(rt->t_start)) {
        rt->armed = true;
        rt->frozen_value = sim.report_history.back().first;
        rt->frozen_disturbance = sim.report_history.back().second;
        rt->replay_ring.clear();
        rt->replay_ring_d.clear();
        for (const auto& [y, d] : sim.report_history) {
          rt->replay_ring.push_back(y);
          rt->replay_ring_d.push_back(d);
        }
      }
    }

    if (auto it = vector_events.find(k); it != vector_events.end()) {
      for (const auto& ve : it->second) emit_vector_step(t, ve);
    }
    if (auto it = session_events.find(k); it != session_events.end()) {
      for (const auto& se : it->second) emit_session_event(t, se);
    }
    if (auto it = irregular_events.find(k); it != irregular_events.end()) {
      for (const auto* ev : it->second) emit_irregular(t, *ev);
    }

    // DoS floods: the attacker pushes frames at its configured rate; the
    // controller's communication budget drains accordingly.
    for (auto& ds : sim.dos) {
      if (t < ds.spec->t_start - netsim::kTimeEps || t > ds.spec->t_end + netsim::kTimeEps || k == sim.total_steps) {
        continue;
      }
      ds.flood_acc += ds.spec->dos_rate * sim.dt;
      while (ds.flood_acc >= 1.0) {
        ds.flood_acc -= 1.0;
        sim.send(sim.net.make_frame(t, NodeId::ATTACKER, NodeId::CONTROLLER,
                                    Proto::POLLPROTO, FnCode::READ,
                                    netsim::kRegScan, 0.0, ds.spec->id));
      }
    }

    const bool control_tick = k < sim.total_steps && k % sim.poll_stride == 0;
    if (control_tick) {
      const double y_raw = plant::measure(sim.tank, sim.params, sim.noise);
      sim.send(sim.net.make_frame(t, NodeId::SENSOR, NodeId::CONTROLLER,
                                  Proto::POLLPROTO, FnCode::READ,
                                  netsim::kRegSensorConc, y_raw));

      dataset::LabeledRecord rec;
      rec.step = k;
      rec.t = t;
      rec.u = sim.act_applied;
      const auto [rep_y, rep_d] =
          sim.logserver_view(t, sim.ctl.last_y, sim.tank.inlet_conc);
      rec.y = rep_y;
      rec.d = rep_d;
      rec.auto_flag =
          sim.ctl.mode == control::ControlMode::AUTO && !sim.ctl.tripped;
      rec.y_true = y_raw;
      rec.label = dataset::Label{sim.active_attack_id(t), sim.tank.mode};
      sim.last_record_y = rec.y;
      sim.last_record_d = rec.d;
      sim.out.records.push_back(rec);

      // Control task: hard safety first, then the governing law.
      const control::ControllerConfig law = sim.effective_law(t);
      if (!sim.ctl.tripped && sim.ctl.last_y > law.haz_threshold) {
        sim.trip(t, "safety_task");
      }
      double u_cmd = 0.0;
      if (sim.ctl.tripped) {
        u_cmd = 0.0;
      } else if (sim.ctl.mode == control::ControlMode::MANUAL) {
        u_cmd = sim.ctl.last_u;
      } else {
        control::PiResult pr = control::pi_update(sim.ctl.last_y, law, sim.ctl);
        sim.ctl = pr.st;
        u_cmd = pr.u;
      }
      sim.host(t, NodeId::CONTROLLER, hostlog::EventKind::CMD_ISSUED,
               "control_task",
               hostlog::value_detail(netsim::kRegActuatorFlow, u_cmd), 0);

      const netsim::Disposition disp =
          sim.send(sim.net.make_frame(t, NodeId::CONTROLLER, NodeId::ACTUATOR,
                                      Proto::POLLPROTO, FnCode::WRITE,
                                      netsim::kRegActuatorFlow, u_cmd));
      if (disp != netsim::Disposition::DELIVERED) {
        if (cfg.supervision.failsafe == scenario::Failsafe::FAIL_CLOSED) {
          sim.act_applied = 0.0;
        }
        // LAST_KNOWN_GOOD: the actuator holds its previous command.
      }
    }

    const bool report_tick = k < sim.total_steps && k % sim.report_stride == 0;
    if (report_tick) {
      const double base = sim.ctl.last_y;
      sim.report_history.push_back({base, sim.tank.inlet_conc});
      if (sim.report_history.size() > attacks::kReplayDepth) {
        sim.report_history.pop_front();
      }
      for (NodeId dm : {NodeId::HMI, NodeId::LOGSERVER}) {
        // Under flooding the reporting task loses its slot in proportion to
        // the overload; control tasks keep theirs (RT scheduling).
        bool starved = false;
        for (auto& ds : sim.dos) {
          if (t < ds.spec->t_start - netsim::kTimeEps || t > ds.spec->t_end + netsim::kTimeEps) continue;
          const double overload =
              ds.spec->dos_rate / cfg.supervision.dos_capacity;
          if (overload <= 1.0) continue;
          ds.drop_acc += 1.0 - 1.0 / overload;
          if (ds.drop_acc >= 1.0) {
            ds.drop_acc -= 1.0;
            starved = true;
          }
        }
        if (starved) continue;
        sim.host(t, NodeId::CONTROLLER, hostlog::EventKind::CMD_ISSUED,
                 "report_task",
                 hostlog::value_detail(netsim::kRegReportConc, base), 0);
        sim.send(sim.net.make_frame(t, NodeId::CONTROLLER, dm,
                                    Proto::REPORTPROTO, FnCode::WRITE,
                                    netsim::kRegReportConc, base));
      }
    }

    if (k < sim.total_steps) {
      sim.tank = plant::integrate_step(sim.tank, sim.act_applied, sim.params);
    }
  }

  // Attacker-side log tampering.
  for (const auto& a : sim.executed) {
    if (a.log_wipe) sim.book->wipe(NodeId::CONTROLLER, a.t_start, a.t_end);
  }

  sim.out.capture = sim.net.sorted_capture();
  sim.out.host = sim.book->sorted();
  sim.out.executed = sim.executed;
  sim.out.mode_schedule = sim.mode_schedule;
  sim.out.config = cfg;
  return sim.out;
}

}  // namespace cpsgen::engine
