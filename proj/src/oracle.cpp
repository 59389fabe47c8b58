#include "cpsgen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace cpsgen::oracle {

const char* to_string(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::NORMAL: return "NORMAL";
    case TraceVerdict::FAILURE: return "FAILURE";
    case TraceVerdict::ATTACK: return "ATTACK";
    case TraceVerdict::ATTACK_OR_FAILURE: return "ATTACK_OR_FAILURE";
    case TraceVerdict::UNTRACEABLE: return "UNTRACEABLE";
  }
  return "?";
}

const char* to_string(DetectorVariant v) {
  switch (v) {
    case DetectorVariant::PHY: return "PHY";
    case DetectorVariant::PHY_NET: return "PHY_NET";
    case DetectorVariant::PHY_NET_HOST: return "PHY_NET_HOST";
  }
  return "?";
}

const char* to_string(Cell c) {
  switch (c) {
    case Cell::TN: return "TN";
    case Cell::FN: return "FN";
    case Cell::TP: return "TP";
    case Cell::FP: return "FP";
  }
  return "?";
}

const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::NORMAL_OPERATION: return "NORMAL_OPERATION";
    case RunOutcome::DM_INTERVENTION: return "DM_INTERVENTION";
    case RunOutcome::FUTILE_INTERVENTION: return "FUTILE_INTERVENTION";
    case RunOutcome::HAZARD: return "HAZARD";
  }
  return "?";
}

TraceWindow window_from_records(const std::vector<dataset::LabeledRecord>& rs,
                                std::size_t first, std::size_t count) {
  TraceWindow w;
  for (std::size_t i = first; i < first + count && i < rs.size(); ++i) {
    w.push_back(TraceSample{rs[i].t, rs[i].u, rs[i].y, rs[i].d,
                            rs[i].auto_flag});
  }
  return w;
}

TraceCheck classify_trace(const TraceWindow& w, const plant::PlantParams& model,
                          const control::ControllerConfig& law, double tol_m,
                          double tol_a) {
  if (w.size() < 2) {
    throw RangeError("classify_trace: window needs at least 2 samples");
  }
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (!(w[i].t > w[i - 1].t)) {
      throw RangeError("classify_trace: timestamps must strictly increase");
    }
  }

  TraceCheck out;
  for (const TraceSample& s : w) {
    if (!s.auto_flag) {
      out.verdict = TraceVerdict::UNTRACEABLE;
      return out;
    }
  }

  const double period = w[1].t - w[0].t;
  for (std::size_t i = 2; i < w.size(); ++i) {
    if (std::abs((w[i].t - w[i - 1].t) - period) > 1e-9) {
      throw RangeError("classify_trace: window must be uniformly sampled");
    }
  }
  const auto sub_steps =
      static_cast<std::int64_t>(std::llround(period / model.dt));
  if (sub_steps < 1) {
    throw RangeError("classify_trace: sample period below the model grid");
  }

  // Plant-model check: simulate the healthy dynamics sample to sample from
  // the first reported measurement, driven by the logged command stream and
  // disturbances.
  double r_m = 0.0;
  {
    plant::PlantState st;
    st.t = w[0].t;
    st.outlet_conc = w[0].y;
    st.inlet_conc = w[0].d;
    st.applied_flow = w[0].u;
    for (std::size_t i = 1; i < w.size(); ++i) {
      st.inlet_conc = w[i - 1].d;
      for (std::int64_t k = 0; k < sub_steps; ++k) {
        st = plant::integrate_step(st, w[i].u, model);
      }
      r_m = std::max(r_m, std::abs(st.outlet_conc - w[i].y));
    }
  }

  // Control-law check: A(y[i]) must reproduce u[i+1]. The integral state at
  // the window start is unknown, so it is seeded by inverting the law at the
  // first transition; the remaining transitions carry the evidence.
  double r_a = 0.0;
  {
    control::ControllerState st;
    st.mode = control::ControlMode::AUTO;
    const double e0 = law.setpoint - w[0].y;
    if (law.ki_gain != 0.0) {
      st.integral_accum =
          (w[1].u - law.u_bias - law.kp_gain * e0) / law.ki_gain -
          e0 * law.sample_period;
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const control::PiResult pr = control::pi_update(w[i].y, law, st);
      st = pr.st;
      r_a = std::max(r_a, std::abs(pr.u - w[i + 1].u));
    }
  }

  out.model_residual = r_m;
  out.control_residual = r_a;
  const bool m_ok = r_m <= tol_m;
  const bool a_ok = r_a <= tol_a;
  if (m_ok && a_ok) {
    out.verdict = TraceVerdict::NORMAL;
  } else if (!m_ok && a_ok) {
    out.verdict = TraceVerdict::FAILURE;
  } else if (m_ok && !a_ok) {
    out.verdict = TraceVerdict::ATTACK;
  } else {
    out.verdict = TraceVerdict::ATTACK_OR_FAILURE;
  }
  return out;
}

namespace {

struct SessionWindow {
  double login = 0.0;
  double logout = 0.0;
  std::string operator_id;
};

/// Command writes the controller received from the HMI address space.
std::vector<netsim::Frame> hmi_command_frames(const dataset::RunView& run) {
  std::vector<netsim::Frame> out;
  for (const auto& c : run.capture) {
    if (c.capture_node != netsim::NodeId::CONTROLLER) continue;
    const auto& f = c.frame;
    if (f.src != netsim::NodeId::HMI || f.fn != netsim::FnCode::WRITE) continue;
    if (f.addr == netsim::kRegMode || f.addr == netsim::kRegManualFlow ||
        f.addr == netsim::kRegSetpoint) {
      out.push_back(f);
    }
  }
  return out;
}

bool hmi_compromise_artifacts(const dataset::RunView& run) {
  for (const auto& e : run.host) {
    if (e.node != netsim::NodeId::HMI) continue;
    if (e.kind == hostlog::EventKind::AUTH_FAIL ||
        e.kind == hostlog::EventKind::PROC_START) {
      return true;
    }
  }
  return false;
}

std::vector<SessionWindow> hmi_sessions(const dataset::RunView& run) {
  std::vector<SessionWindow> sessions;
  std::map<std::string, SessionWindow> open;
  for (const auto& e : run.host) {
    if (e.node != netsim::NodeId::HMI) continue;
    if (e.kind == hostlog::EventKind::AUTH_LOGIN) {
      open[e.actor] = SessionWindow{e.ts, -1.0, e.actor};
    } else if (e.kind == hostlog::EventKind::AUTH_LOGOUT) {
      auto it = open.find(e.actor);
      if (it != open.end()) {
        it->second.logout = e.ts;
        sessions.push_back(it->second);
        open.erase(it);
      }
    }
  }
  for (auto& [actor, s] : open) {
    s.logout = std::numeric_limits<double>::infinity();
    sessions.push_back(s);
  }
  return sessions;
}

/// Session action matching a command frame: an operator-attributed
/// MODE_SWITCH or CMD_ISSUED on the HMI at the same instant, inside a
/// session window.
bool command_has_session_action(const dataset::RunView& run,
                                const std::vector<SessionWindow>& sessions,
                                const netsim::Frame& f) {
  for (const auto& e : run.host) {
    if (e.node != netsim::NodeId::HMI) continue;
    if (e.ts != f.ts) continue;
    if (e.kind != hostlog::EventKind::MODE_SWITCH &&
        e.kind != hostlog::EventKind::CMD_ISSUED) {
      continue;
    }
    for (const auto& s : sessions) {
      if (e.actor == s.operator_id && e.ts >= s.login && e.ts <= s.logout) {
        return true;
      }
    }
  }
  return false;
}

bool host_detector_flags(const dataset::RunView& run) {
  if (hmi_compromise_artifacts(run)) return true;
  const auto sessions = hmi_sessions(run);
  for (const auto& f : hmi_command_frames(run)) {
    if (!command_has_session_action(run, sessions, f)) return true;
  }
  return false;
}

std::string physical_signature(const dataset::RunView& run) {
  // Observable features only: labels and the ground-truth sidecar are not
  // inputs a detector would have.
  std::string s;
  char buf[160];
  for (const auto& r : run.records) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%d\n", r.t, r.u, r.y,
                  r.d, r.auto_flag ? 1 : 0);
    s += buf;
  }
  return s;
}

std::string network_signature(const dataset::RunView& run) {
  std::string s;
  for (const auto& c : run.capture) {
    netsim::CaptureRecord scrubbed = c;
    scrubbed.frame.attack_id = 0;  // labels are not observable features
    s += netsim::capture_line(scrubbed);
    s += '\n';
  }
  return s;
}

}  // namespace

DecisionMatrix ids_decision_matrix(const dataset::RunView& legit,
                                   const dataset::RunView& compromised,
                                   const dataset::RunView& spoofed) {
  if (hmi_sessions(legit).empty()) {
    throw Error("ids_decision_matrix: legit run lacks an operator session");
  }
  if (hmi_command_frames(compromised).empty() ||
      hmi_command_frames(spoofed).empty()) {
    throw Error("ids_decision_matrix: attack runs lack the command traffic");
  }

  const std::string base_phy = physical_signature(legit);
  const std::string base_net = network_signature(legit);

  const auto decide = [&](const dataset::RunView& run,
                          DetectorVariant v) -> bool {
    switch (v) {
      case DetectorVariant::PHY:
        return physical_signature(run) != base_phy;
      case DetectorVariant::PHY_NET:
        return physical_signature(run) != base_phy ||
               network_signature(run) != base_net;
      case DetectorVariant::PHY_NET_HOST:
        return physical_signature(run) != base_phy ||
               network_signature(run) != base_net || host_detector_flags(run);
    }
    return false;
  };

  DecisionMatrix m;
  const DetectorVariant variants[3] = {DetectorVariant::PHY,
                                       DetectorVariant::PHY_NET,
                                       DetectorVariant::PHY_NET_HOST};
  for (int c = 0; c < 3; ++c) {
    m[0][c] = decide(legit, variants[c]) ? Cell::FP : Cell::TN;
    const bool flag_comp = decide(compromised, variants[c]);
    const bool flag_spoof = decide(spoofed, variants[c]);
    if (flag_comp != flag_spoof) {
      throw Error(
          "ids_decision_matrix: the two attack scenarios disagree under " +
          std::string(to_string(variants[c])));
    }
    m[1][c] = flag_comp ? Cell::TP : Cell::FN;
  }
  return m;
}

RunOutcome classify_run_outcome(const dataset::RunView& run,
                                double alarm_threshold, double haz_threshold) {
  double intervention_t = -1.0;
  for (const auto& e : run.host) {
    const bool local_trip = e.node == netsim::NodeId::CONTROLLER &&
                            e.kind == hostlog::EventKind::MODE_SWITCH &&
                            e.detail.find("trip") != std::string::npos;
    const bool remote_trip = e.node == netsim::NodeId::HMI &&
                             e.kind == hostlog::EventKind::CMD_ISSUED &&
                             e.detail.find("remote_trip") != std::string::npos;
    if (local_trip || remote_trip) {
      intervention_t = e.ts;
      break;
    }
  }

  bool hazard = false;
  for (const auto& r : run.records) {
    if (r.y_true > haz_threshold) {
      hazard = true;
      break;
    }
  }

  if (intervention_t < 0.0) {
    return hazard ? RunOutcome::HAZARD : RunOutcome::NORMAL_OPERATION;
  }

  // True state at the intervention instant: last sample at or before it.
  double y_true_at = 0.0;
  for (const auto& r : run.records) {
    if (r.t <= intervention_t + 1e-9) y_true_at = r.y_true;
  }
  return y_true_at > alarm_threshold ? RunOutcome::DM_INTERVENTION
                                     : RunOutcome::FUTILE_INTERVENTION;
}

std::vector<WindowVerdict> classify_records(
    const std::vector<dataset::LabeledRecord>& records,
    const plant::PlantParams& model, const control::ControllerConfig& law,
    double tol_m, double tol_a, std::size_t window_len) {
  if (window_len < 2) {
    throw RangeError("classify_records: window length must be >= 2");
  }
  std::vector<WindowVerdict> out;
  for (std::size_t i = 0; i + window_len <= records.size(); i += window_len) {
    TraceWindow w = window_from_records(records, i, window_len);
    TraceCheck c = classify_trace(w, model, law, tol_m, tol_a);
    out.push_back(WindowVerdict{w.front().t, w.back().t, c.verdict,
                                c.model_residual, c.control_residual});
  }
  return out;
}

}  // namespace cpsgen::oracle
