#include "cpsgen/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cpsgen::netsim {

const char* to_string(NodeId n) {
  switch (n) {
    case NodeId::SENSOR: return "SENSOR";
    case NodeId::ACTUATOR: return "ACTUATOR";
    case NodeId::CONTROLLER: return "CONTROLLER";
    case NodeId::HMI: return "HMI";
    case NodeId::LOGSERVER: return "LOGSERVER";
    case NodeId::ATTACKER: return "ATTACKER";
    case NodeId::CORP_WS: return "CORP_WS";
  }
  return "?";
}

const char* to_string(Proto p) {
  return p == Proto::POLLPROTO ? "POLLPROTO" : "REPORTPROTO";
}

const char* to_string(FnCode f) {
  switch (f) {
    case FnCode::READ: return "READ";
    case FnCode::WRITE: return "WRITE";
    case FnCode::TRIP_BCAST: return "TRIP_BCAST";
  }
  return "?";
}

NodeId node_from_string(const std::string& s) {
  if (s == "SENSOR") return NodeId::SENSOR;
  if (s == "ACTUATOR") return NodeId::ACTUATOR;
  if (s == "CONTROLLER") return NodeId::CONTROLLER;
  if (s == "HMI") return NodeId::HMI;
  if (s == "LOGSERVER") return NodeId::LOGSERVER;
  if (s == "ATTACKER") return NodeId::ATTACKER;
  if (s == "CORP_WS") return NodeId::CORP_WS;
  throw ConfigError("unknown node id: " + s);
}

bool legal_edge(NodeId src, NodeId dst, Proto proto) {
  using N = NodeId;
  if (proto == Proto::POLLPROTO) {
    if (src == N::SENSOR && dst == N::CONTROLLER) return true;
    if (src == N::CONTROLLER && dst == N::SENSOR) return true;
    if (src == N::CONTROLLER && dst == N::ACTUATOR) return true;
    if (src == N::ATTACKER && dst == N::CONTROLLER) return true;
    return false;
  }
  // REPORTPROTO
  if (src == N::CONTROLLER && (dst == N::HMI || dst == N::LOGSERVER)) return true;
  if (src == N::HMI && dst == N::CONTROLLER) return true;
  if (src == N::CORP_WS && dst == N::HMI) return true;
  if (src == N::ATTACKER &&
      (dst == N::CONTROLLER || dst == N::HMI || dst == N::LOGSERVER)) {
    return true;
  }
  return false;
}

void TrafficSchedule::validate() const {
  if (!(poll_period > 0.0)) throw ConfigError("traffic: poll_period must be > 0");
  if (!(report_period > 0.0)) {
    throw ConfigError("traffic: report_period must be > 0");
  }
  if (jitter != 0.0) {
    throw ConfigError("traffic: only jitter = 0 is supported");
  }
}

Frame Network::make_frame(double ts, NodeId src, NodeId dst, Proto proto,
                          FnCode fn, int addr, double value, int attack_id) {
  Frame f;
  f.ts = ts;
  f.src = src;
  f.dst = dst;
  f.proto = proto;
  f.fn = fn;
  f.addr = addr;
  f.value = value;
  f.attack_id = attack_id;
  f.seq = link_seq_[{src, dst}]++;
  f.txn = src_txn_[src]++;
  return f;
}

void Network::record(NodeId point, const Frame& f) {
  capture_.push_back(CaptureRecord{point, f, order_++});
}

Delivery Network::deliver(const Frame& f) {
  if (!legal_edge(f.src, f.dst, f.proto)) {
    throw RoutingError(std::string("no topology edge ") + to_string(f.src) +
                       " -> " + to_string(f.dst) + " on " + to_string(f.proto));
  }
  record(f.src, f);

  Frame cur = f;
  for (auto& ic : chain_) {
    if (!ic.matches || !ic.matches(cur)) continue;
    const bool in_window = cur.ts >= ic.window_begin - kTimeEps &&
                           cur.ts <= ic.window_end + kTimeEps;
    if (!in_window) {
      if (ic.observe) ic.observe(cur);
      continue;
    }
    Outcome o = ic.act(cur, cur.ts);
    if (o.kind == Disposition::DROPPED) {
      return Delivery{Disposition::DROPPED, cur, 0.0};
    }
    if (o.kind == Disposition::DELAYED) {
      return Delivery{Disposition::DELAYED, o.frame, o.deliver_at};
    }
    cur = o.frame;
  }

  record(cur.dst, cur);
  return Delivery{Disposition::DELIVERED, cur, 0.0};
}

void Network::deliver_direct(const Frame& f) {
  if (!legal_edge(f.src, f.dst, f.proto)) {
    throw RoutingError(std::string("no topology edge ") + to_string(f.src) +
                       " -> " + to_string(f.dst) + " on " + to_string(f.proto));
  }
  record(f.dst, f);
}

void Network::add_interceptor(Interceptor ic) {
  chain_.push_back(std::move(ic));
}

std::vector<CaptureRecord> Network::sorted_capture() const {
  std::vector<CaptureRecord> sorted = capture_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CaptureRecord& a, const CaptureRecord& b) {
                     if (a.frame.ts != b.frame.ts) return a.frame.ts < b.frame.ts;
                     const std::string an = to_string(a.capture_node);
                     const std::string bn = to_string(b.capture_node);
                     if (an != bn) return an < bn;
                     if (a.frame.seq != b.frame.seq) return a.frame.seq < b.frame.seq;
                     return a.order < b.order;
                   });
  return sorted;
}

void run_traffic_schedule(const TrafficSchedule& sched, double t0, double t1,
                          Network& net, const TickValues& values) {
  sched.validate();
  if (!(t1 > t0)) throw ConfigError("traffic window must satisfy t1 > t0");

  const double eps = 1e-9;
  const auto ticks = [&](double period) {
    std::vector<double> ts;
    for (long i = 0;; ++i) {
      double t = t0 + static_cast<double>(i) * period;
      if (t >= t1 - eps) break;
      ts.push_back(t);
    }
    return ts;
  };

  struct Ev {
    double t;
    int pri;  // polls before reports at equal time
  };
  std::vector<Ev> evs;
  for (double t : ticks(sched.poll_period)) evs.push_back({t, 0});
  for (double t : ticks(sched.report_period)) evs.push_back({t, 1});
  std::stable_sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.pri < b.pri;
  });

  for (const Ev& ev : evs) {
    if (ev.pri == 0) {
      double y = values.sensor_value ? values.sensor_value(ev.t) : 0.0;
      net.deliver(net.make_frame(ev.t, NodeId::SENSOR, NodeId::CONTROLLER,
                                 Proto::POLLPROTO, FnCode::READ,
                                 kRegSensorConc, y));
      double u = values.actuator_value ? values.actuator_value(ev.t) : 0.0;
      net.deliver(net.make_frame(ev.t, NodeId::CONTROLLER, NodeId::ACTUATOR,
                                 Proto::POLLPROTO, FnCode::WRITE,
                                 kRegActuatorFlow, u));
    } else {
      double v = values.report_value ? values.report_value(ev.t) : 0.0;
      for (NodeId dm : {NodeId::HMI, NodeId::LOGSERVER}) {
        net.deliver(net.make_frame(ev.t, NodeId::CONTROLLER, dm,
                                   Proto::REPORTPROTO, FnCode::WRITE,
                                   kRegReportConc, v));
      }
    }
  }
}

namespace {

void append_g9(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

}  // namespace

std::string capture_line(const CaptureRecord& r) {
  std::string s;
  s.reserve(192);
  s += "{\"ts\":";
  append_g9(s, r.frame.ts);
  s += ",\"capture_node\":\"";
  s += to_string(r.capture_node);
  s += "\",\"seq\":";
  s += std::to_string(r.frame.seq);
  s += ",\"src\":\"";
  s += to_string(r.frame.src);
  s += "\",\"dst\":\"";
  s += to_string(r.frame.dst);
  s += "\",\"proto\":\"";
  s += to_string(r.frame.proto);
  s += "\",\"fn_code\":\"";
  s += to_string(r.frame.fn);
  s += "\",\"addr\":";
  s += std::to_string(r.frame.addr);
  s += ",\"value\":";
  append_g9(s, r.frame.value);
  s += ",\"txn\":";
  s += std::to_string(r.frame.txn);
  s += ",\"attack_id\":";
  s += std::to_string(r.frame.attack_id);
  s += "}";
  return s;
}

void export_capture(const std::vector<CaptureRecord>& records,
                    std::ostream& out) {
  for (const auto& r : records) {
    out << capture_line(r) << '\n';
  }
}

}  // namespace cpsgen::netsim
