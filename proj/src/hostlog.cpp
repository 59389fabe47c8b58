#include "cpsgen/hostlog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cpsgen::hostlog {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::AUTH_LOGIN: return "AUTH_LOGIN";
    case EventKind::AUTH_LOGOUT: return "AUTH_LOGOUT";
    case EventKind::AUTH_FAIL: return "AUTH_FAIL";
    case EventKind::PROC_START: return "PROC_START";
    case EventKind::CMD_ISSUED: return "CMD_ISSUED";
    case EventKind::MODE_SWITCH: return "MODE_SWITCH";
    case EventKind::CONFIG_CHANGE: return "CONFIG_CHANGE";
    case EventKind::FILE_XFER: return "FILE_XFER";
    case EventKind::SYS_ERROR: return "SYS_ERROR";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "AUTH_LOGIN") return EventKind::AUTH_LOGIN;
  if (s == "AUTH_LOGOUT") return EventKind::AUTH_LOGOUT;
  if (s == "AUTH_FAIL") return EventKind::AUTH_FAIL;
  if (s == "PROC_START") return EventKind::PROC_START;
  if (s == "CMD_ISSUED") return EventKind::CMD_ISSUED;
  if (s == "MODE_SWITCH") return EventKind::MODE_SWITCH;
  if (s == "CONFIG_CHANGE") return EventKind::CONFIG_CHANGE;
  if (s == "FILE_XFER") return EventKind::FILE_XFER;
  if (s == "SYS_ERROR") return EventKind::SYS_ERROR;
  throw ConfigError("unknown host event kind: " + s);
}

std::string value_detail(int addr, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "reg=%d val=%.9g", addr, value);
  return buf;
}

double detail_value(const std::string& detail) {
  auto pos = detail.find("val=");
  if (pos == std::string::npos) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::strtod(detail.c_str() + pos + 4, nullptr);
}

void HostLogBook::record(HostEvent e) {
  if (e.ts < begin_ || e.ts > end_) {
    throw RangeError("host event timestamp outside the scenario window");
  }
  e.seq = seq_++;
  events_.push_back(std::move(e));
}

void HostLogBook::mirror_write(const netsim::Frame& f) {
  if (f.fn != netsim::FnCode::WRITE) return;
  HostEvent e;
  e.ts = f.ts;
  e.node = f.dst;
  e.kind = EventKind::CMD_ISSUED;
  e.actor = to_string(f.src);
  e.detail = value_detail(f.addr, f.value);
  e.attack_id = f.attack_id;
  record(std::move(e));
}

void HostLogBook::wipe(netsim::NodeId node, double t0, double t1) {
  events_.erase(std::remove_if(events_.begin(), events_.end(),
                               [&](const HostEvent& e) {
                                 return e.node == node && e.ts >= t0 &&
                                        e.ts <= t1;
                               }),
                events_.end());
}

std::vector<HostEvent> HostLogBook::node_events(netsim::NodeId node) const {
  std::vector<HostEvent> out;
  for (const auto& e : events_) {
    if (e.node == node) out.push_back(e);
  }
  return out;
}

std::vector<HostEvent> HostLogBook::sorted() const {
  std::vector<HostEvent> out = events_;
  std::stable_sort(out.begin(), out.end(),
                   [](const HostEvent& a, const HostEvent& b) {
                     if (a.ts != b.ts) return a.ts < b.ts;
                     const std::string an = netsim::to_string(a.node);
                     const std::string bn = netsim::to_string(b.node);
                     if (an != bn) return an < bn;
                     return a.seq < b.seq;
                   });
  return out;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string host_line(const HostEvent& e) {
  char ts[40];
  std::snprintf(ts, sizeof(ts), "%.9g", e.ts);
  std::string s;
  s.reserve(160);
  s += "{\"ts\":";
  s += ts;
  s += ",\"node\":\"";
  s += netsim::to_string(e.node);
  s += "\",\"kind\":\"";
  s += to_string(e.kind);
  s += "\",\"actor\":\"";
  s += json_escape(e.actor);
  s += "\",\"detail\":\"";
  s += json_escape(e.detail);
  s += "\",\"attack_id\":";
  s += std::to_string(e.attack_id);
  s += "}";
  return s;
}

}  // namespace cpsgen::hostlog
