#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpsgen/errors.hpp"
#include "cpsgen/netsim.hpp"

namespace cpsgen::hostlog {

/// Closed event vocabulary for every node's OS/application log.
enum class EventKind {
  AUTH_LOGIN,
  AUTH_LOGOUT,
  AUTH_FAIL,
  PROC_START,
  CMD_ISSUED,
  MODE_SWITCH,
  CONFIG_CHANGE,
  FILE_XFER,
  SYS_ERROR,
};

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct HostEvent {
  double ts = 0.0;
  netsim::NodeId node = netsim::NodeId::CONTROLLER;
  EventKind kind = EventKind::CMD_ISSUED;
  std::string actor;
  std::string detail;
  int attack_id = 0;
  std::int64_t seq = 0;  // same-timestamp tie-break, not serialized
};

/// Numeric payloads ride in the detail field as "reg=<addr> val=<%.9g>".
std::string value_detail(int addr, double value);
double detail_value(const std::string& detail);  // NaN when absent

/// Append-only per-node logs on the scenario clock. Every received WRITE is
/// mirrored into the receiver's log as CMD_ISSUED so that command data
/// (malicious or not) always lands host-side.
class HostLogBook {
 public:
  HostLogBook(double window_begin, double window_end)
      : begin_(window_begin), end_(window_end) {}

  /// Appends, assigning the tie-break seq. Rejects timestamps outside the
  /// scenario window.
  void record(HostEvent e);

  /// Receiver-side mirror for a delivered WRITE frame.
  void mirror_write(const netsim::Frame& f);

  /// Tamper branch for attacks that manage to overwrite a node's log:
  /// removes the node's entries inside [t0, t1].
  void wipe(netsim::NodeId node, double t0, double t1);

  const std::vector<HostEvent>& events() const { return events_; }
  std::vector<HostEvent> node_events(netsim::NodeId node) const;
  std::vector<HostEvent> sorted() const;  // (ts, node, seq)

 private:
  double begin_;
  double end_;
  std::int64_t seq_ = 0;
  std::vector<HostEvent> events_;
};

/// One operator's HMI session. Actions must fall inside [login, logout];
/// sessions of the same operator must not overlap.
struct OperatorSession {
  std::string operator_id;
  double login = 0.0;
  double logout = 0.0;
};

std::string host_line(const HostEvent& e);

}  // namespace cpsgen::hostlog
