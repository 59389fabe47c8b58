#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cpsgen/errors.hpp"

namespace cpsgen::netsim {

enum class NodeId { SENSOR, ACTUATOR, CONTROLLER, HMI, LOGSERVER, ATTACKER, CORP_WS };
enum class Proto { POLLPROTO, REPORTPROTO };
enum class FnCode { READ, WRITE, TRIP_BCAST };

const char* to_string(NodeId n);
const char* to_string(Proto p);
const char* to_string(FnCode f);
NodeId node_from_string(const std::string& s);

/// Register map shared by all nodes.
inline constexpr int kRegScan = 0;         // reconnaissance probes
inline constexpr int kRegSensorConc = 1;   // sensor -> controller measurement
inline constexpr int kRegActuatorFlow = 2; // controller -> actuator command
inline constexpr int kRegReportConc = 3;   // controller -> DM report
inline constexpr int kRegSetpoint = 4;     // HMI -> controller parameter
inline constexpr int kRegMode = 5;         // HMI -> controller AUTO/MANUAL
inline constexpr int kRegManualFlow = 6;   // HMI -> controller manual output
inline constexpr int kRegTrip = 7;         // trip command / broadcast

struct Frame {
  double ts = 0.0;
  std::int64_t seq = 0;  // per-link monotone counter
  NodeId src = NodeId::SENSOR;
  NodeId dst = NodeId::CONTROLLER;
  Proto proto = Proto::POLLPROTO;
  FnCode fn = FnCode::READ;
  int addr = 0;
  double value = 0.0;
  std::int64_t txn = 0;  // per-source transaction counter
  int attack_id = 0;     // 0 = none
};

/// One record per frame per capture point (sender side and receiver side).
struct CaptureRecord {
  NodeId capture_node = NodeId::CONTROLLER;
  Frame frame;
  std::int64_t order = 0;  // insertion tie-break, not serialized
};

/// Fixed topology (Fig.-2-style): the field devices speak POLLPROTO with the
/// controller, the decision-making nodes speak REPORTPROTO with it, the
/// corporate workstation reaches the HMI only, and the attacker can address
/// control-network nodes once on the network.
bool legal_edge(NodeId src, NodeId dst, Proto proto);

/// Slack for window-boundary comparisons on the simulation clock: grid
/// timestamps are exact multiples of dt in double arithmetic and may sit a
/// few ulp away from configured instants.
inline constexpr double kTimeEps = 1e-9;

enum class Disposition { DELIVERED, DROPPED, DELAYED };

struct Outcome {
  Disposition kind = Disposition::DELIVERED;
  Frame frame;            // possibly rewritten
  double deliver_at = 0;  // DELAYED only
};

/// MITM hook installed on a stream. `matches` selects frames; inside
/// [window_begin, window_end] `act` decides the outcome, outside it the
/// optional `observe` sees matching traffic (replay buffers record here).
struct Interceptor {
  int attack_id = 0;
  double window_begin = 0.0;
  double window_end = 0.0;
  std::function<bool(const Frame&)> matches;
  std::function<Outcome(const Frame&, double now)> act;
  std::function<void(const Frame&)> observe;
};

struct TrafficSchedule {
  double poll_period = 0.1;    // min
  double report_period = 0.2;  // min
  double jitter = 0.0;         // kept at zero: attacks are the only timing anomalies

  void validate() const;
};

struct Delivery {
  Disposition kind = Disposition::DELIVERED;
  Frame frame;            // as seen by the receiver (DELIVERED/DELAYED)
  double deliver_at = 0;  // DELAYED only
};

/// Owns sequence/transaction counters, the interceptor chain, and the
/// capture log. Delivery is instantaneous (zero latency) and writes the
/// sender-side record before interception and the receiver-side record
/// after it, so a hand-off modified in flight shows both values.
class Network {
 public:
  /// Builds a frame and assigns per-link seq / per-source txn counters.
  /// The claimed source drives both counters, which is what makes injected
  /// spoofed traffic byte-compatible with the legitimate pattern.
  Frame make_frame(double ts, NodeId src, NodeId dst, Proto proto, FnCode fn,
                   int addr, double value, int attack_id = 0);

  /// Runs the interceptor chain and writes captures. Throws RoutingError
  /// for frames addressed along a non-edge.
  Delivery deliver(const Frame& f);

  /// Receiver-side delivery of an already-intercepted frame (late data).
  void deliver_direct(const Frame& f);

  void add_interceptor(Interceptor ic);

  const std::vector<CaptureRecord>& capture() const { return capture_; }
  std::vector<CaptureRecord> sorted_capture() const;

 private:
  std::map<std::pair<NodeId, NodeId>, std::int64_t> link_seq_;
  std::map<NodeId, std::int64_t> src_txn_;
  std::vector<Interceptor> chain_;
  std::vector<CaptureRecord> capture_;
  std::int64_t order_ = 0;

  void record(NodeId point, const Frame& f);
};

/// Frame timeline for one window driven by value callbacks: every poll tick
/// emits the sensor read-response and the actuator write, every report tick
/// one report write per decision-making node. Ticks lie on the fixed grid;
/// the window end is exclusive.
struct TickValues {
  std::function<double(double t)> sensor_value;
  std::function<double(double t)> actuator_value;
  std::function<double(double t)> report_value;
};

void run_traffic_schedule(const TrafficSchedule& sched, double t0, double t1,
                          Network& net, const TickValues& values);

/// JSON-lines serialization with a fixed field order and 9-significant-digit
/// floats; records sorted by (ts, capture node, seq).
std::string capture_line(const CaptureRecord& r);
void export_capture(const std::vector<CaptureRecord>& records,
                    std::ostream& out);

}  // namespace cpsgen::netsim
