#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpsgen/attacks.hpp"
#include "cpsgen/hostlog.hpp"
#include "cpsgen/netsim.hpp"
#include "cpsgen/plant.hpp"

namespace cpsgen::dataset {

/// Per-record annotation: the unique id of the attack the record belongs to
/// (0 = none) and the plant operating mode.
struct Label {
  int attack_id = 0;
  plant::SystemMode mode = plant::SystemMode::NORMAL;

  bool operator==(const Label&) const = default;
};

/// One physical sample. `y` is the reported measurement (the value the
/// decision-making layer logs, malicious during stealthy windows); `y_true`
/// is the honest sensor reading kept in the ground-truth sidecar. Timestamps
/// derive from the integration step so they regenerate bit-exactly.
struct LabeledRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double u = 0.0;  // actuator command as delivered over the last interval
  double y = 0.0;
  double d = 0.0;  // measurable disturbance (inlet concentration)
  bool auto_flag = true;
  double y_true = 0.0;
  Label label;
  std::int64_t run_length = 1;
};

/// Released records plus everything needed for exact reconstruction. Tails
/// that are bit-identical to their run head need no residuals; anything that
/// merged merely within tolerance is kept verbatim on the side.
struct CompressedRecords {
  std::vector<LabeledRecord> runs;
  std::int64_t stride_steps = 0;
  double dt = 0.0;
  std::vector<LabeledRecord> residuals;
};

/// Collapses maximal runs of records identical in (u, y, d, auto_flag,
/// label) within eps. Input must be sorted by t with a uniform step stride;
/// dt is the grid the timestamps derive from (t = step * dt).
CompressedRecords deduplicate(const std::vector<LabeledRecord>& records,
                              double eps, double dt);
std::vector<LabeledRecord> expand(const CompressedRecords& c);

inline constexpr double kDedupEps = 1e-9;

enum class SourceKind { PHYSICAL = 0, FRAME = 1, HOST = 2 };

struct TimelineEntry {
  double ts = 0.0;
  SourceKind source = SourceKind::PHYSICAL;
  std::string node;
  std::int64_t seq = 0;
  std::string summary;
};

/// Unified event stream over the shared scenario clock, sorted by
/// (ts, source kind, node, seq). Throws SyncError when a source carries
/// timestamps outside [0, duration].
std::vector<TimelineEntry> merge_logs(
    const std::vector<LabeledRecord>& physical,
    const std::vector<netsim::CaptureRecord>& capture,
    const std::vector<hostlog::HostEvent>& host, double duration);

struct BalanceStats {
  std::int64_t total_records = 0;
  std::int64_t attack_records = 0;
  double attack_fraction = 0.0;
  std::map<std::pair<int, std::string>, std::int64_t> per_label;
  std::map<int, double> attack_duration_min;
};

BalanceStats balance_report(const std::vector<LabeledRecord>& expanded,
                            double sample_period);

struct SplitViews {
  std::vector<LabeledRecord> train_records;
  std::vector<LabeledRecord> test_records;
  std::vector<netsim::CaptureRecord> train_capture;
  std::vector<netsim::CaptureRecord> test_capture;
  std::vector<hostlog::HostEvent> train_host;
  std::vector<hostlog::HostEvent> test_host;
  double boundary_t = 0.0;
};

/// Temporal split at boundary_t with the zero-day override: anything labeled
/// with a zero-day attack id lands in the test view regardless of time.
/// A zero-day attack confined entirely to the train range is a planning
/// error surfaced here.
SplitViews split_dataset(const std::vector<LabeledRecord>& records,
                         const std::vector<netsim::CaptureRecord>& capture,
                         const std::vector<hostlog::HostEvent>& host,
                         const std::vector<attacks::AttackSpec>& catalog,
                         double boundary_t);

struct Manifest {
  std::string scenario_text;
  std::string config_hash;
  std::uint64_t seed = 0;
  double duration = 0.0;
  double dt = 0.0;
  std::int64_t sample_stride = 0;
  double sample_period = 0.0;
  std::vector<attacks::AttackSpec> catalog;
  std::vector<std::pair<double, std::string>> mode_schedule;
  double split_boundary = 0.0;
  std::vector<int> zero_day_ids;
  BalanceStats train_balance;
  BalanceStats test_balance;
  std::map<std::string, std::string> checksums;  // relative path -> fnv64 hex
  std::vector<LabeledRecord> train_residuals;
  std::vector<LabeledRecord> test_residuals;
  bool truth_emitted = false;
};

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

// --- serialization ---------------------------------------------------------

inline constexpr const char* kPhysicalHeader =
    "t,u,y,d,auto_flag,attack_id,mode,run_length";
inline constexpr const char* kTruthHeader =
    "t,u,y,d,auto_flag,attack_id,mode,y_true";

std::string physical_csv_line(const LabeledRecord& r);
std::string truth_csv_line(const LabeledRecord& r);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
std::string fnv64_hex(const std::string& bytes);

std::vector<LabeledRecord> read_physical_csv(const std::string& path);
std::vector<LabeledRecord> read_truth_csv(const std::string& path);
std::vector<netsim::CaptureRecord> read_capture_jsonl(const std::string& path);
std::vector<hostlog::HostEvent> read_host_jsonl(const std::string& path);

/// Everything one run produced, reloaded from a dataset directory (train and
/// test views concatenated in time order, y_true folded in from the sidecar
/// when present).
struct RunView {
  std::vector<LabeledRecord> records;  // expanded
  std::vector<netsim::CaptureRecord> capture;
  std::vector<hostlog::HostEvent> host;
  Manifest manifest;
};

RunView load_run_view(const std::string& dir);

}  // namespace cpsgen::dataset
