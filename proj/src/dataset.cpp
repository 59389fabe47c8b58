#include "cpsgen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cpsgen/rng.hpp"
#include "cpsgen/scenario.hpp"
#include "json.hpp"

namespace cpsgen::dataset {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

bool close(double a, double b, double eps) { return std::abs(a - b) <= eps; }

bool same_key(const LabeledRecord& a, const LabeledRecord& b, double eps) {
  return close(a.u, b.u, eps) && close(a.y, b.y, eps) && close(a.d, b.d, eps) &&
         a.auto_flag == b.auto_flag && a.label == b.label;
}

bool bitwise_tail(const LabeledRecord& head, const LabeledRecord& tail) {
  return head.u == tail.u && head.y == tail.y && head.d == tail.d &&
         head.y_true == tail.y_true && head.auto_flag == tail.auto_flag &&
         head.label == tail.label;
}

}  // namespace

CompressedRecords deduplicate(const std::vector<LabeledRecord>& records,
                              double eps, double dt) {
  CompressedRecords out;
  out.dt = dt;
  if (records.empty()) return out;

  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(records[i].t > records[i - 1].t)) {
      throw RangeError("deduplicate: records must be sorted by t");
    }
  }
  out.stride_steps =
      records.size() > 1 ? records[1].step - records[0].step : 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].step - records[i - 1].step != out.stride_steps) {
      throw RangeError("deduplicate: records must have a uniform step stride");
    }
  }

  std::size_t i = 0;
  while (i < records.size()) {
    LabeledRecord head = records[i];
    head.run_length = 1;
    std::size_t j = i + 1;
    while (j < records.size() && same_key(head, records[j], eps)) {
      if (!bitwise_tail(head, records[j])) out.residuals.push_back(records[j]);
      ++head.run_length;
      ++j;
    }
    out.runs.push_back(head);
    i = j;
  }
  return out;
}

std::vector<LabeledRecord> expand(const CompressedRecords& c) {
  std::map<std::int64_t, const LabeledRecord*> residual_by_step;
  for (const auto& r : c.residuals) residual_by_step[r.step] = &r;

  std::vector<LabeledRecord> out;
  for (const auto& run : c.runs) {
    for (std::int64_t j = 0; j < run.run_length; ++j) {
      const std::int64_t step = run.step + j * c.stride_steps;
      auto it = residual_by_step.find(step);
      if (j > 0 && it != residual_by_step.end()) {
        LabeledRecord r = *it->second;
        r.run_length = 1;
        out.push_back(r);
        continue;
      }
      LabeledRecord r = run;
      r.run_length = 1;
      r.step = step;
      r.t = static_cast<double>(step) * c.dt;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<TimelineEntry> merge_logs(
    const std::vector<LabeledRecord>& physical,
    const std::vector<netsim::CaptureRecord>& capture,
    const std::vector<hostlog::HostEvent>& host, double duration) {
  const auto check_ts = [&](double ts, const char* what) {
    if (!std::isfinite(ts) || ts < 0.0 || ts > duration + 1e-9) {
      throw SyncError(std::string(what) +
                      " timestamp off the scenario clock: " + g9(ts));
    }
  };

  std::vector<TimelineEntry> out;
  out.reserve(physical.size() + capture.size() + host.size());
  for (const auto& r : physical) {
    check_ts(r.t, "physical record");
    TimelineEntry e;
    e.ts = r.t;
    e.source = SourceKind::PHYSICAL;
    e.node = "CONTROLLER";
    e.seq = r.step;
    e.summary = "sample u=" + g9(r.u) + " y=" + g9(r.y);
    out.push_back(std::move(e));
  }
  for (const auto& c : capture) {
    check_ts(c.frame.ts, "capture record");
    TimelineEntry e;
    e.ts = c.frame.ts;
    e.source = SourceKind::FRAME;
    e.node = netsim::to_string(c.capture_node);
    e.seq = c.order;
    e.summary = std::string(netsim::to_string(c.frame.src)) + ">" +
                netsim::to_string(c.frame.dst) + " " +
                netsim::to_string(c.frame.fn) + " v=" + g9(c.frame.value);
    out.push_back(std::move(e));
  }
  for (const auto& h : host) {
    check_ts(h.ts, "host event");
    TimelineEntry e;
    e.ts = h.ts;
    e.source = SourceKind::HOST;
    e.node = netsim::to_string(h.node);
    e.seq = h.seq;
    e.summary = std::string(hostlog::to_string(h.kind)) + " " + h.detail;
    out.push_back(std::move(e));
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const TimelineEntry& a, const TimelineEntry& b) {
                     if (a.ts != b.ts) return a.ts < b.ts;
                     if (a.source != b.source) return a.source < b.source;
                     if (a.node != b.node) return a.node < b.node;
                     return a.seq < b.seq;
                   });
  return out;
}

BalanceStats balance_report(const std::vector<LabeledRecord>& expanded,
                            double sample_period) {
  BalanceStats st;
  for (const auto& r : expanded) {
    st.total_records += 1;
    if (r.label.attack_id != 0) {
      st.attack_records += 1;
      st.attack_duration_min[r.label.attack_id] += sample_period;
    }
    st.per_label[{r.label.attack_id, plant::to_string(r.label.mode)}] += 1;
  }
  st.attack_fraction =
      st.total_records
          ? static_cast<double>(st.attack_records) / st.total_records
          : 0.0;
  return st;
}

SplitViews split_dataset(const std::vector<LabeledRecord>& records,
                         const std::vector<netsim::CaptureRecord>& capture,
                         const std::vector<hostlog::HostEvent>& host,
                         const std::vector<attacks::AttackSpec>& catalog,
                         double boundary_t) {
  std::set<int> zero_day;
  for (const auto& a : catalog) {
    if (a.zero_day) {
      zero_day.insert(a.id);
      if (a.t_end < boundary_t) {
        throw PlanningError("zero-day attack " + std::to_string(a.id) +
                            " is scheduled entirely inside the train range");
      }
    }
  }

  SplitViews v;
  v.boundary_t = boundary_t;
  for (const auto& r : records) {
    const bool zd = zero_day.count(r.label.attack_id) > 0;
    if (!zd && r.t < boundary_t) {
      v.train_records.push_back(r);
    } else {
      v.test_records.push_back(r);
    }
  }
  for (const auto& c : capture) {
    const bool zd = zero_day.count(c.frame.attack_id) > 0;
    if (!zd && c.frame.ts < boundary_t) {
      v.train_capture.push_back(c);
    } else {
      v.test_capture.push_back(c);
    }
  }
  for (const auto& h : host) {
    const bool zd = zero_day.count(h.attack_id) > 0;
    if (!zd && h.ts < boundary_t) {
      v.train_host.push_back(h);
    } else {
      v.test_host.push_back(h);
    }
  }
  return v;
}

std::string physical_csv_line(const LabeledRecord& r) {
  std::string s;
  s.reserve(96);
  s += g9(r.t);
  s += ',';
  s += g9(r.u);
  s += ',';
  s += g9(r.y);
  s += ',';
  s += g9(r.d);
  s += ',';
  s += r.auto_flag ? '1' : '0';
  s += ',';
  s += std::to_string(r.label.attack_id);
  s += ',';
  s += plant::to_string(r.label.mode);
  s += ',';
  s += std::to_string(r.run_length);
  return s;
}

std::string truth_csv_line(const LabeledRecord& r) {
  std::string s;
  s.reserve(96);
  s += g9(r.t);
  s += ',';
  s += g9(r.u);
  s += ',';
  s += g9(r.y);
  s += ',';
  s += g9(r.d);
  s += ',';
  s += r.auto_flag ? '1' : '0';
  s += ',';
  s += std::to_string(r.label.attack_id);
  s += ',';
  s += plant::to_string(r.label.mode);
  s += ',';
  s += g9(r.y_true);
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fnv64_hex(const std::string& bytes) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    rng::fnv1a64_bytes(bytes.data(), bytes.size())));
  return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

LabeledRecord record_from_fields(const std::vector<std::string>& f,
                                 bool truth_layout, const std::string& where) {
  if (f.size() != 8) {
    throw IoError(where + ": expected 8 columns, got " +
                  std::to_string(f.size()));
  }
  LabeledRecord r;
  r.t = std::strtod(f[0].c_str(), nullptr);
  r.u = std::strtod(f[1].c_str(), nullptr);
  r.y = std::strtod(f[2].c_str(), nullptr);
  r.d = std::strtod(f[3].c_str(), nullptr);
  if (f[4] != "0" && f[4] != "1") {
    throw IoError(where + ": auto_flag must be 0 or 1");
  }
  r.auto_flag = f[4] == "1";
  r.label.attack_id = std::atoi(f[5].c_str());
  r.label.mode = plant::mode_from_string(f[6]);
  if (truth_layout) {
    r.y_true = std::strtod(f[7].c_str(), nullptr);
  } else {
    r.run_length = std::atoll(f[7].c_str());
    if (r.run_length < 1) throw IoError(where + ": run_length must be >= 1");
  }
  return r;
}

std::vector<LabeledRecord> read_records(const std::string& path,
                                        bool truth_layout,
                                        const char* header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  int line_no = 0;
  std::vector<LabeledRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) {
        throw IoError(path + ":1: unexpected header '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    out.push_back(record_from_fields(split_csv(line), truth_layout,
                                     path + ":" + std::to_string(line_no)));
  }
  return out;
}

}  // namespace

std::vector<LabeledRecord> read_physical_csv(const std::string& path) {
  return read_records(path, false, kPhysicalHeader);
}

std::vector<LabeledRecord> read_truth_csv(const std::string& path) {
  return read_records(path, true, kTruthHeader);
}

std::vector<netsim::CaptureRecord> read_capture_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<netsim::CaptureRecord> out;
  std::string line;
  int line_no = 0;
  std::int64_t order = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    netsim::CaptureRecord r;
    r.capture_node = netsim::node_from_string(j.at("capture_node"));
    r.frame.ts = j.at("ts");
    r.frame.seq = j.at("seq");
    r.frame.src = netsim::node_from_string(j.at("src"));
    r.frame.dst = netsim::node_from_string(j.at("dst"));
    const std::string proto = j.at("proto");
    r.frame.proto = proto == "POLLPROTO" ? netsim::Proto::POLLPROTO
                                         : netsim::Proto::REPORTPROTO;
    const std::string fn = j.at("fn_code");
    r.frame.fn = fn == "READ"         ? netsim::FnCode::READ
                 : fn == "WRITE"      ? netsim::FnCode::WRITE
                                      : netsim::FnCode::TRIP_BCAST;
    r.frame.addr = j.at("addr");
    r.frame.value = j.at("value");
    r.frame.txn = j.at("txn");
    r.frame.attack_id = j.at("attack_id");
    r.order = order++;
    out.push_back(r);
  }
  return out;
}

std::vector<hostlog::HostEvent> read_host_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<hostlog::HostEvent> out;
  std::string line;
  int line_no = 0;
  std::int64_t seq = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    hostlog::HostEvent e;
    e.ts = j.at("ts");
    e.node = netsim::node_from_string(j.at("node"));
    e.kind = hostlog::event_kind_from_string(j.at("kind"));
    e.actor = j.at("actor");
    e.detail = j.at("detail");
    e.attack_id = j.at("attack_id");
    e.seq = seq++;
    out.push_back(e);
  }
  return out;
}

namespace {

nlohmann::ordered_json record_json(const LabeledRecord& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["t"] = r.t;
  j["u"] = r.u;
  j["y"] = r.y;
  j["d"] = r.d;
  j["auto_flag"] = r.auto_flag;
  j["y_true"] = r.y_true;
  j["attack_id"] = r.label.attack_id;
  j["mode"] = plant::to_string(r.label.mode);
  j["run_length"] = r.run_length;
  return j;
}

LabeledRecord record_from_json(const nlohmann::json& j) {
  LabeledRecord r;
  r.step = j.at("step");
  r.t = j.at("t");
  r.u = j.at("u");
  r.y = j.at("y");
  r.d = j.at("d");
  r.auto_flag = j.at("auto_flag");
  r.y_true = j.at("y_true");
  r.label.attack_id = j.at("attack_id");
  r.label.mode = plant::mode_from_string(j.at("mode"));
  r.run_length = j.at("run_length");
  return r;
}

nlohmann::ordered_json spec_json(const attacks::AttackSpec& a) {
  nlohmann::ordered_json j;
  j["id"] = a.id;
  j["kind"] = attacks::to_string(a.kind);
  j["point"] = attacks::to_string(a.point);
  j["action"] = attacks::to_string(a.action);
  j["waveform"] = attacks::to_string(a.waveform.kind);
  j["magnitude"] = a.waveform.magnitude;
  j["rate"] = a.waveform.rate;
  j["threshold"] = a.waveform.threshold;
  j["wave_duration"] = a.waveform.duration;
  j["t_start"] = a.t_start;
  j["t_end"] = a.t_end;
  j["zero_day"] = a.zero_day;
  j["dos_rate"] = a.dos_rate;
  j["log_wipe"] = a.log_wipe;
  j["true_manipulation"] = a.true_manipulation;
  j["report_policy"] = attacks::to_string(a.report_policy);
  j["report_waveform"] = attacks::to_string(a.report_waveform.kind);
  j["report_magnitude"] = a.report_waveform.magnitude;
  j["report_rate"] = a.report_waveform.rate;
  j["report_duration"] = a.report_waveform.duration;
  auto targets = nlohmann::ordered_json::array();
  for (auto dm : a.dm_targets) targets.push_back(netsim::to_string(dm));
  j["dm_targets"] = targets;
  auto steps = nlohmann::ordered_json::array();
  for (const auto& st : a.steps) {
    steps.push_back(scenario::format_vector_step(st));
  }
  j["vector"] = steps;
  return j;
}

attacks::AttackSpec spec_from_json(const nlohmann::json& j) {
  attacks::AttackSpec a;
  a.id = j.at("id");
  a.kind = attacks::attack_kind_from_string(j.at("kind"));
  a.point = attacks::injection_point_from_string(j.at("point"));
  a.action = attacks::attack_action_from_string(j.at("action"));
  a.waveform.kind = attacks::wave_kind_from_string(j.at("waveform"));
  a.waveform.magnitude = j.at("magnitude");
  a.waveform.rate = j.at("rate");
  a.waveform.threshold = j.at("threshold");
  a.waveform.duration = j.at("wave_duration");
  a.t_start = j.at("t_start");
  a.t_end = j.at("t_end");
  a.zero_day = j.at("zero_day");
  a.dos_rate = j.at("dos_rate");
  a.log_wipe = j.at("log_wipe");
  a.true_manipulation = j.at("true_manipulation");
  a.report_policy = attacks::report_policy_from_string(j.at("report_policy"));
  a.report_waveform.kind =
      attacks::wave_kind_from_string(j.at("report_waveform"));
  a.report_waveform.magnitude = j.at("report_magnitude");
  a.report_waveform.rate = j.at("report_rate");
  a.report_waveform.duration = j.at("report_duration");
  for (const auto& t : j.at("dm_targets")) {
    a.dm_targets.push_back(netsim::node_from_string(t));
  }
  for (const auto& s : j.at("vector")) {
    a.steps.push_back(scenario::parse_vector_step(s));
  }
  return a;
}

nlohmann::ordered_json balance_json(const BalanceStats& b) {
  nlohmann::ordered_json j;
  j["total_records"] = b.total_records;
  j["attack_records"] = b.attack_records;
  j["attack_fraction"] = b.attack_fraction;
  auto labels = nlohmann::ordered_json::array();
  for (const auto& [key, count] : b.per_label) {
    nlohmann::ordered_json item;
    item["attack_id"] = key.first;
    item["mode"] = key.second;
    item["count"] = count;
    labels.push_back(item);
  }
  j["per_label"] = labels;
  auto durations = nlohmann::ordered_json::array();
  for (const auto& [id, dur] : b.attack_duration_min) {
    nlohmann::ordered_json item;
    item["attack_id"] = id;
    item["duration_min"] = dur;
    durations.push_back(item);
  }
  j["attack_durations"] = durations;
  return j;
}

BalanceStats balance_from_json(const nlohmann::json& j) {
  BalanceStats b;
  b.total_records = j.at("total_records");
  b.attack_records = j.at("attack_records");
  b.attack_fraction = j.at("attack_fraction");
  for (const auto& item : j.at("per_label")) {
    b.per_label[{item.at("attack_id"), item.at("mode")}] = item.at("count");
  }
  for (const auto& item : j.at("attack_durations")) {
    b.attack_duration_min[item.at("attack_id")] = item.at("duration_min");
  }
  return b;
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "cpsgen-dataset-v1";
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["duration"] = m.duration;
  j["dt"] = m.dt;
  j["sample_stride"] = m.sample_stride;
  j["sample_period"] = m.sample_period;
  j["split_boundary"] = m.split_boundary;
  j["zero_day_ids"] = m.zero_day_ids;
  j["truth_emitted"] = m.truth_emitted;

  auto catalog = nlohmann::ordered_json::array();
  for (const auto& a : m.catalog) catalog.push_back(spec_json(a));
  j["attack_catalog"] = catalog;

  auto modes = nlohmann::ordered_json::array();
  for (const auto& [t, mode] : m.mode_schedule) {
    nlohmann::ordered_json item;
    item["t"] = t;
    item["mode"] = mode;
    modes.push_back(item);
  }
  j["mode_schedule"] = modes;

  j["balance"]["train"] = balance_json(m.train_balance);
  j["balance"]["test"] = balance_json(m.test_balance);

  auto checks = nlohmann::ordered_json::object();
  for (const auto& [path, sum] : m.checksums) checks[path] = sum;
  j["checksums"] = checks;

  auto residuals = nlohmann::ordered_json::object();
  auto train_res = nlohmann::ordered_json::array();
  for (const auto& r : m.train_residuals) train_res.push_back(record_json(r));
  auto test_res = nlohmann::ordered_json::array();
  for (const auto& r : m.test_residuals) test_res.push_back(record_json(r));
  residuals["train"] = train_res;
  residuals["test"] = test_res;
  j["expansion_residuals"] = residuals;

  j["scenario_text"] = m.scenario_text;
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(std::string("manifest parse failure: ") + e.what());
  }
  Manifest m;
  m.config_hash = j.at("config_hash");
  m.seed = j.at("seed");
  m.duration = j.at("duration");
  m.dt = j.at("dt");
  m.sample_stride = j.at("sample_stride");
  m.sample_period = j.at("sample_period");
  m.split_boundary = j.at("split_boundary");
  for (const auto& id : j.at("zero_day_ids")) m.zero_day_ids.push_back(id);
  m.truth_emitted = j.at("truth_emitted");
  for (const auto& a : j.at("attack_catalog")) {
    m.catalog.push_back(spec_from_json(a));
  }
  for (const auto& item : j.at("mode_schedule")) {
    m.mode_schedule.emplace_back(item.at("t"), item.at("mode"));
  }
  m.train_balance = balance_from_json(j.at("balance").at("train"));
  m.test_balance = balance_from_json(j.at("balance").at("test"));
  for (const auto& [path, sum] : j.at("checksums").items()) {
    m.checksums[path] = sum;
  }
  for (const auto& r : j.at("expansion_residuals").at("train")) {
    m.train_residuals.push_back(record_from_json(r));
  }
  for (const auto& r : j.at("expansion_residuals").at("test")) {
    m.test_residuals.push_back(record_from_json(r));
  }
  m.scenario_text = j.at("scenario_text");
  return m;
}

RunView load_run_view(const std::string& dir) {
  namespace fs = std::filesystem;
  RunView v;
  v.manifest = manifest_from_json(read_text_file(dir + "/manifest.json"));

  const double dt = v.manifest.dt;
  const std::int64_t stride = v.manifest.sample_stride;
  const auto load_view = [&](const std::string& sub,
                             const std::vector<LabeledRecord>& residuals) {
    CompressedRecords c;
    c.runs = read_physical_csv(dir + "/" + sub + "/physical.csv");
    c.stride_steps = stride;
    c.dt = dt;
    c.residuals = residuals;
    // Recover step indices from timestamps before expanding.
    for (auto& r : c.runs) {
      r.step = static_cast<std::int64_t>(std::llround(r.t / dt));
      r.t = static_cast<double>(r.step) * dt;
    }
    for (auto& r : c.residuals) r.t = static_cast<double>(r.step) * dt;
    std::vector<LabeledRecord> expanded = expand(c);
    v.records.insert(v.records.end(), expanded.begin(), expanded.end());
    auto cap = read_capture_jsonl(dir + "/" + sub + "/capture.jsonl");
    v.capture.insert(v.capture.end(), cap.begin(), cap.end());
    auto host = read_host_jsonl(dir + "/" + sub + "/host.jsonl");
    v.host.insert(v.host.end(), host.begin(), host.end());
  };
  load_view("train", v.manifest.train_residuals);
  load_view("test", v.manifest.test_residuals);

  std::stable_sort(v.records.begin(), v.records.end(),
                   [](const LabeledRecord& a, const LabeledRecord& b) {
                     return a.step < b.step;
                   });

  if (v.manifest.truth_emitted && fs::exists(dir + "/truth.csv")) {
    auto truth = read_truth_csv(dir + "/truth.csv");
    std::map<double, double> y_true_by_t;
    for (const auto& r : truth) y_true_by_t[r.t] = r.y_true;
    for (auto& r : v.records) {
      auto it = y_true_by_t.find(r.t);
      if (it != y_true_by_t.end()) r.y_true = it->second;
    }
  } else {
    for (auto& r : v.records) r.y_true = r.y;
  }
  return v;
}

}  // namespace cpsgen::dataset
