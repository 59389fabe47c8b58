#include "cpsgen/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "cpsgen/rng.hpp"

namespace cpsgen::runner {

namespace fs = std::filesystem;

namespace {

std::string capture_text(const std::vector<netsim::CaptureRecord>& records) {
  std::ostringstream out;
  netsim::export_capture(records, out);
  return out.str();
}

std::string host_text(const std::vector<hostlog::HostEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += hostlog::host_line(e);
    out += '\n';
  }
  return out;
}

std::string physical_text(const std::vector<dataset::LabeledRecord>& runs) {
  std::string out = dataset::kPhysicalHeader;
  out += '\n';
  for (const auto& r : runs) {
    out += dataset::physical_csv_line(r);
    out += '\n';
  }
  return out;
}

std::string truth_text(const std::vector<dataset::LabeledRecord>& records) {
  std::string out = dataset::kTruthHeader;
  out += '\n';
  for (const auto& r : records) {
    out += dataset::truth_csv_line(r);
    out += '\n';
  }
  return out;
}

}  // namespace

dataset::Manifest run_scenario(const scenario::ScenarioConfig& cfg,
                               const std::string& out_dir) {
  std::vector<std::string> written;
  const auto emit = [&](const std::string& rel, const std::string& content) {
    const std::string path = out_dir + "/" + rel;
    dataset::write_text_file(path, content);
    written.push_back(path);
  };

  try {
    engine::RunArtifacts art = engine::simulate(cfg);

    for (const auto& r : art.records) {
      if (r.label.attack_id < 0) {
        throw Error("unlabeled record at t=" + std::to_string(r.t));
      }
    }

    const double boundary = cfg.duration * cfg.split.train_fraction;
    dataset::SplitViews views = dataset::split_dataset(
        art.records, art.capture, art.host, art.executed, boundary);

    dataset::CompressedRecords train_c =
        dataset::deduplicate(views.train_records, dataset::kDedupEps,
                             cfg.plant_params.dt);
    dataset::CompressedRecords test_c =
        dataset::deduplicate(views.test_records, dataset::kDedupEps,
                             cfg.plant_params.dt);

    dataset::Manifest m;
    m.scenario_text = scenario::emit_scenario_text(cfg);
    m.config_hash = dataset::fnv64_hex(m.scenario_text);
    m.seed = cfg.seed;
    m.duration = cfg.duration;
    m.dt = cfg.plant_params.dt;
    m.sample_stride = static_cast<std::int64_t>(
        std::llround(cfg.traffic.poll_period / cfg.plant_params.dt));
    m.sample_period = cfg.traffic.poll_period;
    m.catalog = art.executed;
    for (const auto& [t, mode] : art.mode_schedule) {
      m.mode_schedule.emplace_back(t, plant::to_string(mode));
    }
    m.split_boundary = boundary;
    for (const auto& a : art.executed) {
      if (a.zero_day) m.zero_day_ids.push_back(a.id);
    }
    m.train_balance =
        dataset::balance_report(views.train_records, m.sample_period);
    m.test_balance =
        dataset::balance_report(views.test_records, m.sample_period);
    m.train_residuals = train_c.residuals;
    m.test_residuals = test_c.residuals;
    m.truth_emitted = !art.executed.empty();

    fs::create_directories(out_dir + "/train");
    fs::create_directories(out_dir + "/test");

    const std::map<std::string, std::string> files = {
        {"train/physical.csv", physical_text(train_c.runs)},
        {"train/capture.jsonl", capture_text(views.train_capture)},
        {"train/host.jsonl", host_text(views.train_host)},
        {"test/physical.csv", physical_text(test_c.runs)},
        {"test/capture.jsonl", capture_text(views.test_capture)},
        {"test/host.jsonl", host_text(views.test_host)},
    };
    for (const auto& [rel, content] : files) {
      m.checksums[rel] = dataset::fnv64_hex(content);
    }
    if (m.truth_emitted) {
      const std::string truth = truth_text(art.records);
      m.checksums["truth.csv"] = dataset::fnv64_hex(truth);
      emit("truth.csv", truth);
    }
    for (const auto& [rel, content] : files) emit(rel, content);
    emit("manifest.json", dataset::manifest_to_json(m));
    return m;
  } catch (...) {
    std::error_code ec;
    for (const auto& path : written) fs::remove(path, ec);
    fs::remove(out_dir + "/train", ec);
    fs::remove(out_dir + "/test", ec);
    throw;
  }
}

namespace {

void check_monotone_capture(const std::vector<netsim::CaptureRecord>& capture,
                            const std::string& what,
                            std::vector<std::string>& violations) {
  for (std::size_t i = 1; i < capture.size(); ++i) {
    if (capture[i].frame.ts < capture[i - 1].frame.ts) {
      violations.push_back(what + ": timestamps regress at record " +
                           std::to_string(i));
      return;
    }
  }
}

}  // namespace

ValidationReport validate_dataset(const std::string& dir) {
  ValidationReport rep;
  auto& bad = rep.violations;

  dataset::Manifest m;
  try {
    m = dataset::manifest_from_json(dataset::read_text_file(dir + "/manifest.json"));
  } catch (const std::exception& e) {
    bad.push_back(std::string("manifest: ") + e.what());
    return rep;
  }

  // Checksums over the emitted bytes.
  for (const auto& [rel, expected] : m.checksums) {
    try {
      const std::string got = dataset::fnv64_hex(dataset::read_text_file(dir + "/" + rel));
      if (got != expected) {
        bad.push_back(rel + ": checksum mismatch (" + got + " != " + expected + ")");
      }
    } catch (const std::exception& e) {
      bad.push_back(rel + ": " + e.what());
    }
  }

  std::set<int> known_ids{0};
  for (const auto& a : m.catalog) known_ids.insert(a.id);
  std::set<int> zero_day(m.zero_day_ids.begin(), m.zero_day_ids.end());

  const auto check_view = [&](const std::string& sub,
                              const std::vector<dataset::LabeledRecord>& residuals,
                              dataset::BalanceStats& balance_out, bool is_train) {
    std::vector<dataset::LabeledRecord> runs;
    try {
      runs = dataset::read_physical_csv(dir + "/" + sub + "/physical.csv");
    } catch (const std::exception& e) {
      bad.push_back(std::string(e.what()));
      return;
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      auto& r = runs[i];
      const std::string where = sub + "/physical.csv record " + std::to_string(i);
      if (!known_ids.count(r.label.attack_id)) {
        bad.push_back(where + ": attack_id " + std::to_string(r.label.attack_id) +
                      " not in the manifest catalog");
      }
      if (is_train && zero_day.count(r.label.attack_id)) {
        bad.push_back(where + ": zero-day id in the train view");
      }
      if (i > 0 && !(r.t > runs[i - 1].t)) {
        bad.push_back(where + ": timestamps must strictly increase");
      }
      r.step = static_cast<std::int64_t>(std::llround(r.t / m.dt));
      r.t = static_cast<double>(r.step) * m.dt;
    }

    // Dedup invertibility: the released runs plus manifest residuals expand
    // into a strictly monotone full-resolution stream.
    dataset::CompressedRecords c;
    c.runs = runs;
    c.stride_steps = m.sample_stride;
    c.dt = m.dt;
    c.residuals = residuals;
    for (auto& r : c.residuals) r.t = static_cast<double>(r.step) * m.dt;
    std::vector<dataset::LabeledRecord> expanded;
    try {
      expanded = dataset::expand(c);
    } catch (const std::exception& e) {
      bad.push_back(sub + ": expansion failed: " + e.what());
      return;
    }
    for (std::size_t i = 1; i < expanded.size(); ++i) {
      if (!(expanded[i].t > expanded[i - 1].t)) {
        bad.push_back(sub + ": expanded stream is not monotone");
        break;
      }
    }
    balance_out = dataset::balance_report(expanded, m.sample_period);

    // Capture / host views.
    try {
      auto capture = dataset::read_capture_jsonl(dir + "/" + sub + "/capture.jsonl");
      check_monotone_capture(capture, sub + "/capture.jsonl", bad);
      for (const auto& cr : capture) {
        if (!known_ids.count(cr.frame.attack_id)) {
          bad.push_back(sub + "/capture.jsonl: unknown attack_id " +
                        std::to_string(cr.frame.attack_id));
          break;
        }
        if (is_train && zero_day.count(cr.frame.attack_id)) {
          bad.push_back(sub + "/capture.jsonl: zero-day id in the train view");
          break;
        }
      }
    } catch (const std::exception& e) {
      bad.push_back(std::string(e.what()));
    }
    try {
      auto host = dataset::read_host_jsonl(dir + "/" + sub + "/host.jsonl");
      for (std::size_t i = 1; i < host.size(); ++i) {
        if (host[i].ts < host[i - 1].ts) {
          bad.push_back(sub + "/host.jsonl: timestamps regress at record " +
                        std::to_string(i));
          break;
        }
      }
      for (const auto& e : host) {
        if (!known_ids.count(e.attack_id)) {
          bad.push_back(sub + "/host.jsonl: unknown attack_id " +
                        std::to_string(e.attack_id));
          break;
        }
        if (is_train && zero_day.count(e.attack_id)) {
          bad.push_back(sub + "/host.jsonl: zero-day id in the train view");
          break;
        }
      }
    } catch (const std::exception& e) {
      bad.push_back(std::string(e.what()));
    }
  };

  check_view("train", m.train_residuals, rep.train_balance, true);
  check_view("test", m.test_residuals, rep.test_balance, false);

  const auto close_stats = [](const dataset::BalanceStats& a,
                              const dataset::BalanceStats& b) {
    return a.total_records == b.total_records &&
           a.attack_records == b.attack_records &&
           std::abs(a.attack_fraction - b.attack_fraction) < 1e-12 &&
           a.per_label == b.per_label;
  };
  if (!close_stats(rep.train_balance, m.train_balance)) {
    bad.push_back("train balance statistics do not match the manifest");
  }
  if (!close_stats(rep.test_balance, m.test_balance)) {
    bad.push_back("test balance statistics do not match the manifest");
  }

  return rep;
}

std::string balance_summary(const dataset::BalanceStats& b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "records=%lld attack=%lld (%.2f%%)",
                static_cast<long long>(b.total_records),
                static_cast<long long>(b.attack_records),
                100.0 * b.attack_fraction);
  std::string out = buf;
  for (const auto& [key, count] : b.per_label) {
    std::snprintf(buf, sizeof(buf), "\n  label <%d,%s>: %lld", key.first,
                  key.second.c_str(), static_cast<long long>(count));
    out += buf;
  }
  for (const auto& [id, dur] : b.attack_duration_min) {
    std::snprintf(buf, sizeof(buf), "\n  attack %d: %.3f min", id, dur);
    out += buf;
  }
  return out;
}

}  // namespace cpsgen::runner
