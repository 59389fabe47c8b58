#pragma once

#include <string>
#include <vector>

#include "cpsgen/dataset.hpp"
#include "cpsgen/engine.hpp"
#include "cpsgen/scenario.hpp"

namespace cpsgen::runner {

/// Full pipeline for one scenario: simulate, label, split, deduplicate and
/// write the dataset layout
///   out/{train,test}/{physical.csv, capture.jsonl, host.jsonl}
///   out/truth.csv (only when the run contains attacks)
///   out/manifest.json
/// On failure every file written so far is removed. Returns the manifest.
dataset::Manifest run_scenario(const scenario::ScenarioConfig& cfg,
                               const std::string& out_dir);

struct ValidationReport {
  std::vector<std::string> violations;
  dataset::BalanceStats train_balance;
  dataset::BalanceStats test_balance;

  bool ok() const { return violations.empty(); }
};

/// Offline quality gate over an emitted dataset directory: label
/// completeness, timestamp monotonicity, checksum integrity, split
/// soundness and dedup invertibility.
ValidationReport validate_dataset(const std::string& dir);

std::string balance_summary(const dataset::BalanceStats& b);

}  // namespace cpsgen::runner
