#pragma once

#include <utility>
#include <vector>

#include "cpsgen/dataset.hpp"
#include "cpsgen/scenario.hpp"

namespace cpsgen::engine {

/// Everything one closed-loop run produces, before post-processing.
struct RunArtifacts {
  std::vector<dataset::LabeledRecord> records;  // per sample, y_true filled
  std::vector<netsim::CaptureRecord> capture;   // export order
  std::vector<hostlog::HostEvent> host;         // export order
  std::vector<attacks::AttackSpec> executed;    // explicit + planned + session
  std::vector<std::pair<double, plant::SystemMode>> mode_schedule;
  scenario::ScenarioConfig config;
};

/// Deterministic closed-loop simulation of one scenario: plant integration
/// on a fixed grid, controller and traffic on the poll/report cadence,
/// attack interception, host logging and labeling, all driven by the single
/// scenario seed. Identical (config, seed) produce identical artifacts.
RunArtifacts simulate(const scenario::ScenarioConfig& cfg);

}  // namespace cpsgen::engine
