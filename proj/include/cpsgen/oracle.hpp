#pragma once

#include <array>
#include <string>
#include <vector>

#include "cpsgen/control.hpp"
#include "cpsgen/dataset.hpp"
#include "cpsgen/plant.hpp"

namespace cpsgen::oracle {

struct TraceSample {
  double t = 0.0;
  double u = 0.0;
  double y = 0.0;
  double d = 0.0;
  bool auto_flag = true;
};

using TraceWindow = std::vector<TraceSample>;

TraceWindow window_from_records(const std::vector<dataset::LabeledRecord>& rs,
                                std::size_t first, std::size_t count);

enum class TraceVerdict { NORMAL, FAILURE, ATTACK, ATTACK_OR_FAILURE, UNTRACEABLE };
const char* to_string(TraceVerdict v);

struct TraceCheck {
  TraceVerdict verdict = TraceVerdict::NORMAL;
  double model_residual = 0.0;    // max |simulated - reported| over the window
  double control_residual = 0.0;  // max |predicted u - logged u|
};

/// Model-based reference detector over one uniformly sampled window.
/// The plant check simulates the healthy model from the window's first
/// sample (full state is measured for this one-state process) driving it
/// with the logged commands and disturbances; the controller check replays
/// the control law against the logged measurements, seeding the integral
/// from the first transition. The four verdicts follow the satisfied /
/// violated combinations; windows containing a non-AUTO sample are
/// UNTRACEABLE. Windows shorter than two samples are rejected.
///
/// Because the integral state is reconstructed from the data, a command
/// offset that is constant across the whole window is absorbed by the seed
/// (it is indistinguishable from a different integral history). Windows
/// should span the suspected onset.
TraceCheck classify_trace(const TraceWindow& w, const plant::PlantParams& model,
                          const control::ControllerConfig& law, double tol_m,
                          double tol_a);

inline double default_tol_m(const plant::PlantParams& p) {
  return 3.0 * p.noise_std + 1e-4;
}
inline constexpr double kDefaultTolA = 1e-6;

enum class DetectorVariant { PHY, PHY_NET, PHY_NET_HOST };
const char* to_string(DetectorVariant v);

enum class Cell { TN, FN, TP, FP };
const char* to_string(Cell c);

/// 2x3 decision matrix for the operator-command scenario trio. Rows: true
/// state Normal / Attack; columns: detector trained on physical data,
/// physical+network, physical+network+host. The first two detectors compare
/// against the legitimate run as their normal baseline; the host-aware
/// detector flags command traffic lacking a matching operator session as
/// well as compromise artifacts. Requires all three runs; throws Error when
/// the trio is incomplete or the two attack runs disagree.
using DecisionMatrix = std::array<std::array<Cell, 3>, 2>;
DecisionMatrix ids_decision_matrix(const dataset::RunView& legit,
                                   const dataset::RunView& compromised,
                                   const dataset::RunView& spoofed);

/// Outcome of a run under the reporting-tamper grid: whether a protective
/// intervention (local or remote trip) happened and whether the true state
/// actually left the safe envelope.
enum class RunOutcome { NORMAL_OPERATION, DM_INTERVENTION, FUTILE_INTERVENTION, HAZARD };
const char* to_string(RunOutcome o);

RunOutcome classify_run_outcome(const dataset::RunView& run,
                                double alarm_threshold, double haz_threshold);

/// Per-window verdicts for a whole record stream, fixed window length.
struct WindowVerdict {
  double t_begin = 0.0;
  double t_end = 0.0;
  TraceVerdict verdict = TraceVerdict::NORMAL;
  double model_residual = 0.0;
  double control_residual = 0.0;
};

std::vector<WindowVerdict> classify_records(
    const std::vector<dataset::LabeledRecord>& records,
    const plant::PlantParams& model, const control::ControllerConfig& law,
    double tol_m, double tol_a, std::size_t window_len);

}  // namespace cpsgen::oracle
