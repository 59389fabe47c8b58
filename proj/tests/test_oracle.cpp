#include <cmath>
#include <random>

#include "cpsgen/engine.hpp"
#include "cpsgen/oracle.hpp"
#include "doctest.h"

using namespace cpsgen;
using oracle::TraceVerdict;
using oracle::TraceWindow;
using scenario::ScenarioConfig;

namespace {

ScenarioConfig quiet_cfg(double duration = 10.0) {
  ScenarioConfig cfg;
  cfg.duration = duration;
  cfg.seed = 33;
  cfg.plant_params.noise_std = 0.0;
  return cfg;
}

TraceWindow window_between(const engine::RunArtifacts& art, double t0,
                           double t1) {
  std::size_t first = 0;
  while (first < art.records.size() && art.records[first].t < t0) ++first;
  std::size_t last = first;
  while (last < art.records.size() && art.records[last].t <= t1) ++last;
  return oracle::window_from_records(art.records, first, last - first);
}

oracle::TraceCheck classify(const ScenarioConfig& cfg, const TraceWindow& w) {
  return oracle::classify_trace(w, cfg.plant_params, cfg.controller,
                                oracle::default_tol_m(cfg.plant_params),
                                oracle::kDefaultTolA);
}

dataset::RunView view_of(const engine::RunArtifacts& art) {
  dataset::RunView v;
  v.records = art.records;
  v.capture = art.capture;
  v.host = art.host;
  return v;
}

scenario::SessionConfig trio_session(scenario::SessionVariant variant) {
  scenario::SessionConfig s;
  s.operator_id = "op1";
  s.login = 5.0;
  s.logout = 6.0;
  s.mode_switch_at = 5.2;
  s.manual_u = 2.0;
  s.auto_return_at = 5.8;
  s.variant = variant;
  s.attack_id = variant == scenario::SessionVariant::LEGIT ? 0 : 1;
  return s;
}

}  // namespace

TEST_CASE("clean windows classify NORMAL even across a disturbance step") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.disturbances.push_back({3.0, 1.4});
  const auto art = engine::simulate(cfg);
  const auto check = classify(cfg, window_between(art, 2.0, 6.0));
  CHECK(check.verdict == TraceVerdict::NORMAL);
  CHECK(check.model_residual <= 1e-9);
  CHECK(check.control_residual <= 1e-9);
}

TEST_CASE("catalyst decay violates the plant model but not the law") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.faults.push_back({3.0, plant::FaultKind::F1_CAUSES, 0.5});
  const auto art = engine::simulate(cfg);
  const auto check = classify(cfg, window_between(art, 3.2, 6.0));
  CHECK(check.verdict == TraceVerdict::FAILURE);
  CHECK(check.model_residual > 0.01);
}

TEST_CASE("actuator spoofing with consistent sensor data is an attack") {
  ScenarioConfig cfg = quiet_cfg();
  attacks::AttackSpec s;
  s.id = 1;
  s.kind = attacks::AttackKind::INTEGRITY_SCA;
  s.point = attacks::InjectionPoint::ACTUATOR_CMD;
  s.action = attacks::AttackAction::MODIFY;
  s.waveform = {attacks::WaveKind::STEP, 0.5, 4.0, 0.0, 0.0};
  s.t_start = 3.0;
  s.t_end = 7.0;
  s.steps = {attacks::AttackStep{}};
  cfg.attack_specs.push_back(s);
  const auto art = engine::simulate(cfg);
  const auto check = classify(cfg, window_between(art, 3.5, 6.5));
  CHECK(check.verdict == TraceVerdict::ATTACK);
  CHECK(check.control_residual > 0.1);
}

TEST_CASE("fault plus report falsification is indistinguishable") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.faults.push_back({2.0, plant::FaultKind::F1_CAUSES, 0.5});
  attacks::AttackSpec s;
  s.id = 1;
  s.kind = attacks::AttackKind::INTEGRITY_DM;
  s.point = attacks::InjectionPoint::SENSOR_TO_DM;
  s.action = attacks::AttackAction::MODIFY;
  s.waveform = {attacks::WaveKind::STEP, 0.2, 4.0, 0.0, 0.0};
  s.t_start = 3.0;
  s.t_end = 7.0;
  s.dm_targets = {netsim::NodeId::HMI, netsim::NodeId::LOGSERVER};
  s.steps = {attacks::AttackStep{}};
  cfg.attack_specs.push_back(s);
  const auto art = engine::simulate(cfg);
  const auto check = classify(cfg, window_between(art, 3.5, 6.5));
  CHECK(check.verdict == TraceVerdict::ATTACK_OR_FAILURE);
}

TEST_CASE("manual samples make a window untraceable") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.sessions.push_back(trio_session(scenario::SessionVariant::LEGIT));
  const auto art = engine::simulate(cfg);
  const auto check = classify(cfg, window_between(art, 5.0, 6.0));
  CHECK(check.verdict == TraceVerdict::UNTRACEABLE);
}

TEST_CASE("windows shorter than two samples are rejected") {
  ScenarioConfig cfg = quiet_cfg();
  const auto art = engine::simulate(cfg);
  TraceWindow w = oracle::window_from_records(art.records, 0, 1);
  CHECK_THROWS_AS(classify(cfg, w), RangeError);
}

TEST_CASE("a full stealthy window replaying valid behavior classifies NORMAL") {
  // The released stream replays quiet closed-loop data, so the model-based
  // check has nothing to object to; only host-side evidence remains.
  ScenarioConfig cfg = quiet_cfg(12.0);
  cfg.supervision.enabled = false;
  attacks::AttackSpec s;
  s.id = 1;
  s.kind = attacks::AttackKind::STEALTHY;
  s.point = attacks::InjectionPoint::SENSOR_TO_CONTROLLER;
  s.action = attacks::AttackAction::REPLAY;
  s.true_manipulation = true;
  s.t_start = 3.0;
  s.t_end = 12.0;
  s.dm_targets = {netsim::NodeId::HMI, netsim::NodeId::LOGSERVER};
  s.report_policy = attacks::ReportPolicy::FREEZE_LAST_GOOD;
  s.steps = {attacks::AttackStep{}};
  cfg.attack_specs.push_back(s);
  cfg.disturbances.push_back({3.5, 1.925});
  const auto art = engine::simulate(cfg);

  bool hazard = false;
  for (const auto& r : art.records) hazard |= r.y_true > 0.9;
  CHECK(hazard);

  const auto check = classify(cfg, window_between(art, 4.0, 9.0));
  CHECK(check.verdict == TraceVerdict::NORMAL);
}

TEST_CASE("raising tolerances only moves verdicts toward NORMAL") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.faults.push_back({3.0, plant::FaultKind::F1_CAUSES, 0.5});
  attacks::AttackSpec s;
  s.id = 1;
  s.kind = attacks::AttackKind::INTEGRITY_SCA;
  s.point = attacks::InjectionPoint::ACTUATOR_CMD;
  s.action = attacks::AttackAction::MODIFY;
  s.waveform = {attacks::WaveKind::STEP, 0.3, 3.0, 0.0, 0.0};
  s.t_start = 5.0;
  s.t_end = 8.0;
  s.steps = {attacks::AttackStep{}};
  cfg.attack_specs.push_back(s);
  const auto art = engine::simulate(cfg);

  const auto rank = [](TraceVerdict v) {
    switch (v) {
      case TraceVerdict::NORMAL: return 0;
      case TraceVerdict::FAILURE: return 1;
      case TraceVerdict::ATTACK: return 1;
      case TraceVerdict::ATTACK_OR_FAILURE: return 2;
      case TraceVerdict::UNTRACEABLE: return -1;
    }
    return -1;
  };

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> t0_dist(0.0, 7.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double t0 = t0_dist(gen);
    const TraceWindow w = window_between(art, t0, t0 + 2.0);
    if (w.size() < 2) continue;
    bool untraceable = false;
    for (const auto& smp : w) untraceable |= !smp.auto_flag;
    if (untraceable) continue;

    int prev_rank = 2;
    bool prev_m_ok = false, prev_a_ok = false;
    for (double tol_scale : {1.0, 10.0, 1e3, 1e9}) {
      const auto check = oracle::classify_trace(
          w, cfg.plant_params, cfg.controller, 1e-6 * tol_scale,
          1e-8 * tol_scale);
      const bool m_ok = check.model_residual <= 1e-6 * tol_scale;
      const bool a_ok = check.control_residual <= 1e-8 * tol_scale;
      CHECK(rank(check.verdict) <= prev_rank);
      // A satisfied check never becomes violated when the tolerance grows.
      CHECK((!prev_m_ok || m_ok));
      CHECK((!prev_a_ok || a_ok));
      prev_rank = rank(check.verdict);
      prev_m_ok = m_ok;
      prev_a_ok = a_ok;
    }
  }
}

TEST_CASE("classification is a pure function of its window") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.disturbances.push_back({3.0, 1.4});
  const auto art = engine::simulate(cfg);
  const TraceWindow w = window_between(art, 2.0, 5.0);
  const auto a = classify(cfg, w);
  const auto b = classify(cfg, w);
  CHECK(a.verdict == b.verdict);
  CHECK(a.model_residual == b.model_residual);
  CHECK(a.control_residual == b.control_residual);
}

TEST_CASE("decision matrix for the operator trio") {
  ScenarioConfig base = quiet_cfg();
  base.plant_params.noise_std = 0.002;

  ScenarioConfig legit = base;
  legit.sessions.push_back(trio_session(scenario::SessionVariant::LEGIT));
  ScenarioConfig compromised = base;
  compromised.sessions.push_back(
      trio_session(scenario::SessionVariant::COMPROMISED_HMI));
  ScenarioConfig spoofed = base;
  spoofed.sessions.push_back(trio_session(scenario::SessionVariant::SPOOFED));

  const auto m = oracle::ids_decision_matrix(
      view_of(engine::simulate(legit)), view_of(engine::simulate(compromised)),
      view_of(engine::simulate(spoofed)));

  using oracle::Cell;
  CHECK(m[0][0] == Cell::TN);
  CHECK(m[0][1] == Cell::TN);
  CHECK(m[0][2] == Cell::TN);
  CHECK(m[1][0] == Cell::FN);
  CHECK(m[1][1] == Cell::FN);
  CHECK(m[1][2] == Cell::TP);
}

TEST_CASE("matrix harness rejects incomplete trios") {
  ScenarioConfig base = quiet_cfg();
  const auto bare = engine::simulate(base);  // no session anywhere
  CHECK_THROWS_AS(
      oracle::ids_decision_matrix(view_of(bare), view_of(bare), view_of(bare)),
      Error);
}

TEST_CASE("run outcome classification distinguishes the four cells") {
  SUBCASE("baseline is normal operation") {
    const auto art = engine::simulate(quiet_cfg());
    CHECK(oracle::classify_run_outcome(view_of(art), 0.85, 0.9) ==
          oracle::RunOutcome::NORMAL_OPERATION);
  }
  SUBCASE("true unsafe state with honest reporting triggers intervention") {
    ScenarioConfig cfg = quiet_cfg();
    cfg.disturbances.push_back({3.0, 6.0});  // violent inlet surge
    const auto art = engine::simulate(cfg);
    CHECK(oracle::classify_run_outcome(view_of(art), 0.85, 0.9) ==
          oracle::RunOutcome::DM_INTERVENTION);
  }
  SUBCASE("fake unsafe reports trigger a futile intervention") {
    ScenarioConfig cfg = quiet_cfg();
    attacks::AttackSpec s;
    s.id = 1;
    s.kind = attacks::AttackKind::STEALTHY;
    s.point = attacks::InjectionPoint::SENSOR_TO_CONTROLLER;
    s.action = attacks::AttackAction::MODIFY;
    s.true_manipulation = false;
    s.t_start = 3.0;
    s.t_end = 6.0;
    s.dm_targets = {netsim::NodeId::HMI, netsim::NodeId::LOGSERVER};
    s.report_policy = attacks::ReportPolicy::OFFSET_WAVEFORM;
    s.report_waveform = {attacks::WaveKind::STEP, 0.6, 3.0, 0.0, 0.0};
    s.steps = {attacks::AttackStep{}};
    cfg.attack_specs.push_back(s);
    const auto art = engine::simulate(cfg);
    CHECK(oracle::classify_run_outcome(view_of(art), 0.85, 0.9) ==
          oracle::RunOutcome::FUTILE_INTERVENTION);
  }
  SUBCASE("blinded loop plus fake-safe reports ends in a hazard") {
    ScenarioConfig cfg = quiet_cfg(12.0);
    attacks::AttackSpec s;
    s.id = 1;
    s.kind = attacks::AttackKind::STEALTHY;
    s.point = attacks::InjectionPoint::SENSOR_TO_CONTROLLER;
    s.action = attacks::AttackAction::REPLAY;
    s.true_manipulation = true;
    s.t_start = 3.0;
    s.t_end = 12.0;
    s.dm_targets = {netsim::NodeId::HMI, netsim::NodeId::LOGSERVER};
    s.report_policy = attacks::ReportPolicy::FREEZE_LAST_GOOD;
    s.steps = {attacks::AttackStep{}};
    cfg.attack_specs.push_back(s);
    cfg.disturbances.push_back({3.5, 1.925});
    const auto art = engine::simulate(cfg);
    CHECK(oracle::classify_run_outcome(view_of(art), 0.85, 0.9) ==
          oracle::RunOutcome::HAZARD);
  }
}

TEST_CASE("batch classification windows a whole record stream") {
  ScenarioConfig cfg = quiet_cfg();
  cfg.faults.push_back({5.0, plant::FaultKind::F1_CAUSES, 0.5});
  const auto art = engine::simulate(cfg);
  const auto verdicts = oracle::classify_records(
      art.records, cfg.plant_params, cfg.controller,
      oracle::default_tol_m(cfg.plant_params), oracle::kDefaultTolA, 20);
  REQUIRE(verdicts.size() == 5);
  CHECK(verdicts.front().verdict == TraceVerdict::NORMAL);
  CHECK(verdicts.back().verdict == TraceVerdict::FAILURE);
}
