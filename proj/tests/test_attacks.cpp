#include <cmath>
#include <set>

#include "cpsgen/attacks.hpp"
#include "doctest.h"

using namespace cpsgen;
using attacks::AttackAction;
using attacks::AttackGrid;
using attacks::AttackKind;
using attacks::AttackSpec;
using attacks::InjectionPoint;
using attacks::WaveKind;
using attacks::Waveform;

namespace {

AttackSpec basic_spec() {
  AttackSpec s;
  s.id = 1;
  s.kind = AttackKind::INTEGRITY_SCA;
  s.point = InjectionPoint::SENSOR_TO_CONTROLLER;
  s.action = AttackAction::MODIFY;
  s.waveform = {WaveKind::STEP, -0.3, 1.0, 0.0, 0.0};
  s.t_start = 2.0;
  s.t_end = 3.0;
  s.steps = {attacks::AttackStep{}};
  return s;
}

netsim::Frame sensor_frame(double ts, double value) {
  netsim::Frame f;
  f.ts = ts;
  f.src = netsim::NodeId::SENSOR;
  f.dst = netsim::NodeId::CONTROLLER;
  f.proto = netsim::Proto::POLLPROTO;
  f.fn = netsim::FnCode::READ;
  f.addr = netsim::kRegSensorConc;
  f.value = value;
  return f;
}

}  // namespace

TEST_CASE("waveform shapes") {
  SUBCASE("step holds its magnitude") {
    Waveform w{WaveKind::STEP, 0.5, 2.0, 0.0, 0.0};
    CHECK(attacks::design_waveform(w, 0.0) == 0.5);
    CHECK(attacks::design_waveform(w, 1.7) == 0.5);
    CHECK(attacks::design_waveform(w, 2.5) == 0.0);  // past the duration
    CHECK(attacks::design_waveform(w, -0.1) == 0.0);
  }
  SUBCASE("pulse is bounded by its duration") {
    Waveform w{WaveKind::PULSE, 0.5, 0.3, 0.0, 0.0};
    CHECK(attacks::design_waveform(w, 0.1) == 0.5);
    CHECK(attacks::design_waveform(w, 0.4) == 0.0);
  }
  SUBCASE("ramp is linear and capped") {
    Waveform w{WaveKind::RAMP, 0.5, 10.0, 0.1, 0.0};
    CHECK(attacks::design_waveform(w, 2.0) == doctest::Approx(0.2));
    CHECK(attacks::design_waveform(w, 9.0) == doctest::Approx(0.5));
  }
  SUBCASE("negative ramp descends to its cap") {
    Waveform w{WaveKind::RAMP, -0.5, 10.0, 0.1, 0.0};
    CHECK(attacks::design_waveform(w, 2.0) == doctest::Approx(-0.2));
    CHECK(attacks::design_waveform(w, 9.0) == doctest::Approx(-0.5));
  }
  SUBCASE("stealth ramp keeps every per-sample increment under the bound") {
    const double period = 0.1;
    const double threshold = 0.01;
    Waveform w{WaveKind::STEALTH_RAMP, 0.4, 10.0, threshold / (2.0 * period),
               threshold};
    double prev = attacks::design_waveform(w, 0.0);
    double max_delta = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double cur = attacks::design_waveform(w, i * period);
      max_delta = std::max(max_delta, cur - prev);
      prev = cur;
    }
    CHECK(max_delta <= threshold * (1.0 - 1e-9));
  }
}

TEST_CASE("modify interceptor offsets matching frames inside the window") {
  AttackSpec s = basic_spec();
  netsim::Interceptor ic = attacks::build_stream_interceptor(s);
  CHECK(ic.matches(sensor_frame(2.5, 0.46)));

  auto out = ic.act(sensor_frame(2.5, 0.46), 2.5);
  CHECK(out.kind == netsim::Disposition::DELIVERED);
  CHECK(out.frame.value == doctest::Approx(0.16));
  CHECK(out.frame.attack_id == 1);

  netsim::Frame other = sensor_frame(2.5, 0.46);
  other.src = netsim::NodeId::CONTROLLER;
  other.dst = netsim::NodeId::ACTUATOR;
  other.addr = netsim::kRegActuatorFlow;
  CHECK_FALSE(ic.matches(other));
}

TEST_CASE("replay interceptor loops pre-window values with fresh txns") {
  AttackSpec s = basic_spec();
  s.action = AttackAction::REPLAY;
  netsim::Interceptor ic = attacks::build_stream_interceptor(s);

  std::vector<double> pre;
  for (int i = 0; i < 5; ++i) {
    const double v = 0.4 + 0.01 * i;
    pre.push_back(v);
    ic.observe(sensor_frame(1.0 + 0.1 * i, v));
  }
  std::set<double> seen(pre.begin(), pre.end());
  for (int i = 0; i < 12; ++i) {
    netsim::Frame f = sensor_frame(2.0 + 0.1 * i, 1.0 + i);
    f.txn = 100 + i;
    auto out = ic.act(f, f.ts);
    CHECK(out.kind == netsim::Disposition::DELIVERED);
    CHECK(seen.count(out.frame.value) == 1);  // sourced from earlier traffic
    CHECK(out.frame.txn == f.txn);            // the in-flight txn stays fresh
    CHECK(out.frame.attack_id == 1);
  }
}

TEST_CASE("report tamper rules") {
  AttackSpec s = basic_spec();
  s.kind = AttackKind::STEALTHY;
  s.dm_targets = {netsim::NodeId::HMI, netsim::NodeId::LOGSERVER};

  SUBCASE("freeze holds the armed value") {
    s.report_policy = attacks::ReportPolicy::FREEZE_LAST_GOOD;
    auto rt = attacks::build_report_tamper(s, 0.2);
    rt.armed = true;
    rt.frozen_value = 0.4625;
    CHECK(rt.transform(0.9, 2.5) == 0.4625);
    CHECK(rt.applies_to(netsim::NodeId::HMI, 2.5));
    CHECK_FALSE(rt.applies_to(netsim::NodeId::HMI, 3.5));
  }
  SUBCASE("envelope replay cycles the captured ring") {
    s.report_policy = attacks::ReportPolicy::SAFE_ENVELOPE_REPLAY;
    auto rt = attacks::build_report_tamper(s, 0.2);
    rt.armed = true;
    rt.replay_ring = {0.1, 0.2, 0.3};
    CHECK(rt.transform(9.9, 2.0) == 0.1);
    CHECK(rt.transform(9.9, 2.2) == 0.2);
    CHECK(rt.transform(9.9, 2.4) == 0.3);
    CHECK(rt.transform(9.9, 2.6) == 0.1);
  }
  SUBCASE("offset waveform fakes an unsafe reading") {
    s.report_policy = attacks::ReportPolicy::OFFSET_WAVEFORM;
    s.report_waveform = {WaveKind::STEP, 0.6, 1.0, 0.0, 0.0};
    auto rt = attacks::build_report_tamper(s, 0.2);
    rt.armed = true;
    CHECK(rt.transform(0.46, 2.5) == doctest::Approx(1.06));
  }
  SUBCASE("drop rule suppresses the report") {
    AttackSpec dm = basic_spec();
    dm.kind = AttackKind::INTEGRITY_DM;
    dm.point = InjectionPoint::SENSOR_TO_DM;
    dm.action = AttackAction::DROP;
    auto rt = attacks::build_report_tamper(dm, 0.2);
    rt.armed = true;
    CHECK_FALSE(rt.transform(0.46, 2.5).has_value());
    CHECK(rt.targets == std::vector<netsim::NodeId>{netsim::NodeId::HMI});
  }
}

TEST_CASE("spec validation catches structural problems") {
  std::vector<std::string> issues;

  SUBCASE("valid spec has no issues") {
    attacks::validate_attack_spec(basic_spec(), 10.0, 0.1, issues);
    CHECK(issues.empty());
  }
  SUBCASE("window outside the scenario") {
    AttackSpec s = basic_spec();
    s.t_end = 11.0;
    attacks::validate_attack_spec(s, 10.0, 0.1, issues);
    CHECK_FALSE(issues.empty());
  }
  SUBCASE("kind and point must agree") {
    AttackSpec s = basic_spec();
    s.point = InjectionPoint::SENSOR_TO_DM;
    attacks::validate_attack_spec(s, 10.0, 0.1, issues);
    CHECK_FALSE(issues.empty());
  }
  SUBCASE("stealthy needs DM targets") {
    AttackSpec s = basic_spec();
    s.kind = AttackKind::STEALTHY;
    s.dm_targets.clear();
    attacks::validate_attack_spec(s, 10.0, 0.1, issues);
    CHECK_FALSE(issues.empty());
  }
  SUBCASE("broken pivot chain") {
    AttackSpec s = basic_spec();
    attacks::AttackStep a;
    a.from = netsim::NodeId::ATTACKER;
    a.to = netsim::NodeId::CORP_WS;
    a.effect = attacks::StepEffect::CREDENTIAL;
    attacks::AttackStep b;
    b.from = netsim::NodeId::HMI;  // does not chain from CORP_WS
    b.to = netsim::NodeId::CONTROLLER;
    b.effect = attacks::StepEffect::PAYLOAD;
    s.steps = {a, b};
    attacks::validate_attack_spec(s, 10.0, 0.1, issues);
    bool found = false;
    for (const auto& i : issues) found |= i.find("pivot") != std::string::npos;
    CHECK(found);
  }
  SUBCASE("stealth ramp increment must stay under the threshold") {
    AttackSpec s = basic_spec();
    s.waveform = {WaveKind::STEALTH_RAMP, 0.4, 1.0, 1.0, 0.01};
    attacks::validate_attack_spec(s, 10.0, 0.1, issues);
    CHECK_FALSE(issues.empty());
  }
}

TEST_CASE("fingerprints ignore irrelevant attributes") {
  AttackSpec a = basic_spec();
  a.action = AttackAction::DROP;
  a.waveform.magnitude = 0.1;
  AttackSpec b = a;
  b.waveform.magnitude = 0.9;  // magnitude is irrelevant for drops
  CHECK(attacks::fingerprint(a, 0.1) == attacks::fingerprint(b, 0.1));

  AttackSpec c = basic_spec();
  AttackSpec d = c;
  d.waveform.magnitude = 0.9;  // but decisive for modifications
  CHECK(attacks::fingerprint(c, 0.1) != attacks::fingerprint(d, 0.1));

  AttackSpec e = basic_spec();
  AttackSpec f = e;
  f.point = InjectionPoint::ACTUATOR_CMD;  // different stream, different attack
  CHECK(attacks::fingerprint(e, 0.1) != attacks::fingerprint(f, 0.1));
}

TEST_CASE("planner covers the grid deterministically") {
  AttackGrid grid;
  grid.kinds = {AttackKind::INTEGRITY_SCA, AttackKind::INTEGRITY_DM};
  grid.points = {InjectionPoint::SENSOR_TO_CONTROLLER,
                 InjectionPoint::ACTUATOR_CMD, InjectionPoint::SENSOR_TO_DM};
  grid.actions = {AttackAction::MODIFY, AttackAction::DROP};
  grid.waveforms = {WaveKind::STEP, WaveKind::RAMP};
  grid.magnitudes = {0.2, -0.2};
  grid.limit = 8;
  grid.window_len = 1.0;
  grid.gap = 0.5;
  grid.start_after = 2.0;

  const auto plan = attacks::plan_attacks(grid, 60.0, 0.1, 11);
  CHECK(plan.size() == 8);

  std::set<std::uint64_t> prints;
  std::set<int> ids;
  for (const auto& s : plan) {
    prints.insert(attacks::fingerprint(s, 0.1));
    ids.insert(s.id);
    CHECK(s.t_end <= 60.0);
  }
  CHECK(prints.size() == 8);  // all distinct behaviors
  CHECK(ids.size() == 8);

  // Windows are packed without overlap and separated by gaps.
  for (std::size_t i = 1; i < plan.size(); ++i) {
    CHECK(plan[i].t_start >= plan[i - 1].t_end + grid.gap - 1e-12);
  }

  // Same seed, same plan.
  const auto again = attacks::plan_attacks(grid, 60.0, 0.1, 11);
  REQUIRE(again.size() == plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    CHECK(again[i].id == plan[i].id);
    CHECK(again[i].kind == plan[i].kind);
    CHECK(again[i].point == plan[i].point);
    CHECK(again[i].action == plan[i].action);
    CHECK(again[i].waveform.magnitude == plan[i].waveform.magnitude);
  }
}

TEST_CASE("zero-day picks use held-out attribute combinations") {
  AttackGrid grid;
  grid.kinds = {AttackKind::INTEGRITY_SCA, AttackKind::INTEGRITY_DM};
  grid.points = {InjectionPoint::SENSOR_TO_CONTROLLER,
                 InjectionPoint::ACTUATOR_CMD, InjectionPoint::SENSOR_TO_DM};
  grid.actions = {AttackAction::MODIFY, AttackAction::DROP,
                  AttackAction::REPLAY};
  grid.waveforms = {WaveKind::STEP, WaveKind::PULSE, WaveKind::RAMP};
  grid.magnitudes = {0.2};
  grid.limit = 10;
  grid.zero_day_count = 1;

  const auto plan = attacks::plan_attacks(grid, 120.0, 0.1, 5);
  REQUIRE(plan.size() == 10);
  int zd = 0;
  std::set<std::string> train_combos;
  std::string zd_combo;
  for (const auto& s : plan) {
    const std::string combo = std::string(attacks::to_string(s.point)) + "/" +
                              attacks::to_string(s.action) + "/" +
                              attacks::to_string(s.waveform.kind);
    if (s.zero_day) {
      ++zd;
      zd_combo = combo;
    } else {
      train_combos.insert(combo);
    }
  }
  CHECK(zd == 1);
  CHECK(train_combos.count(zd_combo) == 0);
  CHECK(plan.back().zero_day);  // zero-days take the latest windows
}

TEST_CASE("unsatisfiable grids raise planning errors") {
  AttackGrid grid;
  grid.kinds = {AttackKind::INTEGRITY_SCA};
  grid.points = {InjectionPoint::SENSOR_TO_CONTROLLER};
  grid.actions = {AttackAction::MODIFY};
  grid.waveforms = {WaveKind::STEP};
  grid.magnitudes = {0.2};
  grid.limit = 8;  // only one distinct behavior exists

  CHECK_THROWS_AS(attacks::plan_attacks(grid, 60.0, 0.1, 1), PlanningError);

  // Fits behaviorally but not temporally.
  grid.limit = 1;
  grid.start_after = 0.5;
  grid.window_len = 5.0;
  CHECK_THROWS_AS(attacks::plan_attacks(grid, 3.0, 0.1, 1), PlanningError);
}
