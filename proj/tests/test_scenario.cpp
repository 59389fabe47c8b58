#include <string>

#include "cpsgen/scenario.hpp"
#include "doctest.h"

using namespace cpsgen;
using scenario::ScenarioConfig;

namespace {

std::string catch_message(const std::string& text) {
  try {
    scenario::parse_scenario_text(text, "test.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal scenario uses the documented defaults") {
  ScenarioConfig cfg = scenario::parse_scenario_text("duration = 10.0\n", "test.toml");
  CHECK(cfg.duration == 10.0);
  CHECK(cfg.seed == 1);
  CHECK(cfg.plant_params.inlet_flow == 1.0);
  CHECK(cfg.plant_params.noise_std == doctest::Approx(0.002));
  CHECK(cfg.controller.setpoint == doctest::Approx(0.4625));
  CHECK(cfg.traffic.poll_period == doctest::Approx(0.1));
  CHECK(cfg.supervision.enabled);
  CHECK(cfg.split.train_fraction == doctest::Approx(0.7));
}

TEST_CASE("full scenario parses every section") {
  const std::string text = R"(
duration = 12.0
seed = 9
c_a0_init = 0.925

[plant]
F = 1.0
V = 1.0
k = 1.0
noise_std = 0.0
dt = 0.001

[controller]
setpoint = 0.4625
kp = 2.0
ki = 4.0

[traffic]
poll_period = 0.1
report_period = 0.2

[supervision]
alarm_threshold = 0.85
failsafe = "FAIL_CLOSED"

[[disturbance]]
at = 1.0
c_a0 = 1.925

[[fault]]
at = 4.0
kind = "F1_CAUSES"
kappa = 0.5

[[session]]
operator = "op1"
login = 5.0
logout = 6.0
mode_switch_at = 5.2
manual_u = 2.0
auto_return_at = 5.8
variant = "LEGIT"

[[irregular]]
at = 7.03
kind = "OPERATOR_MANUAL_POLL"

[[attack]]
id = 1
kind = "INTEGRITY_SCA"
point = "SENSOR_TO_CONTROLLER"
action = "MODIFY"
waveform = "STEP"
magnitude = -0.3
t_start = 8.0
t_end = 9.0
vector = ["CREDENTIAL APPLICATION REMOTE ATTACKER>CORP_WS -0.2", "PIVOT APPLICATION REMOTE CORP_WS>HMI -0.1", "PAYLOAD CONTROL REMOTE HMI>CONTROLLER 0"]
)";
  ScenarioConfig cfg = scenario::parse_scenario_text(text, "test.toml");
  CHECK(cfg.seed == 9);
  CHECK(cfg.supervision.failsafe == scenario::Failsafe::FAIL_CLOSED);
  REQUIRE(cfg.disturbances.size() == 1);
  REQUIRE(cfg.faults.size() == 1);
  REQUIRE(cfg.sessions.size() == 1);
  REQUIRE(cfg.irregulars.size() == 1);
  REQUIRE(cfg.attack_specs.size() == 1);
  const auto& a = cfg.attack_specs[0];
  CHECK(a.steps.size() == 3);
  CHECK(a.steps[0].offset == doctest::Approx(-0.2));
  CHECK(a.steps[2].to == netsim::NodeId::CONTROLLER);
}

TEST_CASE("unknown keys are reported with their path and line") {
  const std::string msg = catch_message(
      "duration = 10.0\n"
      "[plant]\n"
      "flowrate = 2.0\n");
  CHECK(msg.find("unknown key 'plant.flowrate'") != std::string::npos);
  CHECK(msg.find("test.toml:3") != std::string::npos);
}

TEST_CASE("attack windows beyond the duration name the attack id") {
  const std::string msg = catch_message(
      "duration = 5.0\n"
      "[[attack]]\n"
      "id = 4\n"
      "kind = \"INTEGRITY_SCA\"\n"
      "point = \"SENSOR_TO_CONTROLLER\"\n"
      "action = \"MODIFY\"\n"
      "magnitude = 0.2\n"
      "t_start = 4.0\n"
      "t_end = 6.0\n");
  CHECK(msg.find("attack 4") != std::string::npos);
  CHECK(msg.find("window") != std::string::npos);
}

TEST_CASE("all problems are reported at once") {
  const std::string msg = catch_message(
      "duration = -1.0\n"
      "bogus = 3\n"
      "[controller]\n"
      "sample_period = 0.25\n");
  CHECK(msg.find("duration must be > 0") != std::string::npos);
  CHECK(msg.find("unknown key 'bogus'") != std::string::npos);
  CHECK(msg.find("sample_period must equal") != std::string::npos);
}

TEST_CASE("overlapping attack windows are rejected") {
  const std::string msg = catch_message(
      "duration = 10.0\n"
      "[[attack]]\n"
      "id = 1\n"
      "kind = \"INTEGRITY_SCA\"\n"
      "point = \"SENSOR_TO_CONTROLLER\"\n"
      "action = \"MODIFY\"\n"
      "magnitude = 0.2\n"
      "t_start = 2.0\n"
      "t_end = 4.0\n"
      "[[attack]]\n"
      "id = 2\n"
      "kind = \"INTEGRITY_SCA\"\n"
      "point = \"SENSOR_TO_CONTROLLER\"\n"
      "action = \"MODIFY\"\n"
      "magnitude = 0.3\n"
      "t_start = 3.5\n"
      "t_end = 5.0\n");
  CHECK(msg.find("overlaps") != std::string::npos);
}

TEST_CASE("overlapping sessions for one operator are rejected") {
  const std::string msg = catch_message(
      "duration = 10.0\n"
      "[[session]]\n"
      "operator = \"op1\"\n"
      "login = 1.0\n"
      "logout = 3.0\n"
      "mode_switch_at = 1.5\n"
      "manual_u = 2.0\n"
      "[[session]]\n"
      "operator = \"op1\"\n"
      "login = 2.5\n"
      "logout = 4.0\n"
      "mode_switch_at = 2.6\n"
      "manual_u = 2.0\n");
  CHECK(msg.find("overlapping sessions") != std::string::npos);
}

TEST_CASE("serialized configs re-parse to an equivalent scenario") {
  const std::string text =
      "duration = 12.0\n"
      "seed = 9\n"
      "[plant]\n"
      "noise_std = 0.003\n"
      "[[disturbance]]\n"
      "at = 1.0\n"
      "c_a0 = 1.925\n"
      "[[attack]]\n"
      "id = 1\n"
      "kind = \"STEALTHY\"\n"
      "point = \"SENSOR_TO_CONTROLLER\"\n"
      "action = \"REPLAY\"\n"
      "t_start = 8.0\n"
      "t_end = 9.0\n"
      "true_manipulation = true\n"
      "report_policy = \"FREEZE_LAST_GOOD\"\n"
      "dm_targets = [\"HMI\", \"LOGSERVER\"]\n";
  ScenarioConfig cfg = scenario::parse_scenario_text(text, "test.toml");
  const std::string emitted = scenario::emit_scenario_text(cfg);
  ScenarioConfig back = scenario::parse_scenario_text(emitted, "emitted.toml");
  CHECK(scenario::emit_scenario_text(back) == emitted);
  CHECK(back.duration == cfg.duration);
  CHECK(back.seed == cfg.seed);
  CHECK(back.plant_params.noise_std == cfg.plant_params.noise_std);
  REQUIRE(back.attack_specs.size() == 1);
  CHECK(back.attack_specs[0].report_policy ==
        attacks::ReportPolicy::FREEZE_LAST_GOOD);
  CHECK(back.attack_specs[0].dm_targets.size() == 2);
}

TEST_CASE("vector step round-trip") {
  const std::string s = "CREDENTIAL APPLICATION REMOTE ATTACKER>HMI -0.3";
  attacks::AttackStep st = scenario::parse_vector_step(s);
  CHECK(st.effect == attacks::StepEffect::CREDENTIAL);
  CHECK(st.from == netsim::NodeId::ATTACKER);
  CHECK(st.to == netsim::NodeId::HMI);
  CHECK(st.offset == doctest::Approx(-0.3));
  attacks::AttackStep again =
      scenario::parse_vector_step(scenario::format_vector_step(st));
  CHECK(again.effect == st.effect);
  CHECK(again.offset == st.offset);
  CHECK_THROWS_AS(scenario::parse_vector_step("PAYLOAD nonsense"), ConfigError);
}
