#include <cmath>
#include <random>

#include "cpsgen/control.hpp"
#include "doctest.h"

using namespace cpsgen;
using control::ControllerConfig;
using control::ControllerState;
using control::ControlMode;

namespace {

ControllerConfig default_cfg() { return ControllerConfig{}; }

ControllerState rest_state(const ControllerConfig& cfg) {
  ControllerState st;
  st.mode = ControlMode::AUTO;
  st.integral_accum = 0.0;
  st.last_u = cfg.u_bias;
  st.last_y = cfg.setpoint;
  return st;
}

/// Unclamped PI reference used to verify anti-windup behavior.
double brute_force_unclamped(double y, const ControllerConfig& cfg,
                             double integral) {
  const double e = cfg.setpoint - y;
  return cfg.u_bias + cfg.kp_gain * e +
         cfg.ki_gain * (integral + e * cfg.sample_period);
}

}  // namespace

TEST_CASE("zero error holds the bias output") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);
  const auto r = control::pi_update(cfg.setpoint, cfg, st);
  CHECK(r.u == doctest::Approx(cfg.u_bias).epsilon(1e-15));
}

TEST_CASE("positive error raises the output") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);
  const double u0 = control::pi_update(cfg.setpoint, cfg, st).u;
  const double u1 = control::pi_update(cfg.setpoint - 0.1, cfg, st).u;
  CHECK(u1 > u0);
}

TEST_CASE("anti-windup freezes the integral while clamped") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);

  // A persistent large error saturates the actuator.
  const double y = cfg.setpoint - 10.0;
  CHECK(brute_force_unclamped(y, cfg, st.integral_accum) > cfg.u_max);

  auto r1 = control::pi_update(y, cfg, st);
  CHECK(r1.u == cfg.u_max);
  CHECK(r1.st.integral_accum == st.integral_accum);

  auto r2 = control::pi_update(y, cfg, r1.st);
  CHECK(r2.u == cfg.u_max);
  CHECK(r2.st.integral_accum == st.integral_accum);
}

TEST_CASE("every output stays inside the actuator limits") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> y_dist(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const auto r = control::pi_update(y_dist(gen), cfg, st);
    CHECK(r.u >= cfg.u_min);
    CHECK(r.u <= cfg.u_max);
    st = r.st;
  }
}

TEST_CASE("safety trip latches and zeroes the output") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);

  SUBCASE("exactly at the threshold stays untripped") {
    const auto r = control::safety_check(cfg.haz_threshold, cfg, st);
    CHECK_FALSE(r.tripped);
  }
  SUBCASE("above the threshold trips and forces zero") {
    const auto r = control::safety_check(cfg.haz_threshold + 0.01, cfg, st);
    CHECK(r.tripped);
    CHECK(r.st.last_u == 0.0);
  }
  SUBCASE("the trip survives recovery of the measurement") {
    auto r = control::safety_check(cfg.haz_threshold + 0.01, cfg, st);
    r = control::safety_check(cfg.setpoint, cfg, r.st);
    CHECK(r.tripped);
    CHECK_THROWS_AS(control::pi_update(cfg.setpoint, cfg, r.st), ModeError);
  }
}

TEST_CASE("manual mode contract") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);

  SUBCASE("switch installs the manual output") {
    auto manual = control::set_control_mode(st, ControlMode::MANUAL, 2.0, cfg);
    CHECK(manual.last_u == 2.0);
    CHECK_THROWS_AS(control::pi_update(cfg.setpoint, cfg, manual), ModeError);
  }
  SUBCASE("manual output outside the limits is rejected") {
    CHECK_THROWS_AS(
        control::set_control_mode(st, ControlMode::MANUAL, cfg.u_max + 1.0, cfg),
        RangeError);
  }
  SUBCASE("return to auto is bumpless") {
    auto manual = control::set_control_mode(st, ControlMode::MANUAL, 2.0, cfg);
    manual.last_y = 0.52;  // current measurement when the operator hands back
    auto back = control::set_control_mode(manual, ControlMode::AUTO,
                                          std::nullopt, cfg);
    const auto r = control::pi_update(manual.last_y, cfg, back);
    CHECK(r.u == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("predict_action replays pi_update exactly") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> y_dist(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double y = y_dist(gen);
    const double predicted = control::predict_action(y, cfg, st);
    const auto r = control::pi_update(y, cfg, st);
    CHECK(predicted == r.u);  // bitwise
    st = r.st;
  }
}

TEST_CASE("predict_action refuses manual-mode samples") {
  ControllerConfig cfg = default_cfg();
  ControllerState st = rest_state(cfg);
  st.mode = ControlMode::MANUAL;
  CHECK_THROWS_AS(control::predict_action(0.5, cfg, st), ModeError);
}

TEST_CASE("config validation") {
  ControllerConfig cfg = default_cfg();
  cfg.u_min = cfg.u_max;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_cfg();
  cfg.haz_threshold = cfg.setpoint;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
