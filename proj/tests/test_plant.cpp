#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cpsgen/plant.hpp"
#include "doctest.h"

using namespace cpsgen;
using plant::FaultEvent;
using plant::FaultKind;
using plant::PlantParams;
using plant::PlantState;
using plant::SystemMode;

namespace {

PlantParams unit_params() {
  PlantParams p;
  p.inlet_flow = 1.0;
  p.volume = 1.0;
  p.rate_const = 1.0;
  p.noise_std = 0.0;
  p.dt = 1e-3;
  return p;
}

std::vector<double> simulate_step_response(const PlantParams& p,
                                           double inlet0, double delta,
                                           double t_end) {
  PlantState st = plant::steady_state(p, inlet0);
  st.inlet_conc = inlet0 + delta;
  std::vector<double> conc{st.outlet_conc};
  const auto steps = static_cast<long>(std::llround(t_end / p.dt));
  for (long k = 0; k < steps; ++k) {
    st = plant::integrate_step(st, p.inlet_flow, p);
    conc.push_back(st.outlet_conc);
  }
  return conc;
}

}  // namespace

TEST_CASE("derived gain and time constant") {
  PlantParams p = unit_params();
  CHECK(p.process_gain() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.time_constant() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("steady state is a fixed point of the integrator") {
  PlantParams p = unit_params();
  PlantState st = plant::steady_state(p, 0.925);
  CHECK(st.outlet_conc == doctest::Approx(0.4625).epsilon(1e-15));
  PlantState next = st;
  for (int i = 0; i < 1000; ++i) next = plant::integrate_step(next, 1.0, p);
  CHECK(std::abs(next.outlet_conc - st.outlet_conc) <= 1e-12);
}

TEST_CASE("step response matches the analytic curve") {
  PlantParams p = unit_params();
  const std::vector<double> conc = simulate_step_response(p, 0.925, 1.0, 10.0);
  const double base = conc[0];
  const auto idx_10tau = static_cast<std::size_t>(std::llround(5.0 / p.dt));
  double worst = 0.0;
  for (std::size_t k = 0; k <= idx_10tau; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    worst = std::max(worst,
                     std::abs((conc[k] - base) - plant::analytic_response(p, 1.0, t)));
  }
  CHECK(worst <= 1e-6);

  const auto idx_tau = static_cast<std::size_t>(std::llround(0.5 / p.dt));
  CHECK(conc[idx_tau] - base == doctest::Approx(0.31606027941427883).epsilon(1e-9));

  // Asymptotic deviation equals gain * delta.
  CHECK(conc.back() - base == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("step responses are monotone in NORMAL mode") {
  PlantParams p = unit_params();
  for (double delta : {1.0, -0.3, 2.5}) {
    const std::vector<double> conc = simulate_step_response(p, 0.925, delta, 3.0);
    for (std::size_t k = 1; k < conc.size(); ++k) {
      const double diff = conc[k] - conc[k - 1];
      if (delta >= 0.0) {
        CHECK(diff >= -1e-15);
      } else {
        CHECK(diff <= 1e-15);
      }
    }
  }
}

TEST_CASE("analytic response examples") {
  PlantParams p = unit_params();
  CHECK(plant::analytic_response(p, 1.0, 0.0) == 0.0);
  CHECK(plant::analytic_response(p, 1.0, 100.0 * p.time_constant()) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plant::analytic_response(p, 1.0, p.time_constant()) ==
        doctest::Approx(0.31606027941427883).epsilon(1e-12));
  CHECK_THROWS_AS(plant::analytic_response(p, 1.0, -0.1), NumericError);
}

TEST_CASE("disturbance estimation inverts the response") {
  PlantParams p = unit_params();
  const double inlet0 = 0.925;
  const double base = p.process_gain() * inlet0;

  SUBCASE("zero deviation returns the initial disturbance") {
    CHECK(plant::estimate_disturbance(base, base, inlet0, 1.0, p) ==
          doctest::Approx(inlet0).epsilon(1e-15));
  }

  SUBCASE("round trip through the analytic response") {
    const double now = base + plant::analytic_response(p, 1.0, 0.5);
    CHECK(plant::estimate_disturbance(now, base, inlet0, 0.5, p) ==
          doctest::Approx(1.925).epsilon(1e-9));
  }

  SUBCASE("identity on the step size for a sweep of times") {
    for (double t = 0.05; t <= 3.0; t += 0.05) {
      for (double delta : {0.2, 1.0, -0.5}) {
        const double now = base + plant::analytic_response(p, delta, t);
        const double est = plant::estimate_disturbance(now, base, inlet0, t, p);
        CHECK(std::abs(est - (inlet0 + delta)) <= 1e-9);
      }
    }
  }

  SUBCASE("t = 0 is singular") {
    CHECK_THROWS_AS(plant::estimate_disturbance(base, base, inlet0, 0.0, p),
                    NumericError);
  }
}

TEST_CASE("fault transitions follow the mode automaton") {
  PlantParams p = unit_params();
  PlantState st = plant::steady_state(p, 0.925);

  SUBCASE("normal to F1 installs the decayed rate") {
    PlantState f1 = plant::apply_fault_event(st, {0.0, FaultKind::F1_CAUSES, 0.5});
    CHECK(f1.mode == SystemMode::F1);
    CHECK(f1.rate_scale == 0.5);
  }
  SUBCASE("F1 to F12 on the second fault") {
    PlantState f1 = plant::apply_fault_event(st, {0.0, FaultKind::F1_CAUSES, 0.5});
    PlantState f12 = plant::apply_fault_event(f1, {1.0, FaultKind::F2_CAUSES, 0.5});
    CHECK(f12.mode == SystemMode::F12);
    CHECK(f12.rate_scale == 0.5);
  }
  SUBCASE("combined fault straight from normal") {
    PlantState f12 =
        plant::apply_fault_event(st, {0.0, FaultKind::F1_AND_F2_CAUSES, 0.4});
    CHECK(f12.mode == SystemMode::F12);
  }
  SUBCASE("the combined mode is absorbing") {
    PlantState f12 =
        plant::apply_fault_event(st, {0.0, FaultKind::F1_AND_F2_CAUSES, 0.4});
    CHECK_THROWS_AS(plant::apply_fault_event(f12, {1.0, FaultKind::F1_CAUSES, 0.5}),
                    TransitionError);
  }
  SUBCASE("repeat faults are rejected") {
    PlantState f1 = plant::apply_fault_event(st, {0.0, FaultKind::F1_CAUSES, 0.5});
    CHECK_THROWS_AS(plant::apply_fault_event(f1, {1.0, FaultKind::F1_CAUSES, 0.5}),
                    TransitionError);
  }
}

TEST_CASE("fuzzed fault schedules never leave the legal edge set") {
  PlantParams p = unit_params();
  std::mt19937_64 gen(20240817);
  std::uniform_int_distribution<int> kind_dist(0, 2);
  std::uniform_int_distribution<int> len_dist(1, 5);

  const auto legal = [](SystemMode from, FaultKind kind, SystemMode to) {
    using M = SystemMode;
    using K = FaultKind;
    if (from == M::NORMAL && kind == K::F1_CAUSES) return to == M::F1;
    if (from == M::NORMAL && kind == K::F2_CAUSES) return to == M::F2;
    if (from == M::NORMAL && kind == K::F1_AND_F2_CAUSES) return to == M::F12;
    if (from == M::F1 && kind == K::F2_CAUSES) return to == M::F12;
    if (from == M::F2 && kind == K::F1_CAUSES) return to == M::F12;
    return false;
  };

  for (int trial = 0; trial < 300; ++trial) {
    PlantState st = plant::steady_state(p, 0.925);
    const int n = len_dist(gen);
    for (int i = 0; i < n; ++i) {
      const FaultKind kind = static_cast<FaultKind>(kind_dist(gen));
      const SystemMode before = st.mode;
      try {
        PlantState next = plant::apply_fault_event(st, {0.0, kind, 0.5});
        CHECK(legal(before, kind, next.mode));
        st = next;
      } catch (const TransitionError&) {
        bool any_edge = false;
        for (SystemMode to : {SystemMode::NORMAL, SystemMode::F1,
                              SystemMode::F2, SystemMode::F12}) {
          any_edge = any_edge || legal(before, kind, to);
        }
        CHECK_FALSE(any_edge);
        CHECK(st.mode == before);  // rejected events leave the state alone
      }
    }
  }
}

TEST_CASE("stiction freezes the flow regardless of the command") {
  PlantParams p = unit_params();
  PlantState a = plant::steady_state(p, 0.925);
  a.inlet_conc = 1.5;
  a = plant::apply_fault_event(a, {0.0, FaultKind::F2_CAUSES, 0.5});
  PlantState b = a;
  for (int k = 0; k < 2000; ++k) {
    a = plant::integrate_step(a, 1.0, p);
    b = plant::integrate_step(b, 2.0, p);
    CHECK(a.outlet_conc == b.outlet_conc);  // bitwise
    CHECK(a.applied_flow == b.applied_flow);
  }
}

TEST_CASE("measurement noise is seeded, clamped, and optional") {
  PlantParams p = unit_params();
  PlantState st = plant::steady_state(p, 0.925);

  SUBCASE("noiseless sensor is exact") {
    rng::Stream noise(1, "sensor_noise");
    CHECK(plant::measure(st, p, noise) == st.outlet_conc);
  }
  SUBCASE("same seed gives the same sequence") {
    PlantParams noisy = p;
    noisy.noise_std = 0.01;
    rng::Stream n1(42, "sensor_noise");
    rng::Stream n2(42, "sensor_noise");
    for (int i = 0; i < 100; ++i) {
      CHECK(plant::measure(st, noisy, n1) == plant::measure(st, noisy, n2));
    }
  }
  SUBCASE("readings clamp at zero") {
    PlantParams noisy = p;
    noisy.noise_std = 10.0;
    PlantState tiny = st;
    tiny.outlet_conc = 0.001;
    rng::Stream noise(7, "sensor_noise");
    bool clamped = false;
    for (int i = 0; i < 200; ++i) {
      const double y = plant::measure(tiny, noisy, noise);
      CHECK(y >= 0.0);
      if (y == 0.0) clamped = true;
    }
    CHECK(clamped);
  }
}

TEST_CASE("non-finite inputs are rejected") {
  PlantParams p = unit_params();
  PlantState st = plant::steady_state(p, 0.925);
  CHECK_THROWS_AS(plant::integrate_step(st, std::nan(""), p), NumericError);
  PlantState broken = st;
  broken.outlet_conc = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(plant::integrate_step(broken, 1.0, p), NumericError);
}

TEST_CASE("parameter validation") {
  PlantParams p = unit_params();
  p.volume = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = unit_params();
  p.dt = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
