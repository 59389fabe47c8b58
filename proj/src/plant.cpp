#include "cpsgen/plant.hpp"

#include <cmath>

namespace cpsgen::plant {

const char* to_string(SystemMode m) {
  switch (m) {
    case SystemMode::NORMAL: return "NORMAL";
    case SystemMode::F1: return "F1";
    case SystemMode::F2: return "F2";
    case SystemMode::F12: return "F12";
  }
  return "?";
}

SystemMode mode_from_string(const std::string& s) {
  if (s == "NORMAL") return SystemMode::NORMAL;
  if (s == "F1") return SystemMode::F1;
  if (s == "F2") return SystemMode::F2;
  if (s == "F12") return SystemMode::F12;
  throw ConfigError("unknown system mode: " + s);
}

const char* to_string(FaultKind k) {
  switch (k) {
    case FaultKind::F1_CAUSES: return "F1_CAUSES";
    case FaultKind::F2_CAUSES: return "F2_CAUSES";
    case FaultKind::F1_AND_F2_CAUSES: return "F1_AND_F2_CAUSES";
  }
  return "?";
}

FaultKind fault_kind_from_string(const std::string& s) {
  if (s == "F1_CAUSES") return FaultKind::F1_CAUSES;
  if (s == "F2_CAUSES") return FaultKind::F2_CAUSES;
  if (s == "F1_AND_F2_CAUSES") return FaultKind::F1_AND_F2_CAUSES;
  throw ConfigError("unknown fault kind: " + s);
}

void PlantParams::validate() const {
  if (!(inlet_flow > 0.0)) throw ConfigError("plant: inlet_flow must be > 0");
  if (!(volume > 0.0)) throw ConfigError("plant: volume must be > 0");
  if (!(rate_const >= 0.0)) throw ConfigError("plant: rate_const must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("plant: dt must be > 0");
  if (!(noise_std >= 0.0)) throw ConfigError("plant: noise_std must be >= 0");
}

PlantState steady_state(const PlantParams& p, double inlet_conc) {
  PlantState s;
  s.t = 0.0;
  s.inlet_conc = inlet_conc;
  s.outlet_conc = p.process_gain() * inlet_conc;
  s.applied_flow = p.inlet_flow;
  return s;
}

namespace {

bool stiction_active(SystemMode m) {
  return m == SystemMode::F2 || m == SystemMode::F12;
}

}  // namespace

PlantState integrate_step(const PlantState& s, double flow_cmd,
                          const PlantParams& p) {
  if (!std::isfinite(flow_cmd) || !std::isfinite(s.outlet_conc) ||
      !std::isfinite(s.inlet_conc)) {
    throw NumericError("integrate_step: non-finite state or input");
  }

  PlantState out = s;
  if (!stiction_active(s.mode)) out.applied_flow = flow_cmd;

  const double flow = out.applied_flow;
  const double k_eff = p.rate_const * s.rate_scale;
  const auto deriv = [&](double c) {
    return (flow / p.volume) * (s.inlet_conc - c) - k_eff * c;
  };

  const double h = p.dt;
  const double c = s.outlet_conc;
  const double k1 = deriv(c);
  const double k2 = deriv(c + 0.5 * h * k1);
  const double k3 = deriv(c + 0.5 * h * k2);
  const double k4 = deriv(c + h * k3);
  double next = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (next < 0.0) next = 0.0;

  out.outlet_conc = next;
  out.t = s.t + h;
  return out;
}

double analytic_response(const PlantParams& p, double delta_inlet_conc,
                         double t_since_step) {
  if (t_since_step < 0.0) {
    throw NumericError("analytic_response: negative time");
  }
  return p.process_gain() * delta_inlet_conc *
         (1.0 - std::exp(-t_since_step / p.time_constant()));
}

double estimate_disturbance(double conc_now, double conc_init,
                            double inlet_conc_init, double t_since_step,
                            const PlantParams& p) {
  if (!(t_since_step > 0.0)) {
    throw NumericError(
        "estimate_disturbance: t_since_step must be > 0 (singular factor)");
  }
  const double factor =
      p.process_gain() * (1.0 - std::exp(-t_since_step / p.time_constant()));
  return inlet_conc_init + (conc_now - conc_init) / factor;
}

PlantState apply_fault_event(const PlantState& s, const FaultEvent& e) {
  if (e.kind != FaultKind::F2_CAUSES &&
      !(e.kappa > 0.0 && e.kappa < 1.0)) {
    throw ConfigError("fault event: kappa must lie in (0,1)");
  }

  PlantState out = s;
  switch (s.mode) {
    case SystemMode::NORMAL:
      switch (e.kind) {
        case FaultKind::F1_CAUSES:
          out.mode = SystemMode::F1;
          out.rate_scale = e.kappa;
          return out;
        case FaultKind::F2_CAUSES:
          out.mode = SystemMode::F2;
          return out;
        case FaultKind::F1_AND_F2_CAUSES:
          out.mode = SystemMode::F12;
          out.rate_scale = e.kappa;
          return out;
      }
      break;
    case SystemMode::F1:
      if (e.kind == FaultKind::F2_CAUSES) {
        out.mode = SystemMode::F12;
        return out;
      }
      break;
    case SystemMode::F2:
      if (e.kind == FaultKind::F1_CAUSES) {
        out.mode = SystemMode::F12;
        out.rate_scale = e.kappa;
        return out;
      }
      break;
    case SystemMode::F12:
      break;  // absorbing: no outgoing edges
  }
  throw TransitionError(std::string("illegal mode transition: ") +
                        to_string(s.mode) + " + " + to_string(e.kind));
}

double measure(const PlantState& s, const PlantParams& p, rng::Stream& noise) {
  double y = s.outlet_conc + noise.gaussian(p.noise_std);
  return y < 0.0 ? 0.0 : y;
}

}  // namespace cpsgen::plant
