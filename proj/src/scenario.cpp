#include "cpsgen/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cpsgen::scenario {

const char* to_string(IrregularKind k) {
  switch (k) {
    case IrregularKind::OPERATOR_MANUAL_POLL: return "OPERATOR_MANUAL_POLL";
    case IrregularKind::MODE_SWITCH_TRAFFIC: return "MODE_SWITCH_TRAFFIC";
    case IrregularKind::SAFETY_TRIP_BCAST: return "SAFETY_TRIP_BCAST";
  }
  return "?";
}

IrregularKind irregular_kind_from_string(const std::string& s) {
  if (s == "OPERATOR_MANUAL_POLL") return IrregularKind::OPERATOR_MANUAL_POLL;
  if (s == "MODE_SWITCH_TRAFFIC") return IrregularKind::MODE_SWITCH_TRAFFIC;
  if (s == "SAFETY_TRIP_BCAST") return IrregularKind::SAFETY_TRIP_BCAST;
  throw ConfigError("unknown irregular event kind: " + s);
}

const char* to_string(SessionVariant v) {
  switch (v) {
    case SessionVariant::LEGIT: return "LEGIT";
    case SessionVariant::COMPROMISED_HMI: return "COMPROMISED_HMI";
    case SessionVariant::SPOOFED: return "SPOOFED";
  }
  return "?";
}

SessionVariant session_variant_from_string(const std::string& s) {
  if (s == "LEGIT") return SessionVariant::LEGIT;
  if (s == "COMPROMISED_HMI") return SessionVariant::COMPROMISED_HMI;
  if (s == "SPOOFED") return SessionVariant::SPOOFED;
  throw ConfigError("unknown session variant: " + s);
}

const char* to_string(Failsafe f) {
  return f == Failsafe::LAST_KNOWN_GOOD ? "LAST_KNOWN_GOOD" : "FAIL_CLOSED";
}

Failsafe failsafe_from_string(const std::string& s) {
  if (s == "LAST_KNOWN_GOOD") return Failsafe::LAST_KNOWN_GOOD;
  if (s == "FAIL_CLOSED") return Failsafe::FAIL_CLOSED;
  throw ConfigError("unknown failsafe policy: " + s);
}

attacks::AttackStep parse_vector_step(const std::string& s) {
  std::istringstream in(s);
  std::string effect, layer, method, path;
  if (!(in >> effect >> layer >> method >> path)) {
    throw ConfigError("vector step needs 'EFFECT LAYER METHOD FROM>TO': " + s);
  }
  auto gt = path.find('>');
  if (gt == std::string::npos) {
    throw ConfigError("vector step path needs 'FROM>TO': " + s);
  }
  attacks::AttackStep st;
  st.effect = attacks::step_effect_from_string(effect);
  st.layer = attacks::entry_layer_from_string(layer);
  st.method = attacks::entry_method_from_string(method);
  st.from = netsim::node_from_string(path.substr(0, gt));
  st.to = netsim::node_from_string(path.substr(gt + 1));
  double off = 0.0;
  if (in >> off) st.offset = off;
  return st;
}

std::string format_vector_step(const attacks::AttackStep& st) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s %s %s %s>%s %.17g",
                attacks::to_string(st.effect), attacks::to_string(st.layer),
                attacks::to_string(st.method), netsim::to_string(st.from),
                netsim::to_string(st.to), st.offset);
  return buf;
}

// ---------------------------------------------------------------------------
// Minimal TOML-like reader: [table], [[array-table]], key = value with
// numbers, booleans, quoted strings and flat arrays.

namespace {

struct Value {
  enum class Type { NUM, BOOL, STR, ARR } type = Type::NUM;
  double num = 0.0;
  bool boolean = false;
  std::string str;
  std::vector<Value> arr;
  int line = 0;
};

struct Table {
  std::map<std::string, Value> kv;
  int line = 0;
};

struct Doc {
  Table root;
  std::vector<std::pair<std::string, Table>> sections;  // [name] and [[name]]
  std::vector<std::string> issues;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

bool parse_scalar(const std::string& tok, Value& v, std::string& err) {
  if (tok.empty()) {
    err = "empty value";
    return false;
  }
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') {
      err = "unterminated string";
      return false;
    }
    v.type = Value::Type::STR;
    v.str = tok.substr(1, tok.size() - 2);
    return true;
  }
  if (tok == "true" || tok == "false") {
    v.type = Value::Type::BOOL;
    v.boolean = (tok == "true");
    return true;
  }
  char* end = nullptr;
  v.num = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    err = "cannot parse value '" + tok + "'";
    return false;
  }
  v.type = Value::Type::NUM;
  return true;
}

bool parse_value(const std::string& raw, Value& v, std::string& err) {
  std::string tok = trim(raw);
  if (!tok.empty() && tok.front() == '[') {
    if (tok.back() != ']') {
      err = "unterminated array";
      return false;
    }
    v.type = Value::Type::ARR;
    std::string body = tok.substr(1, tok.size() - 2);
    std::string cur;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        std::string t = trim(cur);
        if (!t.empty()) {
          Value item;
          if (!parse_scalar(t, item, err)) return false;
          v.arr.push_back(item);
        }
        cur.clear();
      } else {
        cur += c;
      }
    }
    std::string t = trim(cur);
    if (!t.empty()) {
      Value item;
      if (!parse_scalar(t, item, err)) return false;
      v.arr.push_back(item);
    }
    return true;
  }
  return parse_scalar(tok, v, err);
}

Doc parse_doc(const std::string& text, const std::string& origin) {
  Doc doc;
  Table* current = &doc.root;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";

    if (line.front() == '[') {
      bool array = line.size() > 1 && line[1] == '[';
      std::string name;
      if (array) {
        if (line.size() < 5 || line.substr(line.size() - 2) != "]]") {
          doc.issues.push_back(where + "malformed [[section]] header");
          continue;
        }
        name = trim(line.substr(2, line.size() - 4));
      } else {
        if (line.back() != ']') {
          doc.issues.push_back(where + "malformed [section] header");
          continue;
        }
        name = trim(line.substr(1, line.size() - 2));
      }
      if (name.empty()) {
        doc.issues.push_back(where + "empty section name");
        continue;
      }
      if (!array) {
        for (auto& [n, t] : doc.sections) {
          if (n == name) {
            doc.issues.push_back(where + "duplicate section [" + name + "]");
          }
        }
      }
      doc.sections.emplace_back(name, Table{});
      doc.sections.back().second.line = line_no;
      current = &doc.sections.back().second;
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) {
      doc.issues.push_back(where + "expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      doc.issues.push_back(where + "empty key");
      continue;
    }
    Value v;
    std::string err;
    if (!parse_value(line.substr(eq + 1), v, err)) {
      doc.issues.push_back(where + err);
      continue;
    }
    v.line = line_no;
    if (current->kv.count(key)) {
      doc.issues.push_back(where + "duplicate key '" + key + "'");
    }
    current->kv[key] = std::move(v);
  }
  return doc;
}

/// Typed access into a parsed table; records unknown keys when released.
class TableReader {
 public:
  TableReader(const Table& t, std::string path, const std::string& origin,
              std::vector<std::string>& issues)
      : t_(t), path_(std::move(path)), origin_(origin), issues_(issues) {}

  double num(const std::string& key, double def) {
    const Value* v = take(key);
    if (!v) return def;
    if (v->type != Value::Type::NUM) {
      complain(key, "expects a number");
      return def;
    }
    return v->num;
  }

  bool boolean(const std::string& key, bool def) {
    const Value* v = take(key);
    if (!v) return def;
    if (v->type != Value::Type::BOOL) {
      complain(key, "expects true/false");
      return def;
    }
    return v->boolean;
  }

  std::string str(const std::string& key, const std::string& def) {
    const Value* v = take(key);
    if (!v) return def;
    if (v->type != Value::Type::STR) {
      complain(key, "expects a quoted string");
      return def;
    }
    return v->str;
  }

  std::vector<std::string> str_array(const std::string& key) {
    std::vector<std::string> out;
    const Value* v = take(key);
    if (!v) return out;
    if (v->type != Value::Type::ARR) {
      complain(key, "expects an array of strings");
      return out;
    }
    for (const Value& item : v->arr) {
      if (item.type != Value::Type::STR) {
        complain(key, "expects quoted strings in the array");
        return {};
      }
      out.push_back(item.str);
    }
    return out;
  }

  std::vector<double> num_array(const std::string& key) {
    std::vector<double> out;
    const Value* v = take(key);
    if (!v) return out;
    if (v->type != Value::Type::ARR) {
      complain(key, "expects an array of numbers");
      return out;
    }
    for (const Value& item : v->arr) {
      if (item.type != Value::Type::NUM) {
        complain(key, "expects numbers in the array");
        return {};
      }
      out.push_back(item.num);
    }
    return out;
  }

  bool has(const std::string& key) const { return t_.kv.count(key) > 0; }

  /// Flag everything that was never consumed.
  void finish() {
    for (const auto& [key, v] : t_.kv) {
      if (!used_.count(key)) {
        issues_.push_back(origin_ + ":" + std::to_string(v.line) +
                          ": unknown key '" + path_ + key + "'");
      }
    }
  }

 private:
  const Value* take(const std::string& key) {
    auto it = t_.kv.find(key);
    if (it == t_.kv.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  void complain(const std::string& key, const char* what) {
    auto it = t_.kv.find(key);
    const int line = it != t_.kv.end() ? it->second.line : t_.line;
    issues_.push_back(origin_ + ":" + std::to_string(line) + ": '" + path_ +
                      key + "' " + what);
  }

  const Table& t_;
  std::string path_;
  const std::string& origin_;
  std::vector<std::string>& issues_;
  std::set<std::string> used_;
};

template <typename Fn>
void with_enum(std::vector<std::string>& issues, const std::string& ctx, Fn fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    issues.push_back(ctx + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin) {
  Doc doc = parse_doc(text, origin);
  std::vector<std::string> issues = std::move(doc.issues);
  ScenarioConfig cfg;

  {
    TableReader r(doc.root, "", origin, issues);
    cfg.duration = r.num("duration", cfg.duration);
    cfg.seed = static_cast<std::uint64_t>(r.num("seed", 1.0));
    cfg.init_inlet_conc = r.num("c_a0_init", cfg.init_inlet_conc);
    r.finish();
  }

  for (const auto& [name, table] : doc.sections) {
    if (name == "plant") {
      TableReader r(table, "plant.", origin, issues);
      cfg.plant_params.inlet_flow = r.num("F", cfg.plant_params.inlet_flow);
      cfg.plant_params.volume = r.num("V", cfg.plant_params.volume);
      cfg.plant_params.rate_const = r.num("k", cfg.plant_params.rate_const);
      cfg.plant_params.noise_std = r.num("noise_std", cfg.plant_params.noise_std);
      cfg.plant_params.dt = r.num("dt", cfg.plant_params.dt);
      r.finish();
    } else if (name == "controller") {
      TableReader r(table, "controller.", origin, issues);
      cfg.controller.setpoint = r.num("setpoint", cfg.controller.setpoint);
      cfg.controller.kp_gain = r.num("kp", cfg.controller.kp_gain);
      cfg.controller.ki_gain = r.num("ki", cfg.controller.ki_gain);
      cfg.controller.u_bias = r.num("u_bias", cfg.controller.u_bias);
      cfg.controller.u_min = r.num("u_min", cfg.controller.u_min);
      cfg.controller.u_max = r.num("u_max", cfg.controller.u_max);
      cfg.controller.sample_period =
          r.num("sample_period", cfg.controller.sample_period);
      cfg.controller.haz_threshold =
          r.num("haz_threshold", cfg.controller.haz_threshold);
      r.finish();
    } else if (name == "traffic") {
      TableReader r(table, "traffic.", origin, issues);
      cfg.traffic.poll_period = r.num("poll_period", cfg.traffic.poll_period);
      cfg.traffic.report_period =
          r.num("report_period", cfg.traffic.report_period);
      cfg.traffic.jitter = r.num("jitter", cfg.traffic.jitter);
      r.finish();
    } else if (name == "supervision") {
      TableReader r(table, "supervision.", origin, issues);
      cfg.supervision.enabled = r.boolean("enabled", cfg.supervision.enabled);
      cfg.supervision.alarm_threshold =
          r.num("alarm_threshold", cfg.supervision.alarm_threshold);
      with_enum(issues, origin, [&] {
        cfg.supervision.failsafe = failsafe_from_string(
            r.str("failsafe", to_string(cfg.supervision.failsafe)));
      });
      cfg.supervision.dos_capacity =
          r.num("dos_capacity", cfg.supervision.dos_capacity);
      r.finish();
    } else if (name == "split") {
      TableReader r(table, "split.", origin, issues);
      cfg.split.train_fraction =
          r.num("train_fraction", cfg.split.train_fraction);
      r.finish();
    } else if (name == "disturbance") {
      TableReader r(table, "disturbance.", origin, issues);
      DisturbanceEvent ev;
      ev.at = r.num("at", 0.0);
      ev.value = r.num("c_a0", 0.0);
      r.finish();
      cfg.disturbances.push_back(ev);
    } else if (name == "fault") {
      TableReader r(table, "fault.", origin, issues);
      plant::FaultEvent ev;
      ev.at = r.num("at", 0.0);
      with_enum(issues, origin, [&] {
        ev.kind = plant::fault_kind_from_string(r.str("kind", "F1_CAUSES"));
      });
      ev.kappa = r.num("kappa", ev.kappa);
      r.finish();
      cfg.faults.push_back(ev);
    } else if (name == "session") {
      TableReader r(table, "session.", origin, issues);
      SessionConfig s;
      s.operator_id = r.str("operator", s.operator_id);
      s.login = r.num("login", 0.0);
      s.logout = r.num("logout", 0.0);
      s.mode_switch_at = r.num("mode_switch_at", 0.0);
      s.manual_u = r.num("manual_u", 0.0);
      s.auto_return_at = r.num("auto_return_at", -1.0);
      with_enum(issues, origin, [&] {
        s.variant = session_variant_from_string(r.str("variant", "LEGIT"));
      });
      s.attack_id = static_cast<int>(r.num("attack_id", 0.0));
      r.finish();
      cfg.sessions.push_back(s);
    } else if (name == "irregular") {
      TableReader r(table, "irregular.", origin, issues);
      IrregularEvent ev;
      ev.at = r.num("at", 0.0);
      with_enum(issues, origin, [&] {
        ev.kind = irregular_kind_from_string(r.str("kind", "OPERATOR_MANUAL_POLL"));
      });
      std::string mode = r.str("mode", "MANUAL");
      ev.mode = (mode == "AUTO") ? control::ControlMode::AUTO
                                 : control::ControlMode::MANUAL;
      if (r.has("manual_u")) ev.manual_u = r.num("manual_u", 0.0);
      r.finish();
      cfg.irregulars.push_back(ev);
    } else if (name == "attack") {
      TableReader r(table, "attack.", origin, issues);
      attacks::AttackSpec s;
      s.id = static_cast<int>(r.num("id", 0.0));
      with_enum(issues, origin, [&] {
        s.kind = attacks::attack_kind_from_string(r.str("kind", "INTEGRITY_SCA"));
      });
      with_enum(issues, origin, [&] {
        s.point = attacks::injection_point_from_string(
            r.str("point", "SENSOR_TO_CONTROLLER"));
      });
      with_enum(issues, origin, [&] {
        s.action = attacks::attack_action_from_string(r.str("action", "MODIFY"));
      });
      with_enum(issues, origin, [&] {
        s.waveform.kind = attacks::wave_kind_from_string(r.str("waveform", "STEP"));
      });
      s.waveform.magnitude = r.num("magnitude", 0.0);
      s.waveform.rate = r.num("rate", 0.0);
      s.waveform.threshold = r.num("threshold", 0.0);
      s.t_start = r.num("t_start", 0.0);
      s.t_end = r.num("t_end", 0.0);
      s.waveform.duration = r.num("wave_duration", s.t_end - s.t_start);
      s.zero_day = r.boolean("zero_day", false);
      s.dos_rate = r.num("dos_rate", 0.0);
      s.log_wipe = r.boolean("log_wipe", false);
      s.true_manipulation = r.boolean("true_manipulation", false);
      with_enum(issues, origin, [&] {
        s.report_policy = attacks::report_policy_from_string(
            r.str("report_policy", "FREEZE_LAST_GOOD"));
      });
      with_enum(issues, origin, [&] {
        s.report_waveform.kind = attacks::wave_kind_from_string(
            r.str("report_waveform", "STEP"));
      });
      s.report_waveform.magnitude = r.num("report_magnitude", 0.0);
      s.report_waveform.rate = r.num("report_rate", 0.0);
      s.report_waveform.duration =
          r.num("report_duration", s.t_end - s.t_start);
      for (const std::string& n : r.str_array("dm_targets")) {
        with_enum(issues, origin,
                  [&] { s.dm_targets.push_back(netsim::node_from_string(n)); });
      }
      for (const std::string& step : r.str_array("vector")) {
        with_enum(issues, origin,
                  [&] { s.steps.push_back(parse_vector_step(step)); });
      }
      if (s.steps.empty()) {
        attacks::AttackStep st;  // on-path attacker position, arms at window start
        s.steps.push_back(st);
      }
      r.finish();
      cfg.attack_specs.push_back(s);
    } else if (name == "attack_plan") {
      TableReader r(table, "attack_plan.", origin, issues);
      attacks::AttackGrid g;
      for (const std::string& k : r.str_array("kinds")) {
        with_enum(issues, origin,
                  [&] { g.kinds.push_back(attacks::attack_kind_from_string(k)); });
      }
      for (const std::string& p : r.str_array("points")) {
        with_enum(issues, origin, [&] {
          g.points.push_back(attacks::injection_point_from_string(p));
        });
      }
      for (const std::string& a : r.str_array("actions")) {
        with_enum(issues, origin, [&] {
          g.actions.push_back(attacks::attack_action_from_string(a));
        });
      }
      for (const std::string& w : r.str_array("waveforms")) {
        with_enum(issues, origin,
                  [&] { g.waveforms.push_back(attacks::wave_kind_from_string(w)); });
      }
      g.magnitudes = r.num_array("magnitudes");
      g.window_len = r.num("window_len", g.window_len);
      g.gap = r.num("gap", g.gap);
      g.start_after = r.num("start_after", g.start_after);
      g.limit = static_cast<int>(r.num("limit", g.limit));
      g.zero_day_count = static_cast<int>(r.num("zero_day_count", 0.0));
      g.ramp_rate = r.num("ramp_rate", g.ramp_rate);
      g.stealth_threshold = r.num("stealth_threshold", g.stealth_threshold);
      r.finish();
      cfg.attack_plan = g;
    } else {
      issues.push_back(origin + ":" + std::to_string(table.line) +
                       ": unknown section [" + name + "]");
    }
  }

  for (const std::string& issue : cfg.validate()) issues.push_back(issue);

  if (!issues.empty()) {
    std::string joined = "scenario configuration invalid:";
    for (const std::string& s : issues) joined += "\n  " + s;
    throw ConfigError(joined);
  }
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> issues;
  const auto check = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };

  try {
    plant_params.validate();
  } catch (const ConfigError& e) {
    issues.push_back(e.what());
  }
  try {
    controller.validate();
  } catch (const ConfigError& e) {
    issues.push_back(e.what());
  }
  try {
    traffic.validate();
  } catch (const ConfigError& e) {
    issues.push_back(e.what());
  }

  check(duration > 0.0, "duration must be > 0");
  check(init_inlet_conc >= 0.0, "c_a0_init must be >= 0");
  check(split.train_fraction > 0.0 && split.train_fraction < 1.0,
        "split.train_fraction must lie in (0,1)");
  check(std::abs(controller.sample_period - traffic.poll_period) < 1e-12,
        "controller.sample_period must equal traffic.poll_period");
  check(supervision.dos_capacity > 0.0, "supervision.dos_capacity must be > 0");

  const double grid = plant_params.dt;
  check(traffic.poll_period / grid >= 1.0 &&
            std::abs(std::round(traffic.poll_period / grid) - traffic.poll_period / grid) < 1e-6,
        "traffic.poll_period must be a multiple of plant.dt");
  check(std::abs(std::round(traffic.report_period / grid) - traffic.report_period / grid) < 1e-6,
        "traffic.report_period must be a multiple of plant.dt");

  for (const auto& d : disturbances) {
    check(d.at >= 0.0 && d.at <= duration,
          "disturbance at t=" + std::to_string(d.at) + " outside the scenario");
    check(d.value >= 0.0, "disturbance concentration must be >= 0");
  }
  for (const auto& f : faults) {
    check(f.at >= 0.0 && f.at <= duration,
          "fault at t=" + std::to_string(f.at) + " outside the scenario");
    if (f.kind != plant::FaultKind::F2_CAUSES) {
      check(f.kappa > 0.0 && f.kappa < 1.0, "fault kappa must lie in (0,1)");
    }
  }

  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto& s = sessions[i];
    const std::string tag = "session " + s.operator_id + ": ";
    check(s.login >= 0.0 && s.logout <= duration && s.login < s.logout,
          tag + "login/logout must satisfy 0 <= login < logout <= duration");
    check(s.mode_switch_at >= s.login && s.mode_switch_at <= s.logout,
          tag + "actions must fall inside the session");
    if (s.auto_return_at >= 0.0) {
      check(s.auto_return_at > s.mode_switch_at && s.auto_return_at <= s.logout,
            tag + "auto_return_at must follow the mode switch inside the session");
    }
    check(s.manual_u >= controller.u_min && s.manual_u <= controller.u_max,
          tag + "manual_u outside actuator limits");
    if (s.variant != SessionVariant::LEGIT) {
      check(s.attack_id > 0, tag + "non-legit variants need an attack_id");
    }
    for (std::size_t j = i + 1; j < sessions.size(); ++j) {
      const auto& o = sessions[j];
      if (o.operator_id != s.operator_id) continue;
      const bool overlap = s.login < o.logout && o.login < s.logout;
      check(!overlap, tag + "overlapping sessions for one operator");
    }
  }

  for (const auto& ev : irregulars) {
    check(ev.at >= 0.0 && ev.at <= duration,
          "irregular event at t=" + std::to_string(ev.at) +
              " outside the scenario");
    if (ev.manual_u) {
      check(*ev.manual_u >= controller.u_min && *ev.manual_u <= controller.u_max,
            "irregular event manual_u outside actuator limits");
    }
  }

  std::vector<int> ids;
  for (const auto& a : attack_specs) {
    attacks::validate_attack_spec(a, duration, controller.sample_period, issues);
    ids.push_back(a.id);
  }
  for (const auto& s : sessions) {
    if (s.variant != SessionVariant::LEGIT && s.attack_id > 0) {
      ids.push_back(s.attack_id);
    }
  }
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i) {
    check(ids[i] != ids[i - 1],
          "attack id " + std::to_string(ids[i]) + " is not unique");
  }

  std::vector<std::pair<double, int>> windows;
  for (const auto& a : attack_specs) windows.push_back({a.t_start, a.id});
  std::sort(windows.begin(), windows.end());
  for (std::size_t i = 1; i < windows.size(); ++i) {
    const auto* prev = &attack_specs[0];
    const auto* cur = prev;
    for (const auto& a : attack_specs) {
      if (a.id == windows[i - 1].second) prev = &a;
      if (a.id == windows[i].second) cur = &a;
    }
    check(cur->t_start > prev->t_end,
          "attack " + std::to_string(cur->id) + " overlaps attack " +
              std::to_string(prev->id) + " in time");
  }

  return issues;
}

void ScenarioConfig::validate_or_throw() const {
  std::vector<std::string> issues = validate();
  if (issues.empty()) return;
  std::string joined = "scenario configuration invalid:";
  for (const std::string& s : issues) joined += "\n  " + s;
  throw ConfigError(joined);
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string emit_scenario_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "duration = " << g17(cfg.duration) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "c_a0_init = " << g17(cfg.init_inlet_conc) << "\n";

  out << "\n[plant]\n";
  out << "F = " << g17(cfg.plant_params.inlet_flow) << "\n";
  out << "V = " << g17(cfg.plant_params.volume) << "\n";
  out << "k = " << g17(cfg.plant_params.rate_const) << "\n";
  out << "noise_std = " << g17(cfg.plant_params.noise_std) << "\n";
  out << "dt = " << g17(cfg.plant_params.dt) << "\n";

  out << "\n[controller]\n";
  out << "setpoint = " << g17(cfg.controller.setpoint) << "\n";
  out << "kp = " << g17(cfg.controller.kp_gain) << "\n";
  out << "ki = " << g17(cfg.controller.ki_gain) << "\n";
  out << "u_bias = " << g17(cfg.controller.u_bias) << "\n";
  out << "u_min = " << g17(cfg.controller.u_min) << "\n";
  out << "u_max = " << g17(cfg.controller.u_max) << "\n";
  out << "sample_period = " << g17(cfg.controller.sample_period) << "\n";
  out << "haz_threshold = " << g17(cfg.controller.haz_threshold) << "\n";

  out << "\n[traffic]\n";
  out << "poll_period = " << g17(cfg.traffic.poll_period) << "\n";
  out << "report_period = " << g17(cfg.traffic.report_period) << "\n";
  out << "jitter = " << g17(cfg.traffic.jitter) << "\n";

  out << "\n[supervision]\n";
  out << "enabled = " << (cfg.supervision.enabled ? "true" : "false") << "\n";
  out << "alarm_threshold = " << g17(cfg.supervision.alarm_threshold) << "\n";
  out << "failsafe = \"" << to_string(cfg.supervision.failsafe) << "\"\n";
  out << "dos_capacity = " << g17(cfg.supervision.dos_capacity) << "\n";

  out << "\n[split]\n";
  out << "train_fraction = " << g17(cfg.split.train_fraction) << "\n";

  for (const auto& d : cfg.disturbances) {
    out << "\n[[disturbance]]\n";
    out << "at = " << g17(d.at) << "\n";
    out << "c_a0 = " << g17(d.value) << "\n";
  }
  for (const auto& f : cfg.faults) {
    out << "\n[[fault]]\n";
    out << "at = " << g17(f.at) << "\n";
    out << "kind = \"" << plant::to_string(f.kind) << "\"\n";
    out << "kappa = " << g17(f.kappa) << "\n";
  }
  for (const auto& s : cfg.sessions) {
    out << "\n[[session]]\n";
    out << "operator = \"" << s.operator_id << "\"\n";
    out << "login = " << g17(s.login) << "\n";
    out << "logout = " << g17(s.logout) << "\n";
    out << "mode_switch_at = " << g17(s.mode_switch_at) << "\n";
    out << "manual_u = " << g17(s.manual_u) << "\n";
    out << "auto_return_at = " << g17(s.auto_return_at) << "\n";
    out << "variant = \"" << to_string(s.variant) << "\"\n";
    out << "attack_id = " << s.attack_id << "\n";
  }
  for (const auto& ev : cfg.irregulars) {
    out << "\n[[irregular]]\n";
    out << "at = " << g17(ev.at) << "\n";
    out << "kind = \"" << to_string(ev.kind) << "\"\n";
    out << "mode = \"" << control::to_string(ev.mode) << "\"\n";
    if (ev.manual_u) out << "manual_u = " << g17(*ev.manual_u) << "\n";
  }
  for (const auto& a : cfg.attack_specs) {
    out << "\n[[attack]]\n";
    out << "id = " << a.id << "\n";
    out << "kind = \"" << attacks::to_string(a.kind) << "\"\n";
    out << "point = \"" << attacks::to_string(a.point) << "\"\n";
    out << "action = \"" << attacks::to_string(a.action) << "\"\n";
    out << "waveform = \"" << attacks::to_string(a.waveform.kind) << "\"\n";
    out << "magnitude = " << g17(a.waveform.magnitude) << "\n";
    out << "rate = " << g17(a.waveform.rate) << "\n";
    out << "threshold = " << g17(a.waveform.threshold) << "\n";
    out << "wave_duration = " << g17(a.waveform.duration) << "\n";
    out << "t_start = " << g17(a.t_start) << "\n";
    out << "t_end = " << g17(a.t_end) << "\n";
    out << "zero_day = " << (a.zero_day ? "true" : "false") << "\n";
    out << "dos_rate = " << g17(a.dos_rate) << "\n";
    out << "log_wipe = " << (a.log_wipe ? "true" : "false") << "\n";
    out << "true_manipulation = " << (a.true_manipulation ? "true" : "false")
        << "\n";
    out << "report_policy = \"" << attacks::to_string(a.report_policy) << "\"\n";
    out << "report_waveform = \"" << attacks::to_string(a.report_waveform.kind)
        << "\"\n";
    out << "report_magnitude = " << g17(a.report_waveform.magnitude) << "\n";
    out << "report_rate = " << g17(a.report_waveform.rate) << "\n";
    out << "report_duration = " << g17(a.report_waveform.duration) << "\n";
    if (!a.dm_targets.empty()) {
      out << "dm_targets = [";
      for (std::size_t i = 0; i < a.dm_targets.size(); ++i) {
        out << (i ? ", " : "") << "\"" << netsim::to_string(a.dm_targets[i])
            << "\"";
      }
      out << "]\n";
    }
    out << "vector = [";
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      out << (i ? ", " : "") << "\"" << format_vector_step(a.steps[i]) << "\"";
    }
    out << "]\n";
  }
  if (cfg.attack_plan) {
    const auto& g = *cfg.attack_plan;
    out << "\n[attack_plan]\n";
    const auto emit_list = [&out](const char* key, const auto& items,
                                  auto name_fn) {
      out << key << " = [";
      for (std::size_t i = 0; i < items.size(); ++i) {
        out << (i ? ", " : "") << "\"" << name_fn(items[i]) << "\"";
      }
      out << "]\n";
    };
    emit_list("kinds", g.kinds, [](auto k) { return attacks::to_string(k); });
    emit_list("points", g.points, [](auto p) { return attacks::to_string(p); });
    emit_list("actions", g.actions, [](auto a) { return attacks::to_string(a); });
    emit_list("waveforms", g.waveforms,
              [](auto w) { return attacks::to_string(w); });
    out << "magnitudes = [";
    for (std::size_t i = 0; i < g.magnitudes.size(); ++i) {
      out << (i ? ", " : "") << g17(g.magnitudes[i]);
    }
    out << "]\n";
    out << "window_len = " << g17(g.window_len) << "\n";
    out << "gap = " << g17(g.gap) << "\n";
    out << "start_after = " << g17(g.start_after) << "\n";
    out << "limit = " << g.limit << "\n";
    out << "zero_day_count = " << g.zero_day_count << "\n";
    out << "ramp_rate = " << g17(g.ramp_rate) << "\n";
    out << "stealth_threshold = " << g17(g.stealth_threshold) << "\n";
  }
  return out.str();
}

}  // namespace cpsgen::scenario
