#ifndef SUPERINT_CONFIG_HPP
#define SUPERINT_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "superint/core.hpp"
#include "superint/dynamics.hpp"
#include "superint/invariants.hpp"
#include "superint/potentials.hpp"

namespace superint {

using nlohmann::json;

/// Any problem with a run configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SystemSpec system;
  PhaseState initial_state;
  std::string preset;
  IntegratorOptions integrator;
  std::vector<InvariantKind> invariants;
  bool invariants_given = false;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<std::string> checks;
  double drift_tolerance = 1e-7;
  std::size_t bracket_points = 1000;
  std::size_t rank_points = 100;
  std::vector<InvariantKind> rank_invariants;
  int expected_rank = 0;
  /// Parameter overrides applied to the tracked invariants only. A nonempty
  /// object builds the invariants for a different system than the one being
  /// integrated (negative control).
  json invariant_overrides = json::object();
  json grid = json::object();
  std::size_t ics_per_point = 5;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {"drift", "bracket", "phase_rotation", "rank"};
  return names;
}

inline const std::vector<std::string>& grid_keys() {
  static const std::vector<std::string> keys = {"k",      "ka",  "kb",  "g",
                                                "omega0", "n_x", "n_y", "n_pairs"};
  return keys;
}

// ---------------------------------------------------------------------------
// System parameters <-> flat JSON

namespace detail {

inline const std::vector<std::string>& system_keys() {
  static const std::vector<std::string> keys = {"family", "n_x", "n_y", "omega0", "k1",
                                                "k2",     "k",   "g",   "ka",     "kb"};
  return keys;
}

inline double get_real(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ConfigError(std::string("'") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

inline Rational get_rational(const json& j, const char* key, const Rational& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>(), 1);
  } catch (const Error& e) {
    throw ConfigError(std::string("'") + key + "': " + e.what());
  }
  throw ConfigError(std::string("'") + key + "' must be a string \"p/q\" or a positive integer");
}

inline std::string rational_text(const Rational& k) {
  return k.den() == 1 ? std::to_string(k.num()) : k.to_string();
}

}  // namespace detail

inline SystemSpec parse_system(const json& j) {
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError("'family' is required (VaN, VbN, Vak, Vck or VckRot)");
  }
  const auto family = j.at("family").get<std::string>();
  using detail::get_int, detail::get_real, detail::get_rational;
  SystemSpec spec;
  std::set<std::string> allowed = {"family"};
  if (family == "VaN" || family == "VbN") {
    allowed.insert({"n_x", "n_y", "omega0", "k1", "k2"});
    const int nx = get_int(j, "n_x", 1);
    const int ny = get_int(j, "n_y", family == "VaN" ? 1 : 2);
    const double w = get_real(j, "omega0", 1.0);
    const double k1 = get_real(j, "k1", 0.0), k2 = get_real(j, "k2", 0.0);
    if (family == "VaN") {
      spec = VaN{nx, ny, w, k1, k2};
    } else {
      spec = VbN{nx, ny, w, k1, k2};
    }
  } else if (family == "Vak") {
    allowed.insert({"omega0", "k", "ka", "kb"});
    spec = Vak{get_real(j, "omega0", 1.0), get_rational(j, "k", Rational(1, 1)),
               get_real(j, "ka", 0.0), get_real(j, "kb", 0.0)};
  } else if (family == "Vck" || family == "VckRot") {
    allowed.insert({"g", "k", "ka", "kb"});
    const double g = get_real(j, "g", 1.0);
    const Rational k = get_rational(j, "k", Rational(1, 1));
    const double ka = get_real(j, "ka", 0.0), kb = get_real(j, "kb", 0.0);
    if (family == "Vck") {
      spec = Vck{g, k, ka, kb};
    } else {
      spec = VckRot{g, k, ka, kb};
    }
  } else {
    throw ConfigError("unknown family '" + family + "'");
  }
  for (const auto& key : detail::system_keys()) {
    if (j.contains(key) && !allowed.count(key)) {
      throw ConfigError("parameter '" + key + "' does not belong to family " + family);
    }
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

inline json system_to_json(const SystemSpec& spec) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VaN> || std::is_same_v<T, VbN>) {
          return {{"family", std::is_same_v<T, VaN> ? "VaN" : "VbN"},
                  {"n_x", c.n_x},
                  {"n_y", c.n_y},
                  {"omega0", c.omega0},
                  {"k1", c.k1},
                  {"k2", c.k2}};
        } else if constexpr (std::is_same_v<T, Vak>) {
          return {{"family", "Vak"},
                  {"omega0", c.omega0},
                  {"k", detail::rational_text(c.k)},
                  {"ka", c.ka},
                  {"kb", c.kb}};
        } else {
          return {{"family", std::is_same_v<T, Vck> ? "Vck" : "VckRot"},
                  {"g", c.g},
                  {"k", detail::rational_text(c.k)},
                  {"ka", c.ka},
                  {"kb", c.kb}};
        }
      },
      spec);
}

/// The same family with some parameters replaced (keys as in the config).
inline SystemSpec with_parameters(const SystemSpec& spec, const json& overrides) {
  json j = system_to_json(spec);
  for (const auto& [key, value] : overrides.items()) {
    if (key == "family") throw ConfigError("overrides cannot change the family");
    j[key] = value;
  }
  return parse_system(j);
}

// ---------------------------------------------------------------------------
// Defaults per family

inline std::vector<InvariantKind> default_invariants(const SystemSpec& spec) {
  using K = InvariantKind;
  if (std::holds_alternative<VaN>(spec)) return {K::H, K::Ex, K::Ey, K::ReBxy, K::ImBxy};
  if (const auto* c = std::get_if<VbN>(&spec)) {
    std::vector<K> out = {K::H, K::Ex, K::Ey, K::ReCxy, K::ImCxy};
    if (c->n_x == 1 && c->n_y == 2) out.push_back(K::I3_12);
    return out;
  }
  return {K::H, K::J2, K::ReKk, K::ImKk};
}

/// The triple whose gradient rank certifies superintegrability.
inline std::vector<InvariantKind> default_rank_invariants(const SystemSpec& spec) {
  using K = InvariantKind;
  if (std::holds_alternative<VaN>(spec)) return {K::Ex, K::Ey, K::ImBxy};
  if (std::holds_alternative<VbN>(spec)) return {K::H, K::Ex, K::ImCxy};
  return {K::H, K::J2, K::ImKk};
}

inline std::vector<std::string> default_checks(const SystemSpec& spec) {
  if (is_polar_family(spec)) return {"drift", "bracket", "phase_rotation", "rank"};
  return {"drift", "bracket", "rank"};
}

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"sw-isotropic", "ttw-k2", "pw-k1",
                                                 "kepler-circular", "vb-12"};
  return names;
}

inline json state_json(const char* chart, double q1, double q2, double p1, double p2) {
  return {{"chart", chart}, {"q1", q1}, {"q2", q2}, {"p1", p1}, {"p2", p2}};
}

/// Embedded configurations. ttw-k2 is the TTW system with k = 2 and
/// (alpha, beta) = (0.3, 0.5), i.e. Vak with k = 4; pw-k1 is its Kepler
/// counterpart with k = 1, i.e. Vck with k = 2.
inline json preset_json(const std::string& name) {
  const double pi = std::numbers::pi;
  json j;
  if (name == "sw-isotropic") {
    j = {{"family", "VaN"}, {"n_x", 1}, {"n_y", 1}, {"omega0", 1.0}, {"k1", 0.3}, {"k2", 0.5}};
    j["initial_state"] = state_json("cartesian", 1.0, 0.8, 0.3, -0.4);
  } else if (name == "ttw-k2") {
    const auto m = map_ttw_to_ak(0.3, 0.5, Rational(2, 1));
    j = {{"family", "Vak"}, {"omega0", 1.0}, {"k", detail::rational_text(m.k)},
         {"ka", m.ka},      {"kb", m.kb}};
    j["initial_state"] = state_json("polar", 1.0, pi / 8.0, 0.3, 0.5);
  } else if (name == "pw-k1") {
    const auto m = map_pw_to_ck(0.3, 0.5, Rational(1, 1));
    j = {{"family", "Vck"}, {"g", 1.0}, {"k", detail::rational_text(m.k)},
         {"ka", m.ka},      {"kb", m.kb}};
    j["initial_state"] = state_json("polar", 1.2, pi / 4.0, 0.2, 0.6);
  } else if (name == "kepler-circular") {
    j = {{"family", "Vck"}, {"g", 1.0}, {"k", "1"}, {"ka", 0.0}, {"kb", 0.0}};
    j["initial_state"] = state_json("polar", 1.0, 0.0, 0.0, 1.0);
  } else if (name == "vb-12") {
    j = {{"family", "VbN"}, {"n_x", 1}, {"n_y", 2}, {"omega0", 1.0}, {"k1", 0.4}, {"k2", 0.7}};
    j["initial_state"] = state_json("cartesian", 1.0, 0.5, 0.2, 0.3);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  j["t_end"] = 50.0;
  j["sample_interval"] = 0.01;
  return j;
}

// ---------------------------------------------------------------------------
// RunConfig <-> JSON

namespace detail {

inline const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys = {
      "preset",         "initial_state",   "rel_tol",        "abs_tol",
      "max_step",       "t_end",           "sample_interval", "scheme",
      "fixed_step",     "invariants",      "seed",           "output_dir",
      "checks",         "drift_tolerance", "bracket_points", "rank_points",
      "rank_invariants", "expected_rank",  "invariant_overrides", "grid",
      "ics_per_point"};
  return keys;
}

inline std::vector<InvariantKind> parse_kinds(const json& j, const char* key,
                                              const SystemSpec& spec) {
  if (!j.at(key).is_array()) throw ConfigError(std::string("'") + key + "' must be a list");
  std::vector<InvariantKind> out;
  for (const auto& item : j.at(key)) {
    if (!item.is_string()) throw ConfigError(std::string("'") + key + "' entries must be names");
    const auto name = item.get<std::string>();
    const auto kind = parse_invariant_kind(name);
    if (!kind) throw ConfigError("unknown invariant '" + name + "'");
    if (!is_applicable(*kind, spec)) {
      throw ConfigError("invariant '" + name + "' is not defined for family " + family_name(spec));
    }
    out.push_back(*kind);
  }
  return out;
}

inline std::vector<std::string> kind_names(const std::vector<InvariantKind>& kinds) {
  std::vector<std::string> out;
  for (auto k : kinds) out.push_back(to_string(k));
  return out;
}

inline std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

inline PhaseState parse_state(const json& j) {
  if (!j.is_object()) throw ConfigError("'initial_state' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "chart" && key != "q1" && key != "q2" && key != "p1" && key != "p2") {
      throw ConfigError("unknown key '" + key + "' in initial_state");
    }
  }
  PhaseState s;
  const std::string chart = j.value("chart", std::string("cartesian"));
  if (chart == "cartesian") {
    s.chart = Chart::cartesian;
  } else if (chart == "polar") {
    s.chart = Chart::polar;
  } else {
    throw ConfigError("initial_state.chart must be 'cartesian' or 'polar'");
  }
  for (const char* key : {"q1", "q2", "p1", "p2"}) {
    if (!j.contains(key)) throw ConfigError(std::string("initial_state.") + key + " is required");
  }
  s.q1 = get_real(j, "q1", 0.0);
  s.q2 = get_real(j, "q2", 0.0);
  s.p1 = get_real(j, "p1", 0.0);
  s.p2 = get_real(j, "p2", 0.0);
  return s;
}

inline json state_to_json(const PhaseState& s) {
  return {{"chart", to_string(s.chart)}, {"q1", s.q1}, {"q2", s.q2}, {"p1", s.p1}, {"p2", s.p2}};
}

}  // namespace detail

/// Brings a state into the natural chart of `spec` and checks that the
/// system can be evaluated there.
inline PhaseState resolve_initial_state(const SystemSpec& spec, PhaseState s) {
  try {
    validate(s);
    if (s.chart != natural_chart(spec)) {
      s = s.chart == Chart::cartesian ? to_polar(s) : to_cartesian(s);
    }
    (void)eval_H(spec, s);
  } catch (const Error& e) {
    throw ConfigError(std::string("initial_state: ") + e.what());
  }
  return s;
}

/// Parses a flat configuration. A "preset" key supplies defaults that the
/// remaining keys override.
inline RunConfig parse_config(const json& input) {
  if (!input.is_object()) throw ConfigError("configuration must be a JSON object");
  json j = json::object();
  if (input.contains("preset")) {
    if (!input.at("preset").is_string()) throw ConfigError("'preset' must be a string");
    j = preset_json(input.at("preset").get<std::string>());
    // a new family in the file replaces all preset system parameters
    if (input.contains("family")) {
      for (const auto& key : detail::system_keys()) j.erase(key);
    }
  }
  for (const auto& [key, value] : input.items()) j[key] = value;

  const auto& sys_keys = detail::system_keys();
  for (const auto& [key, value] : j.items()) {
    if (!detail::run_keys().count(key) &&
        std::find(sys_keys.begin(), sys_keys.end(), key) == sys_keys.end()) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }

  RunConfig c;
  c.preset = j.value("preset", std::string());
  c.system = parse_system(j);
  if (!j.contains("initial_state")) throw ConfigError("'initial_state' is required");
  c.initial_state = resolve_initial_state(c.system, detail::parse_state(j.at("initial_state")));

  auto& o = c.integrator;
  using detail::get_real;
  o.rel_tol = get_real(j, "rel_tol", o.rel_tol);
  o.abs_tol = get_real(j, "abs_tol", o.abs_tol);
  if (j.contains("max_step") && !j.at("max_step").is_null()) o.max_step = get_real(j, "max_step", o.max_step);
  o.t_end = get_real(j, "t_end", o.t_end);
  o.sample_interval = get_real(j, "sample_interval", o.sample_interval);
  o.fixed_step = get_real(j, "fixed_step", o.fixed_step);
  if (j.contains("scheme")) {
    const auto scheme = j.at("scheme").is_string() ? j.at("scheme").get<std::string>() : "";
    if (scheme == "adaptive_rk") {
      o.scheme = Scheme::adaptive_rk;
    } else if (scheme == "fixed_symplectic") {
      o.scheme = Scheme::fixed_symplectic;
      if (is_polar_family(c.system)) {
        throw ConfigError("the fixed_symplectic scheme needs a Cartesian family");
      }
    } else {
      throw ConfigError("'scheme' must be 'adaptive_rk' or 'fixed_symplectic'");
    }
  }
  try {
    validate(o);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  c.invariants_given = j.contains("invariants");
  c.invariants = c.invariants_given ? detail::parse_kinds(j, "invariants", c.system)
                                    : default_invariants(c.system);
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw ConfigError("'seed' must be a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw ConfigError("'output_dir' must be a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }

  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw ConfigError("'checks' must be a list");
    for (const auto& item : j.at("checks")) {
      const auto name = item.is_string() ? item.get<std::string>() : "";
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError("unknown check '" + item.dump() + "'");
      }
      c.checks.push_back(name);
    }
  } else {
    c.checks = default_checks(c.system);
  }
  if (std::find(c.checks.begin(), c.checks.end(), "phase_rotation") != c.checks.end() &&
      !is_polar_family(c.system)) {
    throw ConfigError("phase_rotation applies to polar families only");
  }

  c.drift_tolerance = get_real(j, "drift_tolerance", c.drift_tolerance);
  if (!(c.drift_tolerance > 0.0)) throw ConfigError("'drift_tolerance' must be > 0");
  c.bracket_points = detail::get_count(j, "bracket_points", c.bracket_points);
  c.rank_points = detail::get_count(j, "rank_points", c.rank_points);
  c.rank_invariants = j.contains("rank_invariants")
                          ? detail::parse_kinds(j, "rank_invariants", c.system)
                          : default_rank_invariants(c.system);
  c.expected_rank = detail::get_int(j, "expected_rank", static_cast<int>(c.rank_invariants.size()));
  if (c.expected_rank < 0 || c.expected_rank > 4) throw ConfigError("'expected_rank' must be in [0, 4]");

  if (j.contains("invariant_overrides")) {
    c.invariant_overrides = j.at("invariant_overrides");
    if (!c.invariant_overrides.is_object()) {
      throw ConfigError("'invariant_overrides' must be an object");
    }
    (void)with_parameters(c.system, c.invariant_overrides);
  }
  if (j.contains("grid")) {
    c.grid = j.at("grid");
    if (!c.grid.is_object()) throw ConfigError("'grid' must be an object");
  }
  c.ics_per_point = detail::get_count(j, "ics_per_point", c.ics_per_point);
  return c;
}

inline json to_json(const RunConfig& c) {
  json j = system_to_json(c.system);
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["initial_state"] = detail::state_to_json(c.initial_state);
  const auto& o = c.integrator;
  j["rel_tol"] = o.rel_tol;
  j["abs_tol"] = o.abs_tol;
  j["max_step"] = std::isfinite(o.max_step) ? json(o.max_step) : json(nullptr);
  j["t_end"] = o.t_end;
  j["sample_interval"] = o.sample_interval;
  j["scheme"] = to_string(o.scheme);
  j["fixed_step"] = o.fixed_step;
  j["invariants"] = detail::kind_names(c.invariants);
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["checks"] = c.checks;
  j["drift_tolerance"] = c.drift_tolerance;
  j["bracket_points"] = c.bracket_points;
  j["rank_points"] = c.rank_points;
  j["rank_invariants"] = detail::kind_names(c.rank_invariants);
  j["expected_rank"] = c.expected_rank;
  j["invariant_overrides"] = c.invariant_overrides;
  j["grid"] = c.grid;
  j["ics_per_point"] = c.ics_per_point;
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

inline RunConfig preset_config(const std::string& name) {
  return parse_config(json{{"preset", name}});
}

/// The tracked invariants, built for the overridden system when the config
/// carries invariant_overrides.
inline std::vector<InvariantSpec> tracked_invariants(const RunConfig& c) {
  const SystemSpec sys = c.invariant_overrides.empty()
                             ? c.system
                             : with_parameters(c.system, c.invariant_overrides);
  std::vector<InvariantSpec> out;
  for (auto kind : c.invariants) out.push_back({kind, sys});
  return out;
}

}  // namespace superint

#endif  // SUPERINT_CONFIG_HPP
