#ifndef SUPERINT_COMMANDS_HPP
#define SUPERINT_COMMANDS_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "superint/config.hpp"
#include "superint/dynamics.hpp"
#include "superint/parallel.hpp"
#include "superint/sampling.hpp"
#include "superint/verify.hpp"

namespace superint {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_singularity = 3,
  exit_underflow = 4,
  exit_check_failed = 5,
};

inline int exit_code_for(Termination t) {
  switch (t) {
    case Termination::completed: return exit_ok;
    case Termination::singularity_abort: return exit_singularity;
    case Termination::step_underflow: return exit_underflow;
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// Serialization helpers

/// 17 significant digits: parsing the text gives back the same double.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json to_json(const DriftStats& d) {
  return {{"invariant", d.name}, {"max_drift", d.max_drift}, {"mean_drift", d.mean_drift},
          {"samples", d.samples}, {"tolerance", d.tolerance}, {"pass", d.pass}};
}

inline json to_json(const BracketStats& b) {
  return {{"invariant", b.name},       {"max_residual", b.max_residual},
          {"mean_residual", b.mean_residual}, {"points", b.points},
          {"skipped", b.skipped},      {"tolerance", b.tolerance},
          {"pass", b.pass}};
}

inline json to_json(const RotationStats& r) {
  return {{"factor", r.which},          {"max_residual", r.max_residual},
          {"mean_residual", r.mean_residual}, {"points", r.points},
          {"tolerance", r.tolerance},   {"pass", r.pass}};
}

inline json to_json(const RankSurvey& r) {
  return {{"invariants", r.invariants},
          {"expected_rank", r.expected_rank},
          {"points", r.points},
          {"skipped", r.skipped},
          {"matches", r.matches},
          {"fraction", r.fraction},
          {"min_singular_ratio", r.min_singular_ratio},
          {"required_fraction", rank_majority},
          {"pass", r.pass}};
}

inline json to_json(const IdentityResult& r) {
  json j = {{"identity", r.name},
            {"max_discrepancy", r.max_discrepancy},
            {"points", r.points},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
  if (r.fraction) {
    j["fraction"] = *r.fraction;
    j["required_fraction"] = rank_majority;
  }
  return j;
}

template <class T>
json to_json_list(const std::vector<T>& items) {
  json out = json::array();
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}

inline std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,q1,q2,p1,p2";
  for (const auto& track : traj.tracks) out += "," + track.name();
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    out += format_real(traj.times[i]);
    for (double v : {s.q1, s.q2, s.p1, s.p2}) out += "," + format_real(v);
    for (const auto& track : traj.tracks) out += "," + format_real(track.values[i]);
    out += "\n";
  }
  return out;
}

inline Trajectory run_configured_trajectory(const RunConfig& c) {
  return run_trajectory(c.system, c.initial_state, c.integrator, tracked_invariants(c));
}

inline std::vector<DriftStats> drift_if_possible(const Trajectory& traj, double tol) {
  if (traj.tracks.empty() || traj.times.size() < 2) return {};
  return drift_report(traj, tol);
}

// ---------------------------------------------------------------------------
// simulate

/// Writes trajectory.csv and summary.json; exit code reflects termination.
inline int cmd_simulate(const RunConfig& c) {
  const auto dir = prepare_output_dir(c.output_dir);
  const Trajectory traj = run_configured_trajectory(c);
  write_text(dir / "trajectory.csv", trajectory_csv(traj));
  json summary = {{"termination", to_string(traj.termination)},
                  {"samples", traj.times.size()},
                  {"accepted_steps", traj.accepted_steps},
                  {"rejected_steps", traj.rejected_steps},
                  {"drift", to_json_list(drift_if_possible(traj, c.drift_tolerance))},
                  {"config", to_json(c)}};
  write_json(dir / "summary.json", summary);
  if (traj.termination != Termination::completed) {
    std::fprintf(stderr, "integration stopped early: %s at t = %s\n",
                 to_string(traj.termination),
                 traj.times.empty() ? "0" : format_real(traj.times.back()).c_str());
  }
  return exit_code_for(traj.termination);
}

// ---------------------------------------------------------------------------
// verify

inline bool wants(const RunConfig& c, const char* check) {
  return std::find(c.checks.begin(), c.checks.end(), check) != c.checks.end();
}

/// Runs the configured checks. Returns the report and the exit code.
inline std::pair<json, int> run_verification(const RunConfig& c) {
  if (c.checks.empty()) throw ConfigError("no checks configured: nothing to verify");
  if (wants(c, "phase_rotation")) {
    const double j2 = c.initial_state.p2 * c.initial_state.p2 +
                      angular_term(c.system).value(c.initial_state.q2);
    if (!(j2 > 0.0)) throw ConfigError("phase_rotation requires J2 > 0 at the initial state");
  }

  VerificationReport report;
  json out = {{"config", to_json(c)}};
  int code = exit_ok;

  if (wants(c, "drift") || wants(c, "phase_rotation")) {
    const Trajectory traj = run_configured_trajectory(c);
    out["termination"] = to_string(traj.termination);
    out["samples"] = traj.times.size();
    if (traj.termination != Termination::completed) {
      code = exit_code_for(traj.termination);
    } else {
      if (wants(c, "drift")) report.drift = drift_report(traj, c.drift_tolerance);
      if (wants(c, "phase_rotation")) {
        report.rotations.push_back(phase_rotation_check(traj, RotatingFactor::M));
        report.rotations.push_back(phase_rotation_check(traj, RotatingFactor::N));
      }
    }
  }
  if (code == exit_ok && wants(c, "bracket")) {
    Rng rng(derive_seed(c.seed, 1));
    const auto points = random_regular_points(c.system, c.bracket_points, rng);
    for (const auto& inv : tracked_invariants(c)) {
      if (is_claimed_constant(inv.kind)) {
        report.brackets.push_back(bracket_residual(inv, c.system, points));
      }
    }
  }
  if (code == exit_ok && wants(c, "rank")) {
    Rng rng(derive_seed(c.seed, 2));
    const auto points = random_regular_points(c.system, c.rank_points, rng);
    std::vector<InvariantSpec> invs;
    for (auto kind : c.rank_invariants) invs.push_back({kind, c.system});
    report.ranks.push_back(rank_survey(invs, points, c.expected_rank));
  }

  out["drift"] = to_json_list(report.drift);
  out["bracket"] = to_json_list(report.brackets);
  out["phase_rotation"] = to_json_list(report.rotations);
  out["rank"] = to_json_list(report.ranks);
  if (code == exit_ok && !report.pass()) code = exit_check_failed;
  out["pass"] = code == exit_ok;
  return {out, code};
}

inline int cmd_verify(const RunConfig& c) {
  const auto dir = prepare_output_dir(c.output_dir);
  auto [report, code] = run_verification(c);
  write_json(dir / "report.json", report);
  if (code != exit_ok) std::fprintf(stderr, "verification failed (exit %d)\n", code);
  return code;
}

// ---------------------------------------------------------------------------
// identities

inline json identity_report(std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("sample count must be >= 1");
  const auto results = identity_suite(identity_names(), samples, seed);
  bool pass = true;
  for (const auto& r : results) pass = pass && r.pass;
  return {{"seed", seed}, {"samples", samples}, {"identities", to_json_list(results)}, {"pass", pass}};
}

inline int cmd_identities(std::size_t samples, std::uint64_t seed, const std::string& output_dir) {
  const auto dir = prepare_output_dir(output_dir);
  const json report = identity_report(samples, seed);
  write_json(dir / "identities.json", report);
  return report.at("pass").get<bool>() ? exit_ok : exit_check_failed;
}

// ---------------------------------------------------------------------------
// sweep

struct GridAxis {
  std::string key;
  std::vector<json> values;
};

struct SweepPoint {
  std::vector<json> values;  // one per axis
  SystemSpec system;
};

/// Axes in the fixed key order; malformed grids are config errors.
inline std::vector<GridAxis> parse_grid(const json& grid) {
  if (!grid.is_object() || grid.empty()) throw ConfigError("sweep needs a nonempty 'grid'");
  for (const auto& [key, value] : grid.items()) {
    const auto& keys = grid_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown grid key '" + key + "'");
    }
    if (!value.is_array() || value.empty()) {
      throw ConfigError("grid '" + key + "' must be a nonempty list");
    }
  }
  std::vector<GridAxis> axes;
  for (const auto& key : grid_keys()) {
    if (!grid.contains(key)) continue;
    GridAxis axis{key, {}};
    for (const auto& v : grid.at(key)) {
      if (key == "n_pairs") {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
          throw ConfigError("grid 'n_pairs' entries must be [n_x, n_y]");
        }
      }
      axis.values.push_back(v);
    }
    axes.push_back(std::move(axis));
  }
  if ((grid.contains("n_x") || grid.contains("n_y")) && grid.contains("n_pairs")) {
    throw ConfigError("grid cannot combine 'n_pairs' with 'n_x' / 'n_y'");
  }
  return axes;
}

/// Cartesian product of the axes, last axis varying fastest.
inline std::vector<SweepPoint> expand_grid(const SystemSpec& base, const std::vector<GridAxis>& axes) {
  std::vector<SweepPoint> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    json overrides = json::object();
    SweepPoint p;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const json& v = axes[a].values[idx[a]];
      p.values.push_back(v);
      if (axes[a].key == "n_pairs") {
        overrides["n_x"] = v[0];
        overrides["n_y"] = v[1];
      } else {
        overrides[axes[a].key] = v;
      }
    }
    p.system = with_parameters(base, overrides);
    out.push_back(std::move(p));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

struct SweepRow {
  std::size_t point = 0;
  std::size_t ic = 0;
  Termination termination = Termination::completed;
  double max_drift = 0.0;
  std::string worst_invariant;
  double max_bracket = 0.0;
  int rank = 0;
};

inline std::string grid_value_text(const json& v) {
  if (v.is_array()) return std::to_string(v[0].get<int>()) + ":" + std::to_string(v[1].get<int>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return format_real(v.get<double>());
}

/// One row per grid point and random initial condition. Items run in
/// parallel; each draws from its own seed stream, so rows do not depend on
/// scheduling.
inline std::pair<std::string, int> run_sweep(const RunConfig& c) {
  const auto axes = parse_grid(c.grid);
  const auto points = expand_grid(c.system, axes);

  std::vector<std::vector<InvariantKind>> tracked(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    tracked[i] = c.invariants_given ? c.invariants : default_invariants(points[i].system);
    for (auto kind : tracked[i]) {
      if (!is_applicable(kind, points[i].system)) {
        throw ConfigError(std::string("invariant '") + to_string(kind) +
                          "' is not defined at every grid point");
      }
    }
    for (auto kind : c.rank_invariants) {
      if (!is_applicable(kind, points[i].system)) {
        throw ConfigError(std::string("rank invariant '") + to_string(kind) +
                          "' is not defined at every grid point");
      }
    }
  }

  const std::size_t per = c.ics_per_point;
  const auto rows = parallel_map(points.size() * per, [&](std::size_t item) {
    const std::size_t pi = item / per;
    const SystemSpec& sys = points[pi].system;
    Rng rng(derive_seed(c.seed, item));
    const PhaseState s0 = random_regular_point(sys, rng);

    std::vector<InvariantSpec> invs;
    for (auto kind : tracked[pi]) invs.push_back({kind, sys});
    SweepRow row;
    row.point = pi;
    row.ic = item % per;
    const Trajectory traj = run_trajectory(sys, s0, c.integrator, invs);
    row.termination = traj.termination;
    for (const auto& d : drift_if_possible(traj, c.drift_tolerance)) {
      if (row.worst_invariant.empty() || d.max_drift > row.max_drift) {
        row.max_drift = d.max_drift;
        row.worst_invariant = d.name;
      }
    }
    const auto gh = grad_H(sys, s0);
    for (const auto& inv : invs) {
      row.max_bracket = std::max(row.max_bracket, normalized_bracket(invariant_gradient(inv, s0), gh));
    }
    std::vector<InvariantSpec> rank_invs;
    for (auto kind : c.rank_invariants) rank_invs.push_back({kind, sys});
    row.rank = independence_rank(rank_invs, s0).rank;
    return row;
  });

  std::string csv = "point,ic";
  for (const auto& axis : axes) csv += "," + axis.key;
  csv += ",termination,max_drift,worst_invariant,max_bracket,rank\n";
  int code = exit_ok;
  for (const auto& row : rows) {
    csv += std::to_string(row.point) + "," + std::to_string(row.ic);
    for (const auto& v : points[row.point].values) csv += "," + grid_value_text(v);
    csv += std::string(",") + to_string(row.termination) + "," + format_real(row.max_drift) + "," +
           row.worst_invariant + "," + format_real(row.max_bracket) + "," + std::to_string(row.rank) +
           "\n";
    if (row.termination != Termination::completed) {
      if (code == exit_ok || code == exit_check_failed) code = exit_code_for(row.termination);
    } else if (!(row.max_drift < c.drift_tolerance) && code == exit_ok) {
      code = exit_check_failed;
    }
  }
  return {csv, code};
}

inline int cmd_sweep(const RunConfig& c) {
  const auto dir = prepare_output_dir(c.output_dir);
  auto [csv, code] = run_sweep(c);
  write_text(dir / "sweep.csv", csv);
  if (code != exit_ok) std::fprintf(stderr, "sweep finished with failures (exit %d)\n", code);
  return code;
}

}  // namespace superint

#endif  // SUPERINT_COMMANDS_HPP
