#ifndef SUPERINT_VERIFY_HPP
#define SUPERINT_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "superint/core.hpp"
#include "superint/dynamics.hpp"
#include "superint/hamiltonians.hpp"
#include "superint/invariants.hpp"
#include "superint/parallel.hpp"
#include "superint/potentials.hpp"
#include "superint/sampling.hpp"

namespace superint {

inline constexpr double drift_floor = 1e-10;
inline constexpr double default_drift_tolerance = 1e-7;
inline constexpr double analytic_bracket_tolerance = 1e-6;
inline constexpr double fd_bracket_tolerance = 1e-5;
inline constexpr double bracket_epsilon = 1e-12;
inline constexpr double rotation_tolerance = 1e-5;
inline constexpr double rank_threshold = 1e-8;
inline constexpr double rank_majority = 0.95;
inline constexpr double identity_tolerance = 1e-11;

// ---------------------------------------------------------------------------
// Drift

struct DriftStats {
  std::string name;
  double max_drift = 0.0;
  double mean_drift = 0.0;
  std::size_t samples = 0;
  double tolerance = default_drift_tolerance;
  bool pass = false;
};

/// max_t |I(t) - I(0)| / max(|I(0)|, drift_floor) over one track.
inline DriftStats track_drift(const Track& track, double tolerance = default_drift_tolerance) {
  if (track.values.empty()) {
    throw Error(ErrorKind::empty_track, "track " + track.name() + " has no samples");
  }
  if (track.values.size() < 2) {
    throw Error(ErrorKind::insufficient_samples,
                "track " + track.name() + " needs at least 2 samples");
  }
  DriftStats out;
  out.name = track.name();
  out.samples = track.values.size();
  out.tolerance = tolerance;
  const double i0 = track.values.front();
  const double scale = std::max(std::abs(i0), drift_floor);
  double sum = 0.0;
  bool finite = true;
  for (double v : track.values) {
    const double d = std::abs(v - i0) / scale;
    if (!std::isfinite(d)) finite = false;
    out.max_drift = std::max(out.max_drift, d);
    sum += d;
  }
  out.mean_drift = sum / static_cast<double>(out.samples);
  out.pass = finite && out.max_drift < tolerance;
  return out;
}

/// Drift of every track that is claimed to be conserved.
inline std::vector<DriftStats> drift_report(const Trajectory& traj,
                                            double tolerance = default_drift_tolerance) {
  if (traj.tracks.empty()) {
    throw Error(ErrorKind::empty_track, "trajectory has no invariant tracks");
  }
  std::vector<DriftStats> out;
  for (const auto& track : traj.tracks) {
    if (is_claimed_constant(track.spec.kind)) out.push_back(track_drift(track, tolerance));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson brackets with H

struct BracketStats {
  std::string name;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;
  double tolerance = analytic_bracket_tolerance;
  bool pass = false;
};

inline double normalized_bracket(const PhaseGradient& gi, const PhaseGradient& gh) {
  return std::abs(poisson_bracket(gi, gh)) / (gi.norm() * gh.norm() + bracket_epsilon);
}

/// Normalized {I, H} for the Hamiltonian of `system` at each point. Points at
/// which either gradient cannot be evaluated are skipped and counted.
inline BracketStats bracket_residual(const InvariantSpec& inv, const SystemSpec& system,
                                     const std::vector<PhaseState>& points) {
  BracketStats out;
  out.name = to_string(inv.kind);
  out.tolerance = has_analytic_gradient(inv.kind) ? analytic_bracket_tolerance
                                                  : fd_bracket_tolerance;
  const auto residuals = parallel_map(points.size(), [&](std::size_t i) -> std::optional<double> {
    try {
      return normalized_bracket(invariant_gradient(inv, points[i]), grad_H(system, points[i]));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::family_mismatch || e.kind() == ErrorKind::wrong_chart) throw;
      return std::nullopt;
    }
  });
  double sum = 0.0;
  bool finite = true;
  for (const auto& r : residuals) {
    if (!r) {
      ++out.skipped;
      continue;
    }
    if (!std::isfinite(*r)) finite = false;
    ++out.points;
    sum += *r;
    out.max_residual = std::max(out.max_residual, *r);
  }
  if (out.points > 0) out.mean_residual = sum / static_cast<double>(out.points);
  out.pass = finite && out.points > 0 && out.max_residual < out.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Phase rotation of M and N

enum class RotatingFactor { M, N };

inline const char* to_string(RotatingFactor f) { return f == RotatingFactor::M ? "M" : "N"; }

struct RotationStats {
  std::string which;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::size_t points = 0;
  double tolerance = rotation_tolerance;
  bool pass = false;
};

/// Compares dZ/dt, from a 5-point central stencil over uniformly spaced
/// samples, with i c lambda Z: c = 2 (M, oscillator), 1 (M, Kepler), k (N).
/// Residuals are normalized by |c lambda Z| + 1e-12.
inline RotationStats phase_rotation_check(const Trajectory& traj, RotatingFactor which) {
  const SystemSpec& system = traj.system;
  if (!is_polar_family(system)) {
    throw Error(ErrorKind::family_mismatch,
                "phase rotation is defined for the polar families only");
  }
  // uniform prefix; a trailing t_end sample may be off the grid
  std::size_t n = traj.times.size();
  if (n >= 3) {
    const double dt = traj.times[1] - traj.times[0];
    const double last = traj.times[n - 1] - traj.times[n - 2];
    if (std::abs(last - dt) > 1e-9 * dt) --n;
  }
  if (n < 5) {
    throw Error(ErrorKind::insufficient_samples,
                "phase rotation needs at least 5 uniformly spaced samples");
  }
  const double dt = traj.times[1] - traj.times[0];
  const double c = which == RotatingFactor::M ? radial_rate_factor(system)
                                              : angular_term(system).k.value();

  std::vector<ComplexValue> z(n);
  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = eval_Mr_Nphi(system, traj.states[i]);
    z[i] = which == RotatingFactor::M ? f.M : f.N;
    lambda[i] = f.lambda;
  }

  RotationStats out;
  out.which = to_string(which);
  double sum = 0.0;
  bool finite = true;
  const ComplexValue I{0.0, 1.0};
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const ComplexValue dz = (z[i - 2] - 8.0 * z[i - 1] + 8.0 * z[i + 1] - z[i + 2]) / (12.0 * dt);
    const ComplexValue expected = I * c * lambda[i] * z[i];
    const double r = std::abs(dz - expected) / (std::abs(expected) + 1e-12);
    if (!std::isfinite(r)) finite = false;
    out.max_residual = std::max(out.max_residual, r);
    sum += r;
    ++out.points;
  }
  out.mean_residual = sum / static_cast<double>(out.points);
  out.pass = finite && out.max_residual < out.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Functional independence

struct RankResult {
  int rank = 0;
  std::vector<double> singular_values;
};

/// Numerical rank of the matrix of invariant gradients (rows scaled to unit
/// length first so that magnitudes do not decide the rank).
inline RankResult independence_rank(const std::vector<InvariantSpec>& invs,
                                    const PhaseState& point) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(invs.size()), 4);
  for (std::size_t i = 0; i < invs.size(); ++i) {
    const auto g = invariant_gradient(invs[i], point);
    const double norm = g.norm();
    const double scale = norm > 0.0 ? 1.0 / norm : 0.0;
    const auto row = static_cast<Eigen::Index>(i);
    m(row, 0) = g.dq1 * scale;
    m(row, 1) = g.dq2 * scale;
    m(row, 2) = g.dp1 * scale;
    m(row, 3) = g.dp2 * scale;
  }
  RankResult out;
  if (invs.empty()) return out;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  for (double s : out.singular_values) {
    if (smax > 0.0 && s > rank_threshold * smax) ++out.rank;
  }
  return out;
}

struct RankSurvey {
  std::vector<std::string> invariants;
  int expected_rank = 0;
  std::size_t points = 0;
  std::size_t matches = 0;
  std::size_t skipped = 0;
  double fraction = 0.0;
  double min_singular_ratio = 0.0;  // smallest sigma_min / sigma_max seen
  bool pass = false;
};

/// Fraction of points at which the gradient rank equals `expected`.
inline RankSurvey rank_survey(const std::vector<InvariantSpec>& invs,
                              const std::vector<PhaseState>& points, int expected) {
  RankSurvey out;
  for (const auto& inv : invs) out.invariants.push_back(to_string(inv.kind));
  out.expected_rank = expected;
  const auto ranks = parallel_map(points.size(), [&](std::size_t i) -> std::optional<RankResult> {
    try {
      return independence_rank(invs, points[i]);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::family_mismatch || e.kind() == ErrorKind::wrong_chart) throw;
      return std::nullopt;
    }
  });
  out.min_singular_ratio = 1.0;
  for (const auto& r : ranks) {
    if (!r) {
      ++out.skipped;
      continue;
    }
    ++out.points;
    if (r->rank == expected) ++out.matches;
    if (!r->singular_values.empty() && r->singular_values.front() > 0.0) {
      out.min_singular_ratio = std::min(
          out.min_singular_ratio, r->singular_values.back() / r->singular_values.front());
    }
  }
  if (out.points > 0) {
    out.fraction = static_cast<double>(out.matches) / static_cast<double>(out.points);
  }
  out.pass = out.points > 0 && out.fraction >= rank_majority;
  return out;
}

// ---------------------------------------------------------------------------
// Identity checks

struct IdentityResult {
  std::string name;
  double max_discrepancy = 0.0;
  std::size_t points = 0;
  double tolerance = identity_tolerance;
  /// only for the rank-based check: fraction of points with equal spans
  std::optional<double> fraction;
  bool pass = false;
};

inline const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names = {
      "ttw_trig", "ttw_vak", "pw_vck", "fk_cartesian", "rotation", "vb12_reduction"};
  return names;
}

namespace detail {

/// |a - b| relative to the magnitude of the terms that produced them.
inline double discrepancy(double a, double b, double scale) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale, 1e-300});
}

inline const std::vector<Rational>& identity_ks() {
  static const std::vector<Rational> ks = {Rational(1, 1), Rational(2, 1), Rational(3, 1),
                                           Rational(1, 2), Rational(3, 2), Rational(5, 3)};
  return ks;
}

/// Draws phi with |sin(k phi)| and |cos(k phi)| both at least `margin`.
inline double regular_angle(Rng& rng, const Rational& k, double margin) {
  for (;;) {
    const double phi = rng.uniform(0.3, 3.0);
    const double a = k.value() * phi;
    if (std::abs(std::sin(a)) >= margin && std::abs(std::cos(a)) >= margin) return phi;
  }
}

/// Largest discrepancy of one identity over `count` draws; each draw returns
/// (lhs, rhs, scale).
template <class Draw>
IdentityResult max_discrepancy(const std::string& name, std::size_t count, Rng& rng, Draw draw) {
  IdentityResult out;
  out.name = name;
  bool finite = true;
  for (std::size_t i = 0; i < count; ++i) {
    const auto [lhs, rhs, scale] = draw(rng);
    const double d = discrepancy(lhs, rhs, scale);
    if (!std::isfinite(d)) finite = false;
    out.max_discrepancy = std::max(out.max_discrepancy, d);
    ++out.points;
  }
  out.pass = finite && out.points > 0 && out.max_discrepancy < out.tolerance;
  return out;
}

struct Sides {
  double lhs;
  double rhs;
  double scale;
};

}  // namespace detail

/// Runs one named identity at `count` random points (the rank check uses
/// min(count, 100) points and a 95 % majority).
inline IdentityResult run_identity(const std::string& name, std::size_t count, std::uint64_t seed) {
  using detail::Sides;
  if (count < 1) throw Error(ErrorKind::invalid_argument, "sample count must be >= 1");
  Rng rng(seed);
  const auto& ks = detail::identity_ks();
  constexpr double margin = 0.1;

  if (name == "ttw_trig") {
    // alpha / cos^2(k phi) + beta / sin^2(k phi) as an F_{2k} barrier
    return detail::max_discrepancy(name, count, rng, [&](Rng& r) {
      const Rational k = ks[r.index(ks.size())];
      const double alpha = r.uniform(0.1, 2.0), beta = r.uniform(0.1, 2.0);
      const double phi = detail::regular_angle(r, k.doubled(), margin);
      const auto m = map_ttw_to_ak(alpha, beta, k);
      return Sides{ttw_barrier(alpha, beta, k, phi), eval_Fk(m.k, m.ka, m.kb, phi), 0.0};
    });
  }
  if (name == "ttw_vak" || name == "pw_vck") {
    const bool kepler = name == "pw_vck";
    return detail::max_discrepancy(name, count, rng, [&](Rng& r) {
      const Rational k = ks[r.index(ks.size())];
      const double alpha = r.uniform(0.1, 2.0), beta = r.uniform(0.1, 2.0);
      const double coupling = r.uniform(0.5, 1.5);
      const double rad = r.uniform(0.3, 3.0);
      const double phi = detail::regular_angle(r, k.doubled(), margin);
      const PhaseState s{rad, phi, 0.0, 0.0, Chart::polar};
      const double barrier = ttw_barrier(alpha, beta, k, phi) / (2.0 * rad * rad);
      if (kepler) {
        const auto m = map_pw_to_ck(alpha, beta, k);
        return Sides{eval_pw(coupling, alpha, beta, k, rad, phi),
                     eval_potential(Vck{coupling, m.k, m.ka, m.kb}, s),
                     coupling / rad + barrier};
      }
      const auto m = map_ttw_to_ak(alpha, beta, k);
      return Sides{eval_ttw(coupling, alpha, beta, k, rad, phi),
                   eval_potential(Vak{coupling, m.k, m.ka, m.kb}, s),
                   0.5 * coupling * coupling * rad * rad + barrier};
    });
  }
  if (name == "fk_cartesian") {
    return detail::max_discrepancy(name, count, rng, [&](Rng& r) {
      const int k = 1 + static_cast<int>(r.index(3));
      const double ka = r.uniform(0.2, 1.5);
      const double kb = r.uniform(-0.8, 0.8) * ka;
      for (;;) {
        const double x = r.uniform(-3.0, 3.0), y = r.uniform(-3.0, 3.0);
        const double rad = std::hypot(x, y);
        if (rad < 0.3) continue;
        const double phi = std::atan2(y, x);
        if (std::abs(std::sin(k * phi)) < margin) continue;
        return Sides{fk_cartesian(k, ka, kb, x, y),
                     eval_Fk(Rational(k, 1), ka, kb, phi) / (rad * rad), 0.0};
      }
    });
  }
  if (name == "rotation") {
    return detail::max_discrepancy(name, count, rng, [&](Rng& r) {
      const Rational k = ks[r.index(ks.size())];
      const double ka = r.uniform(0.2, 1.5);
      const double kb = r.uniform(-0.8, 0.8) * ka;
      const double phi = detail::regular_angle(r, k, margin);
      return Sides{eval_Gk(k, ka, kb, phi), eval_Fk(k, ka, kb, phi - rotation_angle(k)), 0.0};
    });
  }
  if (name == "vb12_reduction") {
    // {H, Ex, Im C_xy}, {H, Ex, I3} and their union span the same 3-space
    const std::size_t n = std::min<std::size_t>(count, 100);
    IdentityResult out;
    out.name = name;
    std::size_t matches = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const SystemSpec sys = random_parameters(VbN{1, 2, 1.0, 0.0, 0.0}, rng);
      const PhaseState s = random_regular_point(sys, rng);
      auto spec = [&](InvariantKind kind) { return InvariantSpec{kind, sys}; };
      const auto a = independence_rank(
          {spec(InvariantKind::H), spec(InvariantKind::Ex), spec(InvariantKind::ImCxy)}, s);
      const auto b = independence_rank(
          {spec(InvariantKind::H), spec(InvariantKind::Ex), spec(InvariantKind::I3_12)}, s);
      const auto u = independence_rank({spec(InvariantKind::H), spec(InvariantKind::Ex),
                                        spec(InvariantKind::ImCxy), spec(InvariantKind::I3_12)},
                                       s);
      if (a.rank == 3 && b.rank == 3 && u.rank == 3) ++matches;
      // 4th singular value of the union measures how far I3 leaves the span
      if (u.singular_values.size() == 4) {
        worst = std::max(worst, u.singular_values[3] / u.singular_values[0]);
      }
      ++out.points;
    }
    out.max_discrepancy = worst;
    out.tolerance = rank_threshold;
    out.fraction = static_cast<double>(matches) / static_cast<double>(n);
    out.pass = *out.fraction >= rank_majority;
    return out;
  }
  throw Error(ErrorKind::invalid_argument, "unknown identity '" + name + "'");
}

/// Each identity gets its own derived stream so results do not depend on the
/// selection or order of names.
inline std::vector<IdentityResult> identity_suite(const std::vector<std::string>& names,
                                                  std::size_t count, std::uint64_t seed) {
  std::vector<IdentityResult> out;
  for (const auto& name : names) {
    const auto& all = identity_names();
    const auto pos = std::find(all.begin(), all.end(), name);
    if (pos == all.end()) throw Error(ErrorKind::invalid_argument, "unknown identity '" + name + "'");
    out.push_back(run_identity(name, count, derive_seed(seed, static_cast<std::uint64_t>(pos - all.begin()))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregate report

struct VerificationReport {
  std::vector<DriftStats> drift;
  std::vector<BracketStats> brackets;
  std::vector<RotationStats> rotations;
  std::vector<RankSurvey> ranks;
  std::vector<IdentityResult> identities;

  bool empty() const {
    return drift.empty() && brackets.empty() && rotations.empty() && ranks.empty() &&
           identities.empty();
  }

  bool pass() const {
    auto ok = [](const auto& v) {
      return std::all_of(v.begin(), v.end(), [](const auto& x) { return x.pass; });
    };
    return !empty() && ok(drift) && ok(brackets) && ok(rotations) && ok(ranks) && ok(identities);
  }
};

}  // namespace superint

#endif  // SUPERINT_VERIFY_HPP
