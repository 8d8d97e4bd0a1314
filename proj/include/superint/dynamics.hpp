#ifndef SUPERINT_DYNAMICS_HPP
#define SUPERINT_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "superint/core.hpp"
#include "superint/dop853.hpp"
#include "superint/hamiltonians.hpp"
#include "superint/invariants.hpp"
#include "superint/potentials.hpp"

namespace superint {

/// Integration stops once the position comes this close to an active
/// singular set (measured like singular_distance).
inline constexpr double guard_distance = 1e-6;

enum class Scheme { adaptive_rk, fixed_symplectic };

inline const char* to_string(Scheme s) {
  return s == Scheme::adaptive_rk ? "adaptive_rk" : "fixed_symplectic";
}

struct IntegratorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double t_end = 10.0;
  double sample_interval = 0.01;
  Scheme scheme = Scheme::adaptive_rk;
  /// Step of the fixed-step symplectic scheme.
  double fixed_step = 1e-3;
};

inline void validate(const IntegratorOptions& o) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_argument, what);
  };
  if (!(o.rel_tol > 0.0) || !(o.abs_tol > 0.0)) fail("tolerances must be > 0");
  if (!(o.t_end > 0.0) || !std::isfinite(o.t_end)) fail("t_end must be > 0");
  if (!(o.sample_interval > 0.0)) fail("sample_interval must be > 0");
  if (!(o.max_step > 0.0)) fail("max_step must be > 0");
  if (!(o.fixed_step > 0.0)) fail("fixed_step must be > 0");
}

enum class Termination { completed, singularity_abort, step_underflow };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::singularity_abort: return "singularity_abort";
    case Termination::step_underflow: return "step_underflow";
  }
  return "?";
}

struct Track {
  InvariantSpec spec;
  std::vector<double> values;

  std::string name() const { return to_string(spec.kind); }
};

struct Trajectory {
  SystemSpec system;
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<Track> tracks;
  Termination termination = Termination::completed;
  long accepted_steps = 0;
  long rejected_steps = 0;

  const Track* find(InvariantKind kind) const {
    for (const auto& t : tracks) {
      if (t.spec.kind == kind) return &t;
    }
    return nullptr;
  }
};

inline PhaseState with_reversed_momenta(PhaseState s) {
  s.p1 = -s.p1;
  s.p2 = -s.p2;
  return s;
}

namespace detail {

using Vec4 = std::array<double, 4>;

inline Vec4 pack(const PhaseState& s) { return {s.q1, s.q2, s.p1, s.p2}; }

inline PhaseState unpack(const Vec4& y, Chart chart) {
  return {y[0], y[1], y[2], y[3], chart};
}

/// Collects samples and invariant values; returns false when a sampled state
/// cannot be evaluated.
class Sampler {
 public:
  Sampler(Trajectory& traj, double interval, double t_end)
      : traj_(traj), interval_(interval), t_end_(t_end) {
    count_ = static_cast<long>(std::floor(t_end / interval + 1e-9)) + 1;
  }

  double next_time() const {
    if (index_ < count_) return static_cast<double>(index_) * interval_;
    return index_ == count_ && needs_final() ? t_end_
                                             : std::numeric_limits<double>::infinity();
  }

  bool record(double t, const PhaseState& s) {
    std::vector<double> values;
    values.reserve(traj_.tracks.size());
    try {
      for (const auto& track : traj_.tracks) values.push_back(evaluate(track.spec, s));
    } catch (const Error&) {
      return false;
    }
    for (std::size_t i = 0; i < values.size(); ++i) traj_.tracks[i].values.push_back(values[i]);
    traj_.times.push_back(t);
    traj_.states.push_back(s);
    ++index_;
    return true;
  }

 private:
  bool needs_final() const {
    const double last = static_cast<double>(count_ - 1) * interval_;
    return t_end_ - last > 1e-9 * interval_;
  }

  Trajectory& traj_;
  double interval_;
  double t_end_;
  long count_ = 0;
  long index_ = 0;
};

inline Trajectory start_trajectory(const SystemSpec& spec,
                                   const std::vector<InvariantSpec>& track) {
  Trajectory traj;
  traj.system = spec;
  for (const auto& inv : track) traj.tracks.push_back({inv, {}});
  return traj;
}

// Signed coordinates whose zero sets are the active singular lines. A sign
// change between two consecutive states means the path jumped across one.
inline std::array<double, 2> singular_signs(const SystemSpec& spec, const PhaseState& s) {
  return std::visit(
      overloaded{[&](const VaN& c) {
                   return std::array<double, 2>{c.k1 != 0.0 ? s.q1 : 1.0, c.k2 != 0.0 ? s.q2 : 1.0};
                 },
                 [&](const VbN& c) { return std::array<double, 2>{c.k1 != 0.0 ? s.q1 : 1.0, 1.0}; },
                 [&](const auto&) {
                   const AngularTerm a = angular_term(spec);
                   if (!a.active()) return std::array<double, 2>{1.0, 1.0};
                   const double x = a.k.value() * s.q2;
                   return std::array<double, 2>{a.rotated ? std::cos(x) : std::sin(x), 1.0};
                 }},
      spec);
}

inline bool crossed_singular_set(const SystemSpec& spec, const PhaseState& a, const PhaseState& b) {
  const auto sa = singular_signs(spec, a), sb = singular_signs(spec, b);
  return sa[0] * sb[0] < 0.0 || sa[1] * sb[1] < 0.0;
}

}  // namespace detail

/// Adaptive DOP853 integration of Hamilton's equations in the family's
/// natural chart. Samples land on multiples of sample_interval (plus t_end)
/// via the dense output; failures end the run with a termination tag.
inline Trajectory integrate(const SystemSpec& spec, const PhaseState& s0,
                            const IntegratorOptions& opts,
                            const std::vector<InvariantSpec>& track = {}) {
  validate(spec);
  validate(opts);
  const Chart chart = natural_chart(spec);
  if (s0.chart != chart) {
    throw Error(ErrorKind::wrong_chart, family_name(spec) + " must start from a " +
                                            to_string(chart) + " state");
  }
  validate(s0);

  Trajectory traj = detail::start_trajectory(spec, track);
  detail::Sampler sampler(traj, opts.sample_interval, opts.t_end);

  if (singular_distance(spec, s0) < guard_distance || !sampler.record(0.0, s0)) {
    traj.termination = Termination::singularity_abort;
    return traj;
  }

  auto rhs = [&spec, chart](double, const detail::Vec4& y, detail::Vec4& dy) {
    try {
      const auto f = hamilton_rhs(spec, detail::unpack(y, chart));
      dy = {f.dq1, f.dq2, f.dp1, f.dp2};
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  Dop853Options dopts;
  dopts.rel_tol = opts.rel_tol;
  dopts.abs_tol = opts.abs_tol;
  dopts.max_step = opts.max_step;
  dopts.min_step = 1e-14 * opts.t_end;
  Dop853<4, decltype(rhs)> solver(rhs, dopts);

  auto observer = [&](auto& step) {
    const PhaseState end = detail::unpack(step.y(), chart);
    if (singular_distance(spec, end) < guard_distance) return false;
    if (detail::crossed_singular_set(spec, detail::unpack(step.interpolate(step.t_old()), chart), end)) {
      return false;
    }
    for (double ts = sampler.next_time(); ts <= step.t(); ts = sampler.next_time()) {
      const PhaseState s = ts == step.t() ? end : detail::unpack(step.interpolate(ts), chart);
      if (!sampler.record(ts, s)) return false;
    }
    return true;
  };

  const auto status = solver.integrate(0.0, detail::pack(s0), opts.t_end, observer);
  traj.accepted_steps = solver.stats().accepted;
  traj.rejected_steps = solver.stats().rejected;
  switch (status) {
    case Dop853Status::completed:
      traj.termination = Termination::completed;
      break;
    case Dop853Status::step_underflow:
    case Dop853Status::max_steps:
      traj.termination = Termination::step_underflow;
      break;
    case Dop853Status::stopped:
    case Dop853Status::rhs_failure:
      // the right-hand side only fails at singular or non-finite states
      traj.termination = Termination::singularity_abort;
      break;
  }
  return traj;
}

/// Kick-drift-kick Stoermer-Verlet with fixed step (Cartesian families only).
/// The step is shrunk so that t_end is an integer number of steps; samples
/// are taken every round(sample_interval / h) steps.
inline Trajectory integrate_fixed_symplectic(const SystemSpec& spec, const PhaseState& s0,
                                             const IntegratorOptions& opts,
                                             const std::vector<InvariantSpec>& track = {}) {
  validate(spec);
  validate(opts);
  if (natural_chart(spec) != Chart::cartesian) {
    throw Error(ErrorKind::family_mismatch,
                "the fixed-step symplectic scheme needs a separable Cartesian family");
  }
  if (s0.chart != Chart::cartesian) {
    throw Error(ErrorKind::wrong_chart, "fixed-step scheme expects a cartesian state");
  }
  validate(s0);

  Trajectory traj = detail::start_trajectory(spec, track);
  const long steps = std::max(1L, static_cast<long>(std::ceil(opts.t_end / opts.fixed_step - 1e-9)));
  const double h = opts.t_end / static_cast<double>(steps);
  const long every = std::max(1L, std::lround(opts.sample_interval / h));

  auto record = [&](double t, const PhaseState& s) {
    std::vector<double> values;
    try {
      for (const auto& tr : traj.tracks) values.push_back(evaluate(tr.spec, s));
    } catch (const Error&) {
      return false;
    }
    for (std::size_t i = 0; i < values.size(); ++i) traj.tracks[i].values.push_back(values[i]);
    traj.times.push_back(t);
    traj.states.push_back(s);
    return true;
  };

  PhaseState s = s0;
  if (singular_distance(spec, s) < guard_distance || !record(0.0, s)) {
    traj.termination = Termination::singularity_abort;
    return traj;
  }
  try {
    auto force = grad_potential(spec, s);
    for (long n = 1; n <= steps; ++n) {
      s.p1 -= 0.5 * h * force[0];
      s.p2 -= 0.5 * h * force[1];
      const PhaseState before = s;
      s.q1 += h * s.p1;
      s.q2 += h * s.p2;
      if (singular_distance(spec, s) < guard_distance || detail::crossed_singular_set(spec, before, s)) {
        traj.termination = Termination::singularity_abort;
        return traj;
      }
      force = grad_potential(spec, s);
      s.p1 -= 0.5 * h * force[0];
      s.p2 -= 0.5 * h * force[1];
      ++traj.accepted_steps;
      if (n % every == 0 || n == steps) {
        if (!record(static_cast<double>(n) * h, s)) {
          traj.termination = Termination::singularity_abort;
          return traj;
        }
      }
    }
  } catch (const Error&) {
    traj.termination = Termination::singularity_abort;
    return traj;
  }
  traj.termination = Termination::completed;
  return traj;
}

/// Dispatches on opts.scheme.
inline Trajectory run_trajectory(const SystemSpec& spec, const PhaseState& s0,
                                 const IntegratorOptions& opts,
                                 const std::vector<InvariantSpec>& track = {}) {
  return opts.scheme == Scheme::adaptive_rk ? integrate(spec, s0, opts, track)
                                            : integrate_fixed_symplectic(spec, s0, opts, track);
}

}  // namespace superint

#endif  // SUPERINT_DYNAMICS_HPP
