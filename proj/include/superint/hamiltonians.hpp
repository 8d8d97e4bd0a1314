#ifndef SUPERINT_HAMILTONIANS_HPP
#define SUPERINT_HAMILTONIANS_HPP

#include <cmath>

#include "superint/core.hpp"
#include "superint/potentials.hpp"

namespace superint {

/// Partials of a scalar phase-space function w.r.t. (q1, q2, p1, p2). The same
/// layout carries the Hamiltonian vector field (dq1/dt, dq2/dt, dp1/dt, dp2/dt).
struct PhaseGradient {
  double dq1 = 0.0;
  double dq2 = 0.0;
  double dp1 = 0.0;
  double dp2 = 0.0;

  double norm() const {
    return std::sqrt(dq1 * dq1 + dq2 * dq2 + dp1 * dp1 + dp2 * dp2);
  }

  friend bool operator==(const PhaseGradient&, const PhaseGradient&) = default;
};

inline double kinetic_energy(const PhaseState& s) {
  if (s.chart == Chart::cartesian) return 0.5 * (s.p1 * s.p1 + s.p2 * s.p2);
  return 0.5 * (s.p1 * s.p1 + s.p2 * s.p2 / (s.q1 * s.q1));
}

inline double eval_H(const SystemSpec& spec, const PhaseState& s) {
  const double v = eval_potential(spec, s);
  return kinetic_energy(s) + v;
}

inline PhaseGradient grad_H(const SystemSpec& spec, const PhaseState& s) {
  const auto dv = grad_potential(spec, s);
  if (s.chart == Chart::cartesian) return {dv[0], dv[1], s.p1, s.p2};
  const double r = s.q1;
  const double r2 = r * r;
  return {dv[0] - s.p2 * s.p2 / (r2 * r), dv[1], s.p1, s.p2 / r2};
}

/// Canonical pairing J * grad H: (dH/dp, -dH/dq).
inline PhaseGradient symplectic_dual(const PhaseGradient& g) {
  return {g.dp1, g.dp2, -g.dq1, -g.dq2};
}

inline PhaseGradient hamilton_rhs(const SystemSpec& spec, const PhaseState& s) {
  return symplectic_dual(grad_H(spec, s));
}

/// Canonical Poisson bracket {F, G} from the two gradients.
inline double poisson_bracket(const PhaseGradient& f, const PhaseGradient& g) {
  return (f.dq1 * g.dp1 + f.dq2 * g.dp2) - (f.dp1 * g.dq1 + f.dp2 * g.dq2);
}

}  // namespace superint

#endif  // SUPERINT_HAMILTONIANS_HPP
