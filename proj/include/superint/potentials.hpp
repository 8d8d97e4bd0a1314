#ifndef SUPERINT_POTENTIALS_HPP
#define SUPERINT_POTENTIALS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>

#include "superint/core.hpp"
#include "superint/rational.hpp"

namespace superint {

/// Band around a singular set inside which evaluation is refused.
inline constexpr double singular_tolerance = 1e-10;

// Cartesian oscillator families. VaN carries k1/(2x^2) + k2/(2y^2), VbN
// carries k1/(2x^2) + k2*y.
struct VaN {
  int n_x = 1;
  int n_y = 1;
  double omega0 = 1.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

struct VbN {
  int n_x = 1;
  int n_y = 2;
  double omega0 = 1.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

// Polar families: radial oscillator (Vak), Kepler -g/r (Vck) and the Kepler
// family with the rotated angular function G_k (VckRot).
struct Vak {
  double omega0 = 1.0;
  Rational k;
  double ka = 0.0;
  double kb = 0.0;
};

struct Vck {
  double g = 1.0;
  Rational k;
  double ka = 0.0;
  double kb = 0.0;
};

struct VckRot {
  double g = 1.0;
  Rational k;
  double ka = 0.0;
  double kb = 0.0;
};

using SystemSpec = std::variant<VaN, VbN, Vak, Vck, VckRot>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string family_name(const SystemSpec& spec) {
  return std::visit(overloaded{[](const VaN&) { return "VaN"; },
                               [](const VbN&) { return "VbN"; },
                               [](const Vak&) { return "Vak"; },
                               [](const Vck&) { return "Vck"; },
                               [](const VckRot&) { return "VckRot"; }},
                    spec);
}

inline Chart natural_chart(const SystemSpec& spec) {
  return std::holds_alternative<VaN>(spec) || std::holds_alternative<VbN>(spec)
             ? Chart::cartesian
             : Chart::polar;
}

inline bool is_polar_family(const SystemSpec& spec) {
  return natural_chart(spec) == Chart::polar;
}

inline bool is_kepler_family(const SystemSpec& spec) {
  return std::holds_alternative<Vck>(spec) ||
         std::holds_alternative<VckRot>(spec);
}

inline void validate(const SystemSpec& spec) {
  auto finite = [](double v) { return std::isfinite(v); };
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_argument, what);
  };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VaN> || std::is_same_v<T, VbN>) {
          if (c.n_x < 1 || c.n_y < 1) fail("n_x and n_y must be >= 1");
          if (!(c.omega0 > 0.0) || !finite(c.omega0)) fail("omega0 must be > 0");
          if (!finite(c.k1) || !finite(c.k2)) fail("k1 and k2 must be finite");
        } else {
          if constexpr (std::is_same_v<T, Vak>) {
            if (!(c.omega0 > 0.0) || !finite(c.omega0)) fail("omega0 must be > 0");
          } else {
            if (!finite(c.g)) fail("g must be finite");
          }
          if (!finite(c.ka) || !finite(c.kb)) fail("ka and kb must be finite");
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// Angular functions

inline double eval_Fk(const Rational& k, double ka, double kb, double phi) {
  const double a = k.value() * phi;
  const double s = std::sin(a);
  if (std::abs(s) < singular_tolerance) {
    throw Error(ErrorKind::singularity, "F_k evaluated on sin(k phi) = 0");
  }
  return (ka + kb * std::cos(a)) / (s * s);
}

inline double eval_Gk(const Rational& k, double ka, double kb, double phi) {
  const double a = k.value() * phi;
  const double c = std::cos(a);
  if (std::abs(c) < singular_tolerance) {
    throw Error(ErrorKind::singularity, "G_k evaluated on cos(k phi) = 0");
  }
  return (ka + kb * std::sin(a)) / (c * c);
}

/// dF_k/dphi = -k (kb sin^2 + 2 cos (ka + kb cos)) / sin^3
inline double eval_dFk(const Rational& k, double ka, double kb, double phi) {
  const double kv = k.value();
  const double s = std::sin(kv * phi), c = std::cos(kv * phi);
  if (std::abs(s) < singular_tolerance) {
    throw Error(ErrorKind::singularity, "F_k' evaluated on sin(k phi) = 0");
  }
  return -kv * (kb * s * s + 2.0 * c * (ka + kb * c)) / (s * s * s);
}

/// dG_k/dphi = k (kb cos^2 + 2 sin (ka + kb sin)) / cos^3
inline double eval_dGk(const Rational& k, double ka, double kb, double phi) {
  const double kv = k.value();
  const double s = std::sin(kv * phi), c = std::cos(kv * phi);
  if (std::abs(c) < singular_tolerance) {
    throw Error(ErrorKind::singularity, "G_k' evaluated on cos(k phi) = 0");
  }
  return kv * (kb * c * c + 2.0 * s * (ka + kb * s)) / (c * c * c);
}

/// The angular function of a polar family: F_k, or G_k for VckRot. A term with
/// ka = kb = 0 vanishes identically and has no singular set.
struct AngularTerm {
  Rational k;
  double ka = 0.0;
  double kb = 0.0;
  bool rotated = false;

  bool active() const noexcept { return ka != 0.0 || kb != 0.0; }

  double value(double phi) const {
    if (!active()) return 0.0;
    return rotated ? eval_Gk(k, ka, kb, phi) : eval_Fk(k, ka, kb, phi);
  }

  double derivative(double phi) const {
    if (!active()) return 0.0;
    return rotated ? eval_dGk(k, ka, kb, phi) : eval_dFk(k, ka, kb, phi);
  }

  /// |sin(k phi)| (or |cos(k phi)| when rotated); infinite when inactive.
  double singular_distance(double phi) const {
    if (!active()) return std::numeric_limits<double>::infinity();
    const double a = k.value() * phi;
    return rotated ? std::abs(std::cos(a)) : std::abs(std::sin(a));
  }
};

inline AngularTerm angular_term(const SystemSpec& spec) {
  return std::visit(
      overloaded{[](const Vak& c) { return AngularTerm{c.k, c.ka, c.kb, false}; },
                 [](const Vck& c) { return AngularTerm{c.k, c.ka, c.kb, false}; },
                 [](const VckRot& c) { return AngularTerm{c.k, c.ka, c.kb, true}; },
                 [](const auto&) -> AngularTerm {
                   throw Error(ErrorKind::family_mismatch,
                               "cartesian families have no angular function");
                 }},
      spec);
}

// ---------------------------------------------------------------------------
// Singular sets

/// Smallest of the distance-like quantities |x|, |y|, r, |sin(k phi)|,
/// |cos(k phi)| over the singular sets that are active for this system.
inline double singular_distance(const SystemSpec& spec, const PhaseState& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      overloaded{
          [&](const VaN& c) {
            double d = inf;
            if (c.k1 != 0.0) d = std::min(d, std::abs(s.q1));
            if (c.k2 != 0.0) d = std::min(d, std::abs(s.q2));
            return d;
          },
          [&](const VbN& c) { return c.k1 != 0.0 ? std::abs(s.q1) : inf; },
          [&](const auto&) {
            return std::min(s.q1, angular_term(spec).singular_distance(s.q2));
          }},
      spec);
}

namespace detail {

inline void require_regular(const SystemSpec& spec, const PhaseState& s) {
  if (s.chart != natural_chart(spec)) {
    throw Error(ErrorKind::wrong_chart, family_name(spec) + " expects a " +
                                            to_string(natural_chart(spec)) +
                                            " state");
  }
  validate(s);
  if (singular_distance(spec, s) < singular_tolerance) {
    throw Error(ErrorKind::singularity,
                family_name(spec) + " evaluated on a singular set");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Potentials

inline double eval_potential(const SystemSpec& spec, const PhaseState& s) {
  detail::require_regular(spec, s);
  return std::visit(
      overloaded{
          [&](const VaN& c) {
            const double x = s.q1, y = s.q2;
            const double wx = c.n_x * c.omega0, wy = c.n_y * c.omega0;
            double v = 0.5 * (wx * wx * x * x + wy * wy * y * y);
            if (c.k1 != 0.0) v += c.k1 / (2.0 * x * x);
            if (c.k2 != 0.0) v += c.k2 / (2.0 * y * y);
            return v;
          },
          [&](const VbN& c) {
            const double x = s.q1, y = s.q2;
            const double wx = c.n_x * c.omega0, wy = c.n_y * c.omega0;
            double v = 0.5 * (wx * wx * x * x + wy * wy * y * y) + c.k2 * y;
            if (c.k1 != 0.0) v += c.k1 / (2.0 * x * x);
            return v;
          },
          [&](const Vak& c) {
            const double r = s.q1;
            return 0.5 * c.omega0 * c.omega0 * r * r +
                   0.5 * angular_term(spec).value(s.q2) / (r * r);
          },
          [&](const auto& c) {
            const double r = s.q1;
            return -c.g / r + 0.5 * angular_term(spec).value(s.q2) / (r * r);
          }},
      spec);
}

/// Analytic (dV/dq1, dV/dq2) in the family's natural chart.
inline std::array<double, 2> grad_potential(const SystemSpec& spec,
                                            const PhaseState& s) {
  detail::require_regular(spec, s);
  return std::visit(
      overloaded{
          [&](const VaN& c) {
            const double x = s.q1, y = s.q2;
            const double wx = c.n_x * c.omega0, wy = c.n_y * c.omega0;
            double dx = wx * wx * x, dy = wy * wy * y;
            if (c.k1 != 0.0) dx -= c.k1 / (x * x * x);
            if (c.k2 != 0.0) dy -= c.k2 / (y * y * y);
            return std::array<double, 2>{dx, dy};
          },
          [&](const VbN& c) {
            const double x = s.q1, y = s.q2;
            const double wx = c.n_x * c.omega0, wy = c.n_y * c.omega0;
            double dx = wx * wx * x;
            if (c.k1 != 0.0) dx -= c.k1 / (x * x * x);
            return std::array<double, 2>{dx, wy * wy * y + c.k2};
          },
          [&](const Vak& c) {
            const double r = s.q1, r3 = r * r * r;
            const auto f = angular_term(spec);
            return std::array<double, 2>{
                c.omega0 * c.omega0 * r - f.value(s.q2) / r3,
                0.5 * f.derivative(s.q2) / (r * r)};
          },
          [&](const auto& c) {
            const double r = s.q1, r3 = r * r * r;
            const auto f = angular_term(spec);
            return std::array<double, 2>{c.g / (r * r) - f.value(s.q2) / r3,
                                         0.5 * f.derivative(s.q2) / (r * r)};
          }},
      spec);
}

// ---------------------------------------------------------------------------
// TTW / Post-Winternitz correspondences

struct AngularCoefficients {
  double ka = 0.0;
  double kb = 0.0;
  Rational k;
};

/// (alpha, beta, k) of the TTW barrier to (ka, kb, 2k) of F_k.
inline AngularCoefficients map_ttw_to_ak(double alpha, double beta,
                                         const Rational& k) {
  return {2.0 * (alpha + beta), 2.0 * (beta - alpha), k.doubled()};
}

/// Same correspondence for the Kepler-type (Post-Winternitz) family.
inline AngularCoefficients map_pw_to_ck(double alpha, double beta,
                                        const Rational& k) {
  return map_ttw_to_ak(alpha, beta, k);
}

inline double ttw_barrier(double alpha, double beta, const Rational& k,
                          double phi) {
  const double a = k.value() * phi;
  const double c = std::cos(a), s = std::sin(a);
  if (std::abs(c) < singular_tolerance || std::abs(s) < singular_tolerance) {
    throw Error(ErrorKind::singularity, "TTW barrier evaluated on its poles");
  }
  return alpha / (c * c) + beta / (s * s);
}

inline double eval_ttw(double omega0, double alpha, double beta,
                       const Rational& k, double r, double phi) {
  return 0.5 * omega0 * omega0 * r * r +
         ttw_barrier(alpha, beta, k, phi) / (2.0 * r * r);
}

inline double eval_pw(double g, double alpha, double beta, const Rational& k,
                      double r, double phi) {
  return -g / r + ttw_barrier(alpha, beta, k, phi) / (2.0 * r * r);
}

/// F_k(phi)/r^2 written in Cartesian coordinates for k = 1, 2, 3.
inline double fk_cartesian(int k, double ka, double kb, double x, double y) {
  const double r2 = x * x + y * y;
  const double r = std::sqrt(r2);
  switch (k) {
    case 1:
      return ka / (y * y) + kb * x / (y * y * r);
    case 2:
      return (ka - kb) / (4.0 * x * x) + (ka + kb) / (4.0 * y * y);
    case 3: {
      const double w = 3.0 * x * x - y * y;
      return (ka * r2 * r2 + kb * (x * x - 3.0 * y * y) * x * r) / (w * w * y * y);
    }
    default:
      throw Error(ErrorKind::invalid_argument,
                  "Cartesian form of F_k is only provided for k = 1, 2, 3");
  }
}

/// Rotation angle pi/(2k) taking F_k into G_k: G_k(phi) = F_k(phi - pi/(2k)).
inline double rotation_angle(const Rational& k) {
  return std::numbers::pi / (2.0 * k.value());
}

}  // namespace superint

#endif  // SUPERINT_POTENTIALS_HPP
