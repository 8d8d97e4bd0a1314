#ifndef SUPERINT_INVARIANTS_HPP
#define SUPERINT_INVARIANTS_HPP

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "superint/core.hpp"
#include "superint/hamiltonians.hpp"
#include "superint/potentials.hpp"

namespace superint {

/// Real phase-space functions that can be evaluated, tracked and bracketed.
/// ReMr/ImMr/ReNphi/ImNphi are the rotating factors (not constants);
/// PphiSq is p_phi^2 alone, kept as a negative control.
enum class InvariantKind {
  H, J1, J2, Ex, Ey, Bxx, Byy, ReBxy, ImBxy, ReCxy, ImCxy, I3_12,
  ReKk, ImKk, ReMr, ImMr, ReNphi, ImNphi, PphiSq,
};

inline constexpr std::array<InvariantKind, 19> all_invariant_kinds = {
    InvariantKind::H,     InvariantKind::J1,     InvariantKind::J2,
    InvariantKind::Ex,    InvariantKind::Ey,     InvariantKind::Bxx,
    InvariantKind::Byy,   InvariantKind::ReBxy,  InvariantKind::ImBxy,
    InvariantKind::ReCxy, InvariantKind::ImCxy,  InvariantKind::I3_12,
    InvariantKind::ReKk,  InvariantKind::ImKk,   InvariantKind::ReMr,
    InvariantKind::ImMr,  InvariantKind::ReNphi, InvariantKind::ImNphi,
    InvariantKind::PphiSq};

inline const char* to_string(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::H: return "H";
    case InvariantKind::J1: return "J1";
    case InvariantKind::J2: return "J2";
    case InvariantKind::Ex: return "Ex";
    case InvariantKind::Ey: return "Ey";
    case InvariantKind::Bxx: return "Bxx";
    case InvariantKind::Byy: return "Byy";
    case InvariantKind::ReBxy: return "ReBxy";
    case InvariantKind::ImBxy: return "ImBxy";
    case InvariantKind::ReCxy: return "ReCxy";
    case InvariantKind::ImCxy: return "ImCxy";
    case InvariantKind::I3_12: return "I3_12";
    case InvariantKind::ReKk: return "ReKk";
    case InvariantKind::ImKk: return "ImKk";
    case InvariantKind::ReMr: return "ReMr";
    case InvariantKind::ImMr: return "ImMr";
    case InvariantKind::ReNphi: return "ReNphi";
    case InvariantKind::ImNphi: return "ImNphi";
    case InvariantKind::PphiSq: return "PphiSq";
  }
  return "?";
}

inline std::optional<InvariantKind> parse_invariant_kind(std::string_view name) {
  for (auto kind : all_invariant_kinds) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

struct InvariantSpec {
  InvariantKind kind = InvariantKind::H;
  SystemSpec system;
};

/// True for kinds claimed to be constants of the motion (the rotating
/// factors M and N are excluded; the PphiSq control is a claimed constant
/// that is expected to fail).
inline bool is_claimed_constant(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::ReMr:
    case InvariantKind::ImMr:
    case InvariantKind::ReNphi:
    case InvariantKind::ImNphi:
      return false;
    default:
      return true;
  }
}

inline bool has_analytic_gradient(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::H:
    case InvariantKind::J1:
    case InvariantKind::J2:
    case InvariantKind::Ex:
    case InvariantKind::Ey:
    case InvariantKind::I3_12:
    case InvariantKind::PphiSq:
      return true;
    default:
      return false;
  }
}

inline bool is_applicable(InvariantKind kind, const SystemSpec& system) {
  using K = InvariantKind;
  const bool van = std::holds_alternative<VaN>(system);
  const bool vbn = std::holds_alternative<VbN>(system);
  switch (kind) {
    case K::H:
      return true;
    case K::Ex:
    case K::Ey:
      return van || vbn;
    case K::Bxx:
    case K::Byy:
    case K::ReBxy:
    case K::ImBxy:
      return van;
    case K::ReCxy:
    case K::ImCxy:
      return vbn;
    case K::I3_12:
      if (!vbn) return false;
      return std::get<VbN>(system).n_x == 1 && std::get<VbN>(system).n_y == 2;
    default:
      return is_polar_family(system);
  }
}

namespace detail {

inline void require_applicable(InvariantKind kind, const SystemSpec& system) {
  if (!is_applicable(kind, system)) {
    throw Error(ErrorKind::family_mismatch, std::string(to_string(kind)) +
                                                " is not defined for family " +
                                                family_name(system));
  }
}

template <class Family>
const Family& require_family(const SystemSpec& system, const char* what) {
  if (const auto* f = std::get_if<Family>(&system)) return *f;
  throw Error(ErrorKind::family_mismatch,
              std::string(what) + " is not defined for family " + family_name(system));
}

inline void require_chart(const SystemSpec& system, const PhaseState& s) {
  if (s.chart != natural_chart(system)) {
    throw Error(ErrorKind::wrong_chart, family_name(system) + " expects a " +
                                            to_string(natural_chart(system)) +
                                            " state");
  }
  validate(s);
}

/// B = (p + i n omega0 q)^2 + coupling / q^2 for one Cartesian axis.
inline ComplexValue factor_b(int n, double omega0, double coupling, double q,
                             double p) {
  if (coupling != 0.0 && std::abs(q) < singular_tolerance) {
    throw Error(ErrorKind::singularity, "B factor evaluated on its singular axis");
  }
  const ComplexValue a{p, n * omega0 * q};
  ComplexValue b = a * a;
  if (coupling != 0.0) b += coupling / (q * q);
  return b;
}

}  // namespace detail

enum class Axis { x, y };

// ---------------------------------------------------------------------------
// Quadratic integrals

inline double eval_J2(const SystemSpec& system, const PhaseState& s) {
  detail::require_applicable(InvariantKind::J2, system);
  detail::require_regular(system, s);
  return s.p2 * s.p2 + angular_term(system).value(s.q2);
}

/// J1 = 2 H for both polar families.
inline double eval_J1(const SystemSpec& system, const PhaseState& s) {
  detail::require_applicable(InvariantKind::J1, system);
  const double r = s.q1;
  detail::require_regular(system, s);
  const double f = angular_term(system).value(s.q2);
  const double base = s.p1 * s.p1 + s.p2 * s.p2 / (r * r) + f / (r * r);
  if (const auto* c = std::get_if<Vak>(&system)) {
    return base + c->omega0 * c->omega0 * r * r;
  }
  const double g = std::visit(overloaded{[](const Vck& c) { return c.g; },
                                         [](const VckRot& c) { return c.g; },
                                         [](const auto&) { return 0.0; }},
                              system);
  return base - 2.0 * g / r;
}

/// One-dimensional energies of the Cartesian families.
inline double eval_Ex(const SystemSpec& system, const PhaseState& s) {
  detail::require_applicable(InvariantKind::Ex, system);
  detail::require_regular(system, s);
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VaN> || std::is_same_v<T, VbN>) {
          const double w = c.n_x * c.omega0, x = s.q1;
          double e = 0.5 * s.p1 * s.p1 + 0.5 * w * w * x * x;
          if (c.k1 != 0.0) e += c.k1 / (2.0 * x * x);
          return e;
        } else {
          return 0.0;
        }
      },
      system);
}

inline double eval_Ey(const SystemSpec& system, const PhaseState& s) {
  detail::require_applicable(InvariantKind::Ey, system);
  detail::require_regular(system, s);
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VaN> || std::is_same_v<T, VbN>) {
          const double w = c.n_y * c.omega0, y = s.q2;
          double e = 0.5 * s.p2 * s.p2 + 0.5 * w * w * y * y;
          if constexpr (std::is_same_v<T, VaN>) {
            if (c.k2 != 0.0) e += c.k2 / (2.0 * y * y);
          } else {
            e += c.k2 * y;
          }
          return e;
        } else {
          return 0.0;
        }
      },
      system);
}

/// Quadratic integral of VbN(1,2) tied to parabolic separability. The
/// k2 x^2 / 2 term is required for {I3, H} = 0 when the linear coupling k2
/// is nonzero; it vanishes for k2 = 0.
inline double eval_I3_12(const SystemSpec& system, const PhaseState& s) {
  detail::require_applicable(InvariantKind::I3_12, system);
  detail::require_regular(system, s);
  const auto& c = std::get<VbN>(system);
  const double x = s.q1, y = s.q2, px = s.p1, py = s.p2;
  double i3 = (x * py - y * px) * px + c.omega0 * c.omega0 * x * x * y +
              0.5 * c.k2 * x * x;
  if (c.k1 != 0.0) i3 -= c.k1 * y / (x * x);
  return i3;
}

// ---------------------------------------------------------------------------
// Complex factors of the Cartesian families

/// B_x (axis x) or B_y (axis y) of VaN.
inline ComplexValue eval_Ax_Bx(const SystemSpec& system, const PhaseState& s,
                               Axis axis) {
  const auto& c = detail::require_family<VaN>(system, "B_x / B_y");
  detail::require_chart(system, s);
  return axis == Axis::x ? detail::factor_b(c.n_x, c.omega0, c.k1, s.q1, s.p1)
                         : detail::factor_b(c.n_y, c.omega0, c.k2, s.q2, s.p2);
}

/// B_ij = (B_i)^{n_j} (B_j^*)^{n_i}.
inline ComplexValue eval_Bij(const SystemSpec& system, const PhaseState& s,
                             Axis i = Axis::x, Axis j = Axis::y) {
  const auto& c = detail::require_family<VaN>(system, "B_ij");
  const auto n_of = [&](Axis a) { return a == Axis::x ? c.n_x : c.n_y; };
  const ComplexValue bi = eval_Ax_Bx(system, s, i);
  const ComplexValue bj = eval_Ax_Bx(system, s, j);
  return complex_pow_int(bi, static_cast<unsigned>(n_of(j))) *
         complex_pow_int(std::conj(bj), static_cast<unsigned>(n_of(i)));
}

/// C_xy = (B_x)^{n_y} (conj(At_y))^{2 n_x}, At_y = p_y + i (n_y omega0 y + k2').
inline ComplexValue eval_Cxy(const SystemSpec& system, const PhaseState& s) {
  const auto& c = detail::require_family<VbN>(system, "C_xy");
  detail::require_chart(system, s);
  const ComplexValue bx = detail::factor_b(c.n_x, c.omega0, c.k1, s.q1, s.p1);
  const double wy = c.n_y * c.omega0;
  const ComplexValue at_y{s.p2, wy * s.q2 + c.k2 / wy};
  return complex_pow_int(bx, static_cast<unsigned>(c.n_y)) *
         complex_pow_int(std::conj(at_y), static_cast<unsigned>(2 * c.n_x));
}

// ---------------------------------------------------------------------------
// Radial / angular factors of the polar families

struct RadialAngularFactors {
  ComplexValue M;
  ComplexValue N;
  double lambda = 0.0;
};

/// Phase velocity multiplier of M: dM/dt = i c lambda M.
inline double radial_rate_factor(const SystemSpec& system) {
  return std::holds_alternative<Vak>(system) ? 2.0 : 1.0;
}

inline RadialAngularFactors eval_Mr_Nphi(const SystemSpec& system,
                                         const PhaseState& s) {
  if (!is_polar_family(system)) {
    throw Error(ErrorKind::family_mismatch,
                "M_r and N_phi are not defined for family " + family_name(system));
  }
  detail::require_regular(system, s);
  const auto term = angular_term(system);
  const double r = s.q1, phi = s.q2, pr = s.p1, pphi = s.p2;
  const double j2 = pphi * pphi + term.value(phi);
  if (!(j2 > 0.0)) {
    throw Error(ErrorKind::nonpositive_j2,
                "M_r and N_phi require J2 > 0 (got " + std::to_string(j2) + ")");
  }
  const double root = std::sqrt(j2);

  RadialAngularFactors out;
  out.lambda = root / (r * r);
  if (const auto* c = std::get_if<Vak>(&system)) {
    out.M = {2.0 / r * pr * root, pr * pr + c->omega0 * c->omega0 * r * r - j2 / (r * r)};
  } else {
    const double g = std::holds_alternative<Vck>(system) ? std::get<Vck>(system).g
                                                         : std::get<VckRot>(system).g;
    out.M = {pr * root, g - j2 / r};
  }
  const double a = term.k.value() * phi;
  if (term.rotated) {
    // N of F_k evaluated at phi - pi/(2k).
    out.N = {0.5 * term.kb + j2 * std::sin(a), -root * pphi * std::cos(a)};
  } else {
    out.N = {0.5 * term.kb + j2 * std::cos(a), root * pphi * std::sin(a)};
  }
  return out;
}

/// Exponents (a, b) of K = M^a (N^*)^b. With k = p/q the phases cancel for
/// a = p and b = 2q (oscillator) or b = q (Kepler).
inline std::array<unsigned, 2> composite_exponents(const SystemSpec& system) {
  const Rational k = angular_term(system).k;
  const long b = std::holds_alternative<Vak>(system) ? 2 * k.den() : k.den();
  return {static_cast<unsigned>(k.num()), static_cast<unsigned>(b)};
}

inline ComplexValue eval_Kk(const SystemSpec& system, const PhaseState& s) {
  const auto f = eval_Mr_Nphi(system, s);
  const auto [a, b] = composite_exponents(system);
  return complex_pow_int(f.M, a) * complex_pow_int(std::conj(f.N), b);
}

// ---------------------------------------------------------------------------
// Generic evaluation

inline double evaluate(const InvariantSpec& inv, const PhaseState& s) {
  using K = InvariantKind;
  detail::require_applicable(inv.kind, inv.system);
  const auto& sys = inv.system;
  switch (inv.kind) {
    case K::H: return eval_H(sys, s);
    case K::J1: return eval_J1(sys, s);
    case K::J2: return eval_J2(sys, s);
    case K::Ex: return eval_Ex(sys, s);
    case K::Ey: return eval_Ey(sys, s);
    case K::Bxx: return eval_Bij(sys, s, Axis::x, Axis::x).real();
    case K::Byy: return eval_Bij(sys, s, Axis::y, Axis::y).real();
    case K::ReBxy: return eval_Bij(sys, s).real();
    case K::ImBxy: return eval_Bij(sys, s).imag();
    case K::ReCxy: return eval_Cxy(sys, s).real();
    case K::ImCxy: return eval_Cxy(sys, s).imag();
    case K::I3_12: return eval_I3_12(sys, s);
    case K::ReKk: return eval_Kk(sys, s).real();
    case K::ImKk: return eval_Kk(sys, s).imag();
    case K::ReMr: return eval_Mr_Nphi(sys, s).M.real();
    case K::ImMr: return eval_Mr_Nphi(sys, s).M.imag();
    case K::ReNphi: return eval_Mr_Nphi(sys, s).N.real();
    case K::ImNphi: return eval_Mr_Nphi(sys, s).N.imag();
    case K::PphiSq:
      detail::require_regular(sys, s);
      return s.p2 * s.p2;
  }
  throw Error(ErrorKind::invalid_argument, "unknown invariant kind");
}

// ---------------------------------------------------------------------------
// Gradients

namespace detail {

inline double& component(PhaseState& s, int i) {
  switch (i) {
    case 0: return s.q1;
    case 1: return s.q2;
    case 2: return s.p1;
    default: return s.p2;
  }
}

inline double component(const PhaseState& s, int i) {
  return component(const_cast<PhaseState&>(s), i);
}

inline double& component(PhaseGradient& g, int i) {
  switch (i) {
    case 0: return g.dq1;
    case 1: return g.dq2;
    case 2: return g.dp1;
    default: return g.dp2;
  }
}

}  // namespace detail

/// Central differences at steps h and h/2 combined by one Richardson step
/// (error O(h^4)); h = 1e-4 * max(1, |component|).
template <class Fn>
PhaseGradient richardson_gradient(Fn&& f, const PhaseState& s) {
  PhaseGradient g;
  for (int i = 0; i < 4; ++i) {
    const double c = detail::component(s, i);
    const double h = 1e-4 * std::max(1.0, std::abs(c));
    auto central = [&](double step) {
      PhaseState plus = s, minus = s;
      detail::component(plus, i) = c + step;
      detail::component(minus, i) = c - step;
      return (f(plus) - f(minus)) / (2.0 * step);
    };
    const double coarse = central(h);
    const double fine = central(0.5 * h);
    detail::component(g, i) = (4.0 * fine - coarse) / 3.0;
  }
  return g;
}

inline PhaseGradient invariant_gradient(const InvariantSpec& inv,
                                        const PhaseState& s) {
  using K = InvariantKind;
  detail::require_applicable(inv.kind, inv.system);
  const auto& sys = inv.system;
  switch (inv.kind) {
    case K::H:
      return grad_H(sys, s);
    case K::J1: {
      const auto g = grad_H(sys, s);
      return {2.0 * g.dq1, 2.0 * g.dq2, 2.0 * g.dp1, 2.0 * g.dp2};
    }
    case K::J2:
      detail::require_regular(sys, s);
      return {0.0, angular_term(sys).derivative(s.q2), 0.0, 2.0 * s.p2};
    case K::PphiSq:
      detail::require_regular(sys, s);
      return {0.0, 0.0, 0.0, 2.0 * s.p2};
    case K::Ex:
    case K::Ey:
      detail::require_regular(sys, s);
      return std::visit(
          [&](const auto& c) -> PhaseGradient {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, VaN> || std::is_same_v<T, VbN>) {
              if (inv.kind == K::Ex) {
                const double w = c.n_x * c.omega0, x = s.q1;
                double d = w * w * x;
                if (c.k1 != 0.0) d -= c.k1 / (x * x * x);
                return {d, 0.0, s.p1, 0.0};
              }
              const double w = c.n_y * c.omega0, y = s.q2;
              double d = w * w * y;
              if constexpr (std::is_same_v<T, VaN>) {
                if (c.k2 != 0.0) d -= c.k2 / (y * y * y);
              } else {
                d += c.k2;
              }
              return {0.0, d, 0.0, s.p2};
            } else {
              return {};
            }
          },
          sys);
    case K::I3_12: {
      detail::require_regular(sys, s);
      const auto& c = std::get<VbN>(sys);
      const double x = s.q1, y = s.q2, px = s.p1, py = s.p2;
      const double w2 = c.omega0 * c.omega0;
      double dx = py * px + 2.0 * w2 * x * y + c.k2 * x;
      double dy = -px * px + w2 * x * x;
      if (c.k1 != 0.0) {
        dx += 2.0 * c.k1 * y / (x * x * x);
        dy -= c.k1 / (x * x);
      }
      return {dx, dy, x * py - 2.0 * y * px, x * px};
    }
    default:
      return richardson_gradient([&](const PhaseState& p) { return evaluate(inv, p); }, s);
  }
}

}  // namespace superint

#endif  // SUPERINT_INVARIANTS_HPP
