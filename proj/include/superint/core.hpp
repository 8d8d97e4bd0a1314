#ifndef SUPERINT_CORE_HPP
#define SUPERINT_CORE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace superint {

enum class ErrorKind {
  origin_point,
  nonpositive_radius,
  non_finite,
  singularity,
  wrong_chart,
  family_mismatch,
  nonpositive_j2,
  invalid_argument,
  insufficient_samples,
  empty_track,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::origin_point: return "origin_point";
    case ErrorKind::nonpositive_radius: return "nonpositive_radius";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::wrong_chart: return "wrong_chart";
    case ErrorKind::family_mismatch: return "family_mismatch";
    case ErrorKind::nonpositive_j2: return "nonpositive_j2";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::insufficient_samples: return "insufficient_samples";
    case ErrorKind::empty_track: return "empty_track";
  }
  return "unknown";
}

/// All domain failures of the library are reported with this exception; the
/// kind lets callers (the CLI, the integrator guard) react without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class Chart { cartesian, polar };

inline const char* to_string(Chart chart) {
  return chart == Chart::cartesian ? "cartesian" : "polar";
}

/// A point of the 4-dimensional phase space together with the chart its
/// coordinates refer to. In the polar chart q1 = r, q2 = phi (unwrapped),
/// p1 = p_r, p2 = p_phi.
struct PhaseState {
  double q1 = 0.0;
  double q2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  Chart chart = Chart::cartesian;

  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

using ComplexValue = std::complex<double>;

inline void validate(const PhaseState& s) {
  if (!std::isfinite(s.q1) || !std::isfinite(s.q2) || !std::isfinite(s.p1) ||
      !std::isfinite(s.p2)) {
    throw Error(ErrorKind::non_finite, "phase state has a non-finite component");
  }
  if (s.chart == Chart::polar && !(s.q1 > 0.0)) {
    throw Error(ErrorKind::nonpositive_radius,
                "polar chart requires q1 > 0 (r strictly positive)");
  }
}

inline PhaseState to_polar(const PhaseState& s) {
  if (s.chart != Chart::cartesian) {
    throw Error(ErrorKind::wrong_chart, "to_polar expects a cartesian state");
  }
  const double x = s.q1, y = s.q2;
  if (x == 0.0 && y == 0.0) {
    throw Error(ErrorKind::origin_point, "the origin has no polar representation");
  }
  const double r = std::hypot(x, y);
  return PhaseState{r, std::atan2(y, x), (x * s.p1 + y * s.p2) / r,
                    x * s.p2 - y * s.p1, Chart::polar};
}

inline PhaseState to_cartesian(const PhaseState& s) {
  if (s.chart != Chart::polar) {
    throw Error(ErrorKind::wrong_chart, "to_cartesian expects a polar state");
  }
  const double r = s.q1;
  if (!(r > 0.0)) {
    throw Error(ErrorKind::nonpositive_radius, "to_cartesian requires r > 0");
  }
  const double c = std::cos(s.q2), sn = std::sin(s.q2);
  const double tangential = s.p2 / r;
  return PhaseState{r * c, r * sn, s.p1 * c - tangential * sn,
                    s.p1 * sn + tangential * c, Chart::cartesian};
}

/// z^n by binary exponentiation; z^0 = 1 for every z including 0.
inline ComplexValue complex_pow_int(ComplexValue z, unsigned n) {
  ComplexValue result{1.0, 0.0};
  while (n > 0) {
    if (n & 1u) result *= z;
    n >>= 1u;
    if (n > 0) z *= z;
  }
  return result;
}

}  // namespace superint

#endif  // SUPERINT_CORE_HPP
