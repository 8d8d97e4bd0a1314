#ifndef SUPERINT_SAMPLING_HPP
#define SUPERINT_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "superint/core.hpp"
#include "superint/potentials.hpp"

namespace superint {

/// Seeded generator with a portable mapping to [0, 1): the standard
/// distributions are implementation-defined, the 53 high bits are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

/// Independent stream for work item `index` of a run seeded with `seed`
/// (splitmix64 finalizer), so parallel items never share a generator.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Box for random regular points. Positions (x, y or r, phi) are drawn from
/// [position_lo, position_hi], momenta from [-momentum, momentum].
struct SampleBox {
  double position_lo = 0.3;
  double position_hi = 3.0;
  double momentum = 2.0;
  double min_singular_distance = 0.1;
  double min_j2 = 0.05;
  int max_attempts = 100000;
};

/// Rejection-samples a point in the natural chart of `spec` away from the
/// active singular sets; polar points additionally need J2 > min_j2.
inline PhaseState random_regular_point(const SystemSpec& spec, Rng& rng,
                                       const SampleBox& box = {}) {
  const Chart chart = natural_chart(spec);
  for (int attempt = 0; attempt < box.max_attempts; ++attempt) {
    PhaseState s;
    s.chart = chart;
    s.q1 = rng.uniform(box.position_lo, box.position_hi);
    s.q2 = rng.uniform(box.position_lo, box.position_hi);
    s.p1 = rng.uniform(-box.momentum, box.momentum);
    s.p2 = rng.uniform(-box.momentum, box.momentum);
    if (singular_distance(spec, s) < box.min_singular_distance) continue;
    if (chart == Chart::polar) {
      const double j2 = s.p2 * s.p2 + angular_term(spec).value(s.q2);
      if (j2 <= box.min_j2) continue;
    }
    return s;
  }
  throw Error(ErrorKind::invalid_argument,
              "no regular point found for " + family_name(spec));
}

inline std::vector<PhaseState> random_regular_points(const SystemSpec& spec,
                                                     std::size_t count, Rng& rng,
                                                     const SampleBox& box = {}) {
  std::vector<PhaseState> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_regular_point(spec, rng, box));
  return out;
}

/// Redraws the continuous parameters of `prototype` keeping its family and the
/// discrete data (k or n_x, n_y). Angular couplings satisfy |kb| < 0.8 ka so
/// that the barrier stays positive and J2 > 0 along every orbit.
inline SystemSpec random_parameters(const SystemSpec& prototype, Rng& rng) {
  return std::visit(
      [&](auto c) -> SystemSpec {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VaN>) {
          c.omega0 = rng.uniform(0.5, 1.5);
          c.k1 = rng.uniform(0.1, 1.0);
          c.k2 = rng.uniform(0.1, 1.0);
        } else if constexpr (std::is_same_v<T, VbN>) {
          c.omega0 = rng.uniform(0.5, 1.5);
          c.k1 = rng.uniform(0.1, 1.0);
          c.k2 = rng.uniform(-1.0, 1.0);
        } else {
          if constexpr (std::is_same_v<T, Vak>) {
            c.omega0 = rng.uniform(0.5, 1.5);
          } else {
            c.g = rng.uniform(0.5, 2.0);
          }
          c.ka = rng.uniform(0.2, 1.5);
          c.kb = rng.uniform(-0.8, 0.8) * c.ka;
        }
        return c;
      },
      prototype);
}

}  // namespace superint

#endif  // SUPERINT_SAMPLING_HPP
