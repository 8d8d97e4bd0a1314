#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "superint/dynamics.hpp"
#include "superint/sampling.hpp"

using namespace superint;

namespace {

constexpr double pi = std::numbers::pi;

IntegratorOptions options(double t_end, double interval = 0.01) {
  IntegratorOptions o;
  o.t_end = t_end;
  o.sample_interval = interval;
  return o;
}

double state_distance(const PhaseState& a, const PhaseState& b) {
  return std::sqrt(std::pow(a.q1 - b.q1, 2) + std::pow(a.q2 - b.q2, 2) + std::pow(a.p1 - b.p1, 2) +
                   std::pow(a.p2 - b.p2, 2));
}

}  // namespace

TEST(Integrate, FreeMotionInPolarChart) {
  const SystemSpec spec = Vck{0.0, Rational(1, 1), 0, 0};
  const PhaseState s0{1.5, 0.4, -0.3, 0.8, Chart::polar};
  const auto traj = integrate(spec, s0, options(10.0, 0.5), {{InvariantKind::H, spec}});
  ASSERT_EQ(traj.termination, Termination::completed);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto ref = oracle::free_polar(s0, traj.times[i]);
    EXPECT_NEAR(traj.states[i].q1, ref[0], 1e-9);
    EXPECT_NEAR(traj.states[i].p1, ref[1], 1e-9);
    EXPECT_NEAR(traj.states[i].p2, ref[2], 1e-12);
  }
  const auto& h = traj.tracks[0].values;
  for (double v : h) EXPECT_LT(std::abs(v - h[0]) / std::abs(h[0]), 1e-10);
}

TEST(Integrate, CircularKeplerOrbitKeepsRadius) {
  const SystemSpec spec = Vck{1.0, Rational(1, 1), 0, 0};
  const auto traj = integrate(spec, {1, 0, 0, 1, Chart::polar}, options(10 * pi, 0.1));
  ASSERT_EQ(traj.termination, Termination::completed);
  for (const auto& s : traj.states) EXPECT_NEAR(s.q1, 1.0, 1e-9);
  EXPECT_NEAR(traj.states.back().q2, 10 * pi, 1e-9);
}

TEST(Integrate, OscillatorClosesAfterOnePeriod) {
  const SystemSpec spec = VaN{1, 1, 1, 0, 0};
  const PhaseState s0{1, 0, 0, 1, Chart::cartesian};
  const auto traj = integrate(spec, s0, options(2 * pi, 0.1));
  ASSERT_EQ(traj.termination, Termination::completed);
  EXPECT_DOUBLE_EQ(traj.times.back(), 2 * pi);
  EXPECT_LT(state_distance(traj.states.back(), s0), 1e-8);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto x = oracle::harmonic(1, 0, 1, traj.times[i]);
    EXPECT_NEAR(traj.states[i].q1, x[0], 1e-10);
    EXPECT_NEAR(traj.states[i].p1, x[1], 1e-10);
  }
}

TEST(Integrate, SampleGrid) {
  const SystemSpec spec = VaN{1, 1, 1, 0, 0};
  const auto traj = integrate(spec, {1, 0, 0, 1, Chart::cartesian}, options(1.05, 0.1));
  ASSERT_EQ(traj.times.size(), 12u);
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    EXPECT_DOUBLE_EQ(traj.times[i], 0.1 * static_cast<double>(i));
    EXPECT_LT(traj.times[i], traj.times[i + 1]);
  }
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.05);

  const auto exact = integrate(spec, {1, 0, 0, 1, Chart::cartesian}, options(1.0, 0.1));
  EXPECT_EQ(exact.times.size(), 11u);
  EXPECT_DOUBLE_EQ(exact.times.back(), 1.0);
}

TEST(Integrate, ChartMismatchIsAnError) {
  EXPECT_THROW(integrate(Vak{}, {1, 1, 0, 0, Chart::cartesian}, options(1)), Error);
  EXPECT_THROW(integrate(VaN{}, {1, 1, 0, 0, Chart::cartesian}, options(-1)), Error);
}

TEST(Integrate, TracksHaveNoNaN) {
  Rng rng(3);
  const SystemSpec spec = random_parameters(Vak{1, Rational(5, 3), 0, 0}, rng);
  const PhaseState s0 = random_regular_point(spec, rng);
  std::vector<InvariantSpec> track;
  for (auto k : all_invariant_kinds) {
    if (is_applicable(k, spec)) track.push_back({k, spec});
  }
  const auto traj = integrate(spec, s0, options(20), track);
  ASSERT_EQ(traj.termination, Termination::completed);
  for (const auto& t : traj.tracks) {
    ASSERT_EQ(t.values.size(), traj.times.size());
    for (double v : t.values) EXPECT_TRUE(std::isfinite(v)) << t.name();
  }
}

TEST(Integrate, AttractiveBarrierStopsNearSingularSet) {
  // k1 < 0 pulls the particle onto x = 0; the controller either lands inside
  // the guard band or runs out of step size on the way in
  const SystemSpec spec = VaN{1, 1, 1, -0.5, 0};
  const auto traj = integrate(spec, {0.5, 1, -1, 0, Chart::cartesian}, options(10));
  EXPECT_NE(traj.termination, Termination::completed);
  ASSERT_FALSE(traj.states.empty());
  for (const auto& s : traj.states) EXPECT_GT(s.q1, 0.0);
  EXPECT_LT(traj.times.back(), 10.0);
}

TEST(Integrate, JumpingAcrossSingularLineAborts) {
  // loose tolerance and a weak barrier: steps are long enough to cross x = 0
  const SystemSpec spec = VaN{1, 1, 1, -1e-9, 0};
  auto o = options(10, 5);
  o.rel_tol = o.abs_tol = 1e-3;
  const auto traj = integrate(spec, {1, 1, 0, 0, Chart::cartesian}, o);
  EXPECT_EQ(traj.termination, Termination::singularity_abort);
  for (const auto& s : traj.states) EXPECT_GT(s.q1, 0.0);
}

TEST(Integrate, RadialInfallDoesNotComplete) {
  const SystemSpec spec = Vck{1.0, Rational(1, 1), 0, 0};
  const auto traj = integrate(spec, {1, 0.3, 0, 0, Chart::polar}, options(5));
  EXPECT_NE(traj.termination, Termination::completed);
}

TEST(Integrate, UnreachableToleranceUnderflows) {
  auto o = options(1.0);
  o.rel_tol = o.abs_tol = 1e-300;
  const auto traj = integrate(VaN{1, 1, 1, 0, 0}, {1, 0, 0, 1, Chart::cartesian}, o);
  EXPECT_EQ(traj.termination, Termination::step_underflow);
}

TEST(Integrate, StartingInsideGuardBand) {
  const SystemSpec spec = VaN{1, 1, 1, 0.5, 0};
  const auto traj = integrate(spec, {1e-7, 1, 1, 0, Chart::cartesian}, options(1));
  EXPECT_EQ(traj.termination, Termination::singularity_abort);
}

TEST(Integrate, TimeReversal) {
  Rng rng(4);
  const std::vector<SystemSpec> protos = {VaN{2, 3, 1, 0, 0}, VbN{1, 2, 1, 0, 0}, Vak{1, Rational(3, 2), 0, 0},
                                          Vck{1, Rational(2, 1), 0, 0}, VckRot{1, Rational(1, 1), 0, 0}};
  for (const auto& proto : protos) {
    const SystemSpec spec = random_parameters(proto, rng);
    const PhaseState s0 = random_regular_point(spec, rng);
    const auto fwd = integrate(spec, s0, options(10, 1.0));
    ASSERT_EQ(fwd.termination, Termination::completed);
    const auto back = integrate(spec, with_reversed_momenta(fwd.states.back()), options(10, 1.0));
    ASSERT_EQ(back.termination, Termination::completed);
    EXPECT_LT(state_distance(back.states.back(), with_reversed_momenta(s0)), 1e-7) << family_name(spec);
  }
}

TEST(Integrate, TighterToleranceDoesNotIncreaseError) {
  const std::vector<std::pair<SystemSpec, PhaseState>> cases = {
      {Vak{1.0, Rational(4, 1), 1.6, 0.4}, {1, pi / 8, 0.3, 0.5, Chart::polar}},
      {VaN{1, 1, 1, 0.3, 0.5}, {1, 0.8, 0.3, -0.4, Chart::cartesian}},
      {Vck{1, Rational(2, 1), 1.6, 0.4}, {1.2, pi / 4, 0.2, 0.6, Chart::polar}}};
  for (const auto& [spec, s0] : cases) {
    auto o = options(10, 10);
    o.rel_tol = o.abs_tol = 1e-14;
    const PhaseState ref = integrate(spec, s0, o).states.back();
    double previous = std::numeric_limits<double>::infinity();
    o.abs_tol = 1e-12;
    // decades: single halvings are not monotone for any embedded pair
    for (double tol = 1e-6; tol >= 1e-12; tol *= 0.1) {
      o.rel_tol = tol;
      const double err = state_distance(integrate(spec, s0, o).states.back(), ref);
      EXPECT_LE(err, previous) << family_name(spec) << " tol " << tol;
      previous = err;
    }
    EXPECT_LT(previous, 1e-10);
  }
}

TEST(Integrate, Deterministic) {
  const SystemSpec spec = Vck{1.0, Rational(3, 2), 1.0, 0.3};
  const PhaseState s0{1.2, 0.5, 0.1, 0.7, Chart::polar};
  const auto a = integrate(spec, s0, options(20), {{InvariantKind::ImKk, spec}});
  const auto b = integrate(spec, s0, options(20), {{InvariantKind::ImKk, spec}});
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.tracks[0].values, b.tracks[0].values);
}

TEST(Symplectic, EnergyBandShrinksFourfold) {
  const SystemSpec spec = VaN{1, 1, 1, 0, 0};
  const PhaseState s0{1, 0.5, 0, 0.3, Chart::cartesian};
  auto band = [&](double h) {
    auto o = options(1000, 0.1);
    o.fixed_step = h;
    const auto traj = integrate_fixed_symplectic(spec, s0, o, {{InvariantKind::H, spec}});
    EXPECT_EQ(traj.termination, Termination::completed);
    const auto& v = traj.tracks[0].values;
    double dev = 0.0;
    for (double x : v) dev = std::max(dev, std::abs(x - v[0]));
    // no secular drift: the second half stays inside the same band
    double late = 0.0;
    for (std::size_t i = v.size() / 2; i < v.size(); ++i) late = std::max(late, std::abs(v[i] - v[0]));
    EXPECT_LE(late, dev);
    return dev;
  };
  const double ratio = band(0.02) / band(0.01);
  EXPECT_NEAR(ratio, 4.0, 0.4);
}

TEST(Symplectic, ObservedOrderTwo) {
  const SystemSpec spec = VaN{1, 1, 1, 0, 0};
  const PhaseState s0{1, 0.5, 0, 0.3, Chart::cartesian};
  auto error = [&](double h) {
    auto o = options(10, 10);
    o.fixed_step = h;
    const auto s = integrate_fixed_symplectic(spec, s0, o).states.back();
    const auto x = oracle::harmonic(1, 0, 1, 10), y = oracle::harmonic(0.5, 0.3, 1, 10);
    return std::hypot(std::hypot(s.q1 - x[0], s.p1 - x[1]), std::hypot(s.q2 - y[0], s.p2 - y[1]));
  };
  const double order = std::log2(error(0.01) / error(0.005));
  EXPECT_NEAR(order, 2.0, 0.2);
}

TEST(Symplectic, AgreesWithAdaptiveIntegrator) {
  const std::vector<std::pair<SystemSpec, PhaseState>> cases = {
      {VaN{1, 1, 1.0, 0.3, 0.5}, {1.0, 0.8, 0.3, -0.4, Chart::cartesian}},
      {VaN{1, 2, 1.0, 0.5, 0.3}, {1.0, 0.8, 0.3, -0.4, Chart::cartesian}},
      {VbN{1, 2, 1.0, 0.4, 0.7}, {1.0, 0.5, 0.2, 0.3, Chart::cartesian}}};
  for (const auto& [spec, s0] : cases) {
    auto o = options(10, 1);
    o.fixed_step = 1e-4;
    const auto a = integrate_fixed_symplectic(spec, s0, o).states.back();
    const auto b = integrate(spec, s0, o).states.back();
    EXPECT_LT(state_distance(a, b), 1e-6) << family_name(spec);
  }
}

TEST(Symplectic, DisagreementScalesWithStepSquared) {
  const SystemSpec spec = VaN{2, 3, 1.0, 0.5, 0.3};
  const PhaseState s0{1.0, 0.8, 0.3, -0.4, Chart::cartesian};
  auto gap = [&](double h) {
    auto o = options(10, 1);
    o.fixed_step = h;
    return state_distance(integrate_fixed_symplectic(spec, s0, o).states.back(),
                          integrate(spec, s0, o).states.back());
  };
  EXPECT_NEAR(gap(2e-4) / gap(1e-4), 4.0, 0.4);
}

TEST(Symplectic, RejectsPolarFamilies) {
  EXPECT_THROW(integrate_fixed_symplectic(Vak{}, {1, 1, 0, 1, Chart::polar}, options(1)), Error);
}

TEST(Symplectic, AbortsAtSingularSet) {
  const SystemSpec spec = VaN{1, 1, 1, -0.5, 0};
  auto o = options(10);
  o.fixed_step = 1e-3;
  EXPECT_EQ(integrate_fixed_symplectic(spec, {0.5, 1, -1, 0, Chart::cartesian}, o).termination,
            Termination::singularity_abort);
}
