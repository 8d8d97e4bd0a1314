#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "superint/hamiltonians.hpp"
#include "superint/sampling.hpp"

using namespace superint;

namespace {

const std::vector<SystemSpec>& prototypes() {
  static const std::vector<SystemSpec> p = {
      VaN{1, 1, 1, 0, 0},          VaN{2, 3, 1, 0, 0},           VbN{1, 2, 1, 0, 0},
      VbN{2, 3, 1, 0, 0},          Vak{1, Rational(2, 1), 0, 0}, Vak{1, Rational(5, 3), 0, 0},
      Vck{1, Rational(1, 1), 0, 0}, Vck{1, Rational(3, 2), 0, 0}, VckRot{1, Rational(2, 1), 0, 0}};
  return p;
}

}  // namespace

TEST(Hamiltonian, Examples) {
  EXPECT_DOUBLE_EQ(eval_H(Vak{1, Rational(2, 1), 0, 0}, {1, std::numbers::pi / 4, 0, 1, Chart::polar}), 1.0);
  EXPECT_DOUBLE_EQ(eval_H(Vck{1, Rational(1, 1), 0, 0}, {1, 0, 0, 1, Chart::polar}), -0.5);
}

TEST(HamiltonRhs, FreeAndHookeMotion) {
  const auto free = hamilton_rhs(Vck{0, Rational(1, 1), 0, 0}, {2, 0.5, 0.3, 0.0, Chart::polar});
  EXPECT_DOUBLE_EQ(free.dq1, 0.3);
  EXPECT_DOUBLE_EQ(free.dp1, 0.0);
  EXPECT_DOUBLE_EQ(free.dp2, 0.0);
  const auto hooke = hamilton_rhs(VaN{1, 1, 1, 0, 0}, {1, 0, 0, 0, Chart::cartesian});
  EXPECT_DOUBLE_EQ(hooke.dp1, -1.0);
  EXPECT_DOUBLE_EQ(hooke.dq1, 0.0);
}

TEST(HamiltonRhs, CentrifugalTerm) {
  // circular Kepler orbit: gravity balances the centrifugal force exactly
  const auto f = hamilton_rhs(Vck{1, Rational(1, 1), 0, 0}, {1, 0, 0, 1, Chart::polar});
  EXPECT_EQ(f.dp1, 0.0);
  EXPECT_EQ(f.dq2, 1.0);
}

TEST(HamiltonRhs, IsSymplecticDualOfGradient) {
  Rng rng(2);
  for (const auto& proto : prototypes()) {
    const SystemSpec spec = random_parameters(proto, rng);
    const PhaseState s = random_regular_point(spec, rng);
    const auto g = grad_H(spec, s);
    const auto f = hamilton_rhs(spec, s);
    EXPECT_EQ(f.dq1, g.dp1);
    EXPECT_EQ(f.dq2, g.dp2);
    EXPECT_EQ(f.dp1, -g.dq1);
    EXPECT_EQ(f.dp2, -g.dq2);
  }
}

TEST(GradH, MatchesFiniteDifferencesPerFamily) {
  Rng rng(7);
  for (const auto& proto : prototypes()) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const SystemSpec spec = random_parameters(proto, rng);
      const PhaseState s = random_regular_point(spec, rng);
      const auto fd = oracle::fd_gradient([&](const PhaseState& t) { return eval_H(spec, t); }, s);
      const auto g = grad_H(spec, s);
      const double scale = std::max(1.0, oracle::max_abs(fd));
      worst = std::max({worst, std::abs(g.dq1 - fd[0]) / scale, std::abs(g.dq2 - fd[1]) / scale,
                        std::abs(g.dp1 - fd[2]) / scale, std::abs(g.dp2 - fd[3]) / scale});
    }
    EXPECT_LT(worst, 1e-6) << family_name(proto);
  }
}

TEST(PoissonBracket, AntisymmetryAndSelfBracket) {
  Rng rng(8);
  const SystemSpec spec = random_parameters(Vak{1, Rational(3, 2), 0, 0}, rng);
  const PhaseState s = random_regular_point(spec, rng);
  const auto gh = grad_H(spec, s);
  EXPECT_EQ(poisson_bracket(gh, gh), 0.0);
  const PhaseGradient other{0.3, -1.2, 0.7, 2.0};
  EXPECT_EQ(poisson_bracket(gh, other), -poisson_bracket(other, gh));
  // canonical pairs
  EXPECT_EQ(poisson_bracket({1, 0, 0, 0}, {0, 0, 1, 0}), 1.0);
  EXPECT_EQ(poisson_bracket({0, 1, 0, 0}, {0, 0, 0, 1}), 1.0);
}
