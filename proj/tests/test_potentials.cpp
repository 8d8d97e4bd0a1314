#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "superint/potentials.hpp"
#include "superint/sampling.hpp"

using namespace superint;

namespace {

constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST(AngularF, Examples) {
  EXPECT_NEAR(eval_Fk(Rational(2, 1), 1, 0, pi / 4), 1.0, 1e-15);
  EXPECT_NEAR(eval_Fk(Rational(1, 1), 0, 1, pi / 2), 0.0, 1e-15);
  // frozen reference value
  EXPECT_NEAR(eval_Fk(Rational(3, 1), 2, 1, 0.7), 2.006566735150483, 1e-14);
  for (double r : {0.5, 1.0, 2.5}) {
    const double x = r * std::cos(0.7), y = r * std::sin(0.7);
    EXPECT_LT(rel(fk_cartesian(3, 2, 1, x, y) * r * r, eval_Fk(Rational(3, 1), 2, 1, 0.7)), 1e-13);
  }
}

TEST(AngularF, SingularBandIsAnError) {
  EXPECT_EQ(kind_of([] { eval_Fk(Rational(1, 1), 1, 0, 0.0); }), ErrorKind::singularity);
  EXPECT_EQ(kind_of([] { eval_Fk(Rational(2, 1), 1, 0, pi / 2); }), ErrorKind::singularity);
  EXPECT_EQ(kind_of([] { eval_Gk(Rational(1, 1), 1, 0, pi / 2); }), ErrorKind::singularity);
  EXPECT_NO_THROW(eval_Fk(Rational(1, 1), 1, 0, 1e-9));
}

TEST(AngularG, Examples) {
  EXPECT_NEAR(eval_Gk(Rational(1, 1), 1, 0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(eval_Gk(Rational(2, 1), 1, 1, 0.3), eval_Fk(Rational(2, 1), 1, 1, 0.3 - pi / 4), 1e-13);
}

// G_k is F_k rotated by -pi/(2k). Rotating by +pi/(2k) flips the sign of the
// kb term, so it only matches when kb = 0.
TEST(AngularG, RotationDirection) {
  const Rational k(2, 1);
  const double phi = 0.3;
  EXPECT_GT(rel(eval_Gk(k, 1, 1, phi), eval_Fk(k, 1, 1, phi + pi / 4)), 1e-2);
  EXPECT_LT(rel(eval_Gk(k, 1, 0, phi), eval_Fk(k, 1, 0, phi + pi / 4)), 1e-14);
  EXPECT_LT(rel(eval_Gk(k, 1, 1, phi), eval_Fk(k, 1, 1, phi - rotation_angle(k))), 1e-14);
  EXPECT_DOUBLE_EQ(rotation_angle(Rational(1, 2)), pi);
}

TEST(AngularF, DerivativesMatchFiniteDifferences) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Rational k = std::vector<Rational>{{1, 1}, {2, 1}, {3, 1}, {1, 2}, {3, 2}, {5, 3}}[rng.index(6)];
    const double ka = rng.uniform(0.2, 1.5), kb = rng.uniform(-0.8, 0.8) * ka;
    const double phi = rng.uniform(0.3, 3.0);
    if (std::abs(std::sin(k.value() * phi)) < 0.1 || std::abs(std::cos(k.value() * phi)) < 0.1) continue;
    const double h = 1e-6;
    const double fd_f = (eval_Fk(k, ka, kb, phi + h) - eval_Fk(k, ka, kb, phi - h)) / (2 * h);
    const double fd_g = (eval_Gk(k, ka, kb, phi + h) - eval_Gk(k, ka, kb, phi - h)) / (2 * h);
    EXPECT_LT(std::abs(eval_dFk(k, ka, kb, phi) - fd_f), 1e-6 * std::max(1.0, std::abs(fd_f)));
    EXPECT_LT(std::abs(eval_dGk(k, ka, kb, phi) - fd_g), 1e-6 * std::max(1.0, std::abs(fd_g)));
  }
}

TEST(Potential, Examples) {
  EXPECT_DOUBLE_EQ(eval_potential(VaN{1, 1, 1.0, 0, 0}, {1, 1, 0, 0, Chart::cartesian}), 1.0);
  EXPECT_DOUBLE_EQ(eval_potential(Vck{1.0, Rational(1, 1), 0, 0}, {2, 0.123, 0, 0, Chart::polar}), -0.5);
  // VbN: linear term in y
  EXPECT_DOUBLE_EQ(eval_potential(VbN{1, 2, 1.0, 0, 0.5}, {0, 1, 0, 0, Chart::cartesian}), 2.0 + 0.5);
}

TEST(Potential, IndependentOfMomenta) {
  const SystemSpec spec = Vak{1.2, Rational(3, 2), 1.0, 0.3};
  EXPECT_EQ(eval_potential(spec, {1.1, 0.9, 0, 0, Chart::polar}),
            eval_potential(spec, {1.1, 0.9, -3, 7, Chart::polar}));
}

TEST(Potential, ChartAndSingularityErrors) {
  EXPECT_EQ(kind_of([] { eval_potential(Vak{}, {1, 1, 0, 0, Chart::cartesian}); }), ErrorKind::wrong_chart);
  EXPECT_EQ(kind_of([] { eval_potential(VaN{}, {1, 1, 0, 0, Chart::polar}); }), ErrorKind::wrong_chart);
  EXPECT_EQ(kind_of([] { eval_potential(VaN{1, 1, 1, 0.5, 0}, {0, 1, 0, 0, Chart::cartesian}); }),
            ErrorKind::singularity);
  EXPECT_EQ(kind_of([] { eval_potential(VaN{1, 1, 1, 0, 0.5}, {1, 1e-12, 0, 0, Chart::cartesian}); }),
            ErrorKind::singularity);
  EXPECT_EQ(kind_of([] { eval_potential(Vck{1, Rational(1, 1), 1, 0}, {1, 0, 0, 0, Chart::polar}); }),
            ErrorKind::singularity);
  EXPECT_EQ(kind_of([] { eval_potential(VckRot{1, Rational(1, 1), 1, 0}, {1, pi / 2, 0, 0, Chart::polar}); }),
            ErrorKind::singularity);
  EXPECT_EQ(kind_of([] { eval_potential(Vck{}, {0, 0, 0, 0, Chart::polar}); }), ErrorKind::nonpositive_radius);
}

TEST(Potential, InactiveCouplingsHaveNoSingularSet) {
  EXPECT_NO_THROW(eval_potential(VaN{1, 1, 1, 0, 0}, {0, 0, 0, 0, Chart::cartesian}));
  EXPECT_NO_THROW(eval_potential(VbN{1, 2, 1, 0, 1}, {0, 0, 0, 0, Chart::cartesian}));
  EXPECT_NO_THROW(eval_potential(Vck{1, Rational(1, 1), 0, 0}, {1, 0, 0, 0, Chart::polar}));
  EXPECT_TRUE(std::isinf(singular_distance(VaN{}, {0, 0, 0, 0, Chart::cartesian})));
}

TEST(Potential, RejectsInvalidParameters) {
  EXPECT_THROW(validate(SystemSpec{VaN{0, 1, 1, 0, 0}}), Error);
  EXPECT_THROW(validate(SystemSpec{VbN{1, 2, -1, 0, 0}}), Error);
  EXPECT_THROW(validate(SystemSpec{Vak{0.0, Rational(1, 1), 0, 0}}), Error);
  EXPECT_THROW(validate(SystemSpec{Vck{std::nan(""), Rational(1, 1), 0, 0}}), Error);
  EXPECT_NO_THROW(validate(SystemSpec{Vck{-1.0, Rational(1, 1), 0, 0}}));
}

TEST(Potential, GradientExamples) {
  const auto g = grad_potential(VaN{1, 1, 1, 0, 0}, {1, 0, 0, 0, Chart::cartesian});
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
  // d(-1/r)/dr = 1/r^2 with g = 1, r = 2
  EXPECT_DOUBLE_EQ(grad_potential(Vck{1, Rational(1, 1), 0, 0}, {2, 0, 0, 0, Chart::polar})[0], 0.25);
}

TEST(Potential, GradientMatchesFiniteDifferences) {
  const std::vector<SystemSpec> protos = {VaN{2, 3, 1, 0, 0},          VbN{1, 2, 1, 0, 0},
                                          Vak{1, Rational(3, 2), 0, 0}, Vck{1, Rational(5, 3), 0, 0},
                                          VckRot{1, Rational(2, 1), 0, 0}};
  Rng rng(17);
  for (const auto& proto : protos) {
    for (int i = 0; i < 1000; ++i) {
      const SystemSpec spec = random_parameters(proto, rng);
      const PhaseState s = random_regular_point(spec, rng);
      const auto fd = oracle::fd_gradient([&](const PhaseState& t) { return eval_potential(spec, t); }, s);
      const auto g = grad_potential(spec, s);
      const double scale = std::max(1.0, oracle::max_abs(fd));
      EXPECT_LT(std::abs(g[0] - fd[0]), 1e-6 * scale) << family_name(spec);
      EXPECT_LT(std::abs(g[1] - fd[1]), 1e-6 * scale) << family_name(spec);
    }
  }
}

TEST(TtwMap, Examples) {
  const auto m = map_ttw_to_ak(1, 1, Rational(1, 1));
  EXPECT_EQ(m.ka, 4);
  EXPECT_EQ(m.kb, 0);
  EXPECT_EQ(m.k, Rational(2, 1));
  const auto z = map_ttw_to_ak(0, 0, Rational(3, 2));
  EXPECT_EQ(z.ka, 0);
  EXPECT_EQ(z.kb, 0);
  EXPECT_EQ(z.k, Rational(3, 1));
  const auto w = map_ttw_to_ak(1, 2, Rational(3, 2));
  EXPECT_EQ(w.ka, 6);
  EXPECT_EQ(w.kb, 2);
  EXPECT_EQ(w.k, Rational(3, 1));
  const auto p = map_pw_to_ck(1, 2, Rational(3, 2));
  EXPECT_EQ(p.ka, 6);
  EXPECT_EQ(p.kb, 2);
  EXPECT_EQ(p.k, Rational(3, 1));
}

TEST(TtwMap, PointwiseReductionOnRandomPoints) {
  Rng rng(23);
  const std::vector<Rational> ks = {{1, 1}, {2, 1}, {3, 2}, {1, 2}, {3, 4}};
  int checked = 0;
  while (checked < 1000) {
    const Rational k = ks[rng.index(ks.size())];
    const double alpha = rng.uniform(0.1, 2), beta = rng.uniform(0.1, 2);
    const double r = rng.uniform(0.3, 3), phi = rng.uniform(0.3, 3), w = rng.uniform(0.5, 1.5);
    const double a = k.value() * phi;
    if (std::abs(std::sin(a)) < 0.1 || std::abs(std::cos(a)) < 0.1) continue;
    ++checked;
    // direct TTW / PW forms
    const double barrier = alpha / std::pow(std::cos(a), 2) + beta / std::pow(std::sin(a), 2);
    const double ttw = 0.5 * w * w * r * r + barrier / (2 * r * r);
    const double pw = -w / r + barrier / (2 * r * r);
    const auto m = map_ttw_to_ak(alpha, beta, k);
    const PhaseState s{r, phi, 0, 0, Chart::polar};
    EXPECT_LT(rel(eval_potential(Vak{w, m.k, m.ka, m.kb}, s), ttw), 1e-12);
    EXPECT_LT(std::abs(eval_potential(Vck{w, m.k, m.ka, m.kb}, s) - pw) /
                  (w / r + barrier / (2 * r * r)),
              1e-12);
    EXPECT_LT(rel(eval_ttw(w, alpha, beta, k, r, phi), ttw), 1e-12);
  }
}

TEST(CartesianForms, MatchPolarEvaluation) {
  Rng rng(29);
  int checked = 0;
  while (checked < 3000) {
    const int k = 1 + static_cast<int>(rng.index(3));
    const double ka = rng.uniform(0.2, 1.5), kb = rng.uniform(-0.8, 0.8) * ka;
    const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3);
    const double r = std::hypot(x, y), phi = std::atan2(y, x);
    if (r < 0.3 || std::abs(std::sin(k * phi)) < 0.05) continue;
    ++checked;
    const double polar = eval_Fk(Rational(k, 1), ka, kb, phi) / (r * r);
    EXPECT_LT(rel(fk_cartesian(k, ka, kb, x, y), polar), 1e-11) << k;
    EXPECT_LT(rel(oracle::fk_over_r2_integer(k, ka, kb, x, y), polar), 1e-11) << k;
  }
}

TEST(CartesianForms, HandValueForKTwo) {
  EXPECT_DOUBLE_EQ(fk_cartesian(2, 1, 0, 1, 1), 0.5);
  EXPECT_NEAR(eval_Fk(Rational(2, 1), 1, 0, pi / 4) / 2.0, 0.5, 1e-15);
  EXPECT_THROW(fk_cartesian(4, 1, 0, 1, 1), Error);
}

TEST(RotatedFamily, PotentialIsRotatedKeplerFamily) {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const Rational k = std::vector<Rational>{{1, 1}, {2, 1}, {3, 2}}[rng.index(3)];
    const double g = rng.uniform(0.5, 2), ka = rng.uniform(0.2, 1.5), kb = rng.uniform(-0.8, 0.8) * ka;
    const double r = rng.uniform(0.3, 3), phi = rng.uniform(0.3, 3);
    if (std::abs(std::cos(k.value() * phi)) < 0.1) continue;
    const double rot = eval_potential(VckRot{g, k, ka, kb}, {r, phi, 0, 0, Chart::polar});
    const double ref = eval_potential(Vck{g, k, ka, kb}, {r, phi - rotation_angle(k), 0, 0, Chart::polar});
    EXPECT_LT(std::abs(rot - ref), 1e-12 * std::max(1.0, std::abs(ref)));
  }
}
