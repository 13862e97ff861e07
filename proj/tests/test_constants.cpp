#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bnlab/constants.hpp"

using namespace bnlab;
constexpr double pi = std::numbers::pi;

TEST(Gamma, SmallValues) {
  EXPECT_NEAR(gamma_fn(1.0), 1.0, 1e-14);
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(pi), 1e-14);
  EXPECT_NEAR(gamma_fn(5.0), 24.0, 1e-12);
}

TEST(Gamma, MatchesStdTgamma) {
  for (double x = 0.05; x < 30.0; x *= 1.37)
    EXPECT_NEAR(gamma_fn(x) / std::tgamma(x), 1.0, 1e-13) << x;
}

TEST(Gamma, Recurrence) {
  for (double x = 0.1; x < 20.0; x += 0.7) EXPECT_NEAR(gamma_fn(x + 1.0) / (x * gamma_fn(x)), 1.0, 1e-13);
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(gamma_fn(0.0), DomainError);
  EXPECT_THROW(gamma_fn(-1.5), DomainError);
}

TEST(SphereArea, LowDimensions) {
  EXPECT_NEAR(omega_n(2), 2.0 * pi, 1e-13);
  EXPECT_NEAR(omega_n(3), 4.0 * pi, 1e-13);
  EXPECT_NEAR(omega_n(4), 2.0 * pi * pi, 1e-13);
  EXPECT_NEAR(omega_n(5), 8.0 * pi * pi / 3.0, 1e-13);
}

TEST(ParamsRegime, Gate) {
  EXPECT_TRUE(Params(4, 3.0).regime_ok);
  EXPECT_FALSE(Params(4, 2.0).regime_ok);
  EXPECT_FALSE(Params(4, 4.0).regime_ok);
  EXPECT_TRUE(Params(3, 5.0).regime_ok);
  EXPECT_FALSE(Params(3, 3.0).regime_ok);
  EXPECT_NEAR(Params(3, 5.0).lower_q(), 4.0, 0.0);
  EXPECT_THROW(Params(2, 3.0), DomainError);
  EXPECT_NE(Params(4, 2.0).regime_message().find("exceed"), std::string::npos);
}

TEST(CNq, QuadratureOracle) {
  EXPECT_NEAR(c_nq(Params(4, 3.0)), 0.25, 1e-14);
  EXPECT_NEAR(c_nq(Params(3, 5.0)), std::tgamma(1.5) * std::tgamma(1.0) / (2.0 * std::tgamma(2.5)), 1e-14);
  for (auto [n, q] : {std::pair{4, 3.0}, {3, 5.0}, {5, 3.0}, {3, 4.5}, {6, 2.5}, {5, 2.2}}) {
    const Params p(n, q);
    EXPECT_NEAR(c_nq(p), c_nq_quadrature(p), 1e-8 * c_nq(p)) << n << " " << q;
  }
}

TEST(AlphaNq, FourThree) {
  EXPECT_NEAR(alpha_nq(Params(4, 3.0)), 96.0 * pi * pi, 1e-10);
  EXPECT_THROW(alpha_nq(Params(4, 2.0)), DomainError);
}

TEST(AlphaNq, PositiveAndPole) {
  for (int n = 3; n <= 7; ++n) {
    const Params p0(n, 3.0);
    const double lo = p0.lower_q(), hi = p0.two_star;
    for (double t : {0.1, 0.5, 0.9}) EXPECT_GT(alpha_nq(Params(n, lo + t * (hi - lo))), 0.0);
  }
  EXPECT_GT(alpha_nq(Params(4, 4.0 - 1e-6)), 1e6 * alpha_nq(Params(4, 3.0)));
}

TEST(Sobolev, TwoRoutesAgree) {
  for (int n = 3; n <= 8; ++n) {
    EXPECT_GT(sobolev_sn2(n), 0.0);
    EXPECT_NEAR(sobolev_sn2(n) / sobolev_sn2_from_lstar(n), 1.0, 1e-6) << n;
  }
}

TEST(Sobolev, KnownClosedForm) {
  // S = N(N-2)/4 |S^N|^{2/N}
  const int n = 3;
  const double S = 0.25 * n * (n - 2.0) * std::pow(2.0, 2.0 / n) * std::pow(pi, 1.0 + 1.0 / n) /
                   std::pow(std::tgamma(0.5 * (n + 1)), 2.0 / n);
  EXPECT_NEAR(sobolev_sn2(n) / std::pow(S, 0.5 * n), 1.0, 1e-10);
}

TEST(Robin, UnitBallCenter) {
  EXPECT_NEAR(unit_ball_robin_center(3), 1.0 / (4.0 * pi), 1e-15);
  EXPECT_NEAR(unit_ball_robin_center(4), 1.0 / (4.0 * pi * pi), 1e-15);
}

TEST(ConstantSet, BlowupTargetFourThree) {
  const auto c = constant_set(Params(4, 3.0));
  EXPECT_NEAR(c.blowup_target, 24.0, 1e-10);
  EXPECT_NEAR(c.alpha_N, std::sqrt(8.0), 1e-14);
  EXPECT_THROW(constant_set(Params(4, 2.0)), DomainError);
}
