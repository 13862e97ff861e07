#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bnlab/green_ball.hpp"

using namespace bnlab;
constexpr double pi = std::numbers::pi;

namespace {

Point random_inside(std::mt19937_64& rng, int n, double rmax) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  Point x(n);
  for (double& v : x) v = nd(rng);
  const double s = rmax * std::pow(ud(rng), 1.0 / n) / std::sqrt(norm2(x));
  for (double& v : x) v *= s;
  return x;
}

double lap_y(const BallGreen& g, const Point& x, Point y, double h) {
  double acc = 0.0;
  const double f0 = regular_part(g, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) {
    Point a = y, b = y;
    a[i] += h;
    b[i] -= h;
    acc += (regular_part(g, x, a) - 2.0 * f0 + regular_part(g, x, b)) / (h * h);
  }
  return acc;
}

}  // namespace

TEST(Green, ThreeDimensionalCenterFormula) {
  const BallGreen g(3, 1.0);
  for (double r : {0.1, 0.5, 0.9}) {
    const Point x{0.0, r, 0.0};
    EXPECT_NEAR(green(g, x, Point(3, 0.0)), (1.0 / r - 1.0) / (4.0 * pi), 1e-14);
  }
}

TEST(Green, VanishesOnBoundary) {
  for (int n = 3; n <= 6; ++n) {
    const BallGreen g(n, 1.3);
    Point y(n, 0.0), x(n, 0.0);
    y[0] = 0.4;
    y[1] = -0.2;
    x[n - 1] = 1.3;
    EXPECT_NEAR(green(g, x, y), 0.0, 1e-14);
    // H(x, .) equals S(x, .) on the boundary
    EXPECT_NEAR(regular_part(g, y, x), singular_part(g, y, x), 1e-14);
  }
}

TEST(Green, SymmetricPositiveAndBounded) {
  std::mt19937_64 rng(7);
  for (int n = 3; n <= 5; ++n) {
    const BallGreen g(n, 1.0);
    for (int t = 0; t < 200; ++t) {
      const Point x = random_inside(rng, n, 0.99), y = random_inside(rng, n, 0.99);
      const double gxy = green(g, x, y), gyx = green(g, y, x);
      EXPECT_NEAR(gxy, gyx, 1e-12 * std::abs(gxy));
      EXPECT_GT(gxy, 0.0);
      EXPECT_LT(gxy, singular_part(g, x, y));
      EXPECT_GT(regular_part(g, x, y), 0.0);
    }
  }
}

TEST(Green, PoleThrows) {
  const BallGreen g(3, 1.0);
  EXPECT_THROW(green(g, Point{0.1, 0.2, 0.0}, Point{0.1, 0.2, 0.0}), SingularityError);
  EXPECT_THROW(green(g, Point{1.1, 0.0, 0.0}, Point{0.1, 0.2, 0.0}), DomainError);
  EXPECT_THROW(BallGreen(2, 1.0), DomainError);
}

TEST(Green, RegularPartHarmonic) {
  for (int n = 3; n <= 5; ++n) {
    const BallGreen g(n, 1.0);
    Point x(n, 0.1), y(n, -0.15);
    x[0] = 0.5;
    EXPECT_LT(std::abs(lap_y(g, x, y, 1e-3)), 1e-5 * regular_part(g, x, y)) << n;
  }
}

TEST(Robin, BallFormula) {
  const BallGreen g3(3, 1.0), g4(4, 1.0);
  EXPECT_NEAR(robin(g3, Point(3, 0.0)), 1.0 / (4.0 * pi), 1e-15);
  EXPECT_NEAR(regular_part(g3, Point(3, 0.0), Point(3, 0.0)), 1.0 / (4.0 * pi), 1e-15);
  EXPECT_NEAR(robin(g3, Point{0.5, 0.0, 0.0}), 1.0 / (3.0 * pi), 1e-15);
  EXPECT_NEAR(robin(g4, Point(4, 0.0)), 1.0 / (4.0 * pi * pi), 1e-15);
}

TEST(Robin, GradientRadialOutward) {
  const BallGreen g(4, 1.0);
  for (double v : robin_gradient(g, Point(4, 0.0))) EXPECT_EQ(v, 0.0);
  const Point x{0.2, -0.3, 0.1, 0.05};
  const Point gr = robin_gradient(g, x);
  const double c = dot(gr, x) / std::sqrt(norm2(gr) * norm2(x));
  EXPECT_NEAR(c, 1.0, 1e-14);
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Point a = x, b = x;
    a[i] += h;
    b[i] -= h;
    EXPECT_NEAR(gr[i], (robin(g, a) - robin(g, b)) / (2 * h), 1e-7 * std::abs(gr[i]) + 1e-9);
  }
}

TEST(Robin, HessianMatchesGradientDifferences) {
  const BallGreen g(3, 1.0);
  const Point x{0.2, -0.3, 0.1};
  const Matrix H = robin_hessian(g, x);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Point a = x, b = x;
    a[j] += h;
    b[j] -= h;
    const Point ga = robin_gradient(g, a), gb = robin_gradient(g, b);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(H[i][j], (ga[i] - gb[i]) / (2 * h), 1e-6 * std::abs(H[i][j]) + 1e-8);
  }
}

TEST(Robin, BoundaryBlowupRate) {
  for (int n : {3, 4, 5}) {
    const BallGreen g(n, 1.0);
    double prev = 1e300;
    for (double d : {1e-2, 1e-3, 1e-4}) {
      Point x(n, 0.0);
      x[0] = 1.0 - d;
      const double v = robin(g, x) * std::pow(2.0 * d, n - 2) * (n - 2.0) * omega_n(n);
      EXPECT_LT(std::abs(v - 1.0), prev);
      prev = std::abs(v - 1.0);
    }
    EXPECT_LT(prev, 1e-3);
  }
}

TEST(Green, GradientsMatchDifferences) {
  const BallGreen g(4, 1.0);
  const Point x{0.3, 0.1, -0.2, 0.4}, y{-0.1, 0.2, 0.3, 0.0};
  const Point gx = green_gradient(g, x, y), hx = regular_part_gradient(g, x, y);
  const Matrix m = green_mixed(g, x, y);
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Point a = x, b = x;
    a[i] += h;
    b[i] -= h;
    EXPECT_NEAR(gx[i], (green(g, a, y) - green(g, b, y)) / (2 * h), 1e-6 * std::abs(gx[i]) + 1e-8);
    EXPECT_NEAR(hx[i], (regular_part(g, a, y) - regular_part(g, b, y)) / (2 * h), 1e-6 * std::abs(hx[i]) + 1e-8);
    for (int j = 0; j < 4; ++j) {
      Point c = y, d = y;
      c[j] += h;
      d[j] -= h;
      const double fd = (green_gradient(g, x, c)[i] - green_gradient(g, x, d)[i]) / (2 * h);
      EXPECT_NEAR(m[i][j], fd, 1e-6 * std::abs(m[i][j]) + 1e-7);
    }
  }
}

TEST(SurfaceIdentities, CenterThreeDimensional) {
  const BallGreen g(3, 1.0);
  const auto rep = surface_identity_suite(g, Point(3, 0.0), 64);
  ASSERT_EQ(rep.checks.size(), 5u);
  EXPECT_EQ(rep.checks[0].name, "boundary_moment");
  EXPECT_NEAR(rep.checks[0].lhs[0], 1.0 / (4.0 * pi), 1e-12);
  for (double v : rep.checks[1].lhs) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_EQ(rep.checks[3].name, "local_scalar");
  EXPECT_NEAR(rep.checks[3].lhs[0], -0.5 / (4.0 * pi), 1e-12);
}

TEST(SurfaceIdentities, AllResidualsSmallAtOrder64) {
  for (int n : {3, 4}) {
    const BallGreen g(n, 1.0);
    for (double s : {0.0, 0.3, 0.6}) {
      Point y(n, 0.0);
      y[0] = s;
      if (n == 4) y[2] = 0.5 * s;
      const auto rep = surface_identity_suite(g, y, 64);
      for (const auto& c : rep.checks) {
        EXPECT_LT(c.rel_residual, 1e-6) << n << " " << s << " " << c.name;
        EXPECT_TRUE(c.converged) << c.name;
      }
    }
  }
}

TEST(SurfaceIdentities, DetectWrongNormalization) {
  const BallGreen bad(3, 1.0, 1.01);
  const auto rep = surface_identity_suite(bad, Point{0.3, 0.0, 0.0}, 64);
  EXPECT_GT(rep.max_rel_residual(), 1e-3);
}

TEST(SurfaceIdentities, RejectsLowOrder) {
  EXPECT_THROW(surface_identity_suite(BallGreen(3, 1.0), Point(3, 0.0), 8), DomainError);
}

TEST(Representation, ParabolaRecovered) {
  for (int n : {3, 4}) {
    const BallGreen g(n, 1.0);
    Point x(n, 0.0);
    x[0] = 0.3;
    const auto [lhs, rhs] = green_representation_check(g, x, 48);
    EXPECT_NEAR(lhs, rhs, 1e-8) << n;
  }
}
