#include <gtest/gtest.h>

#include <cmath>

#include "bnlab/asymptotics.hpp"
#include "bnlab/decomposition.hpp"

using namespace bnlab;

TEST(H1Norm, ZeroAndHomogeneity) {
  const Params p(4, 3.0);
  std::vector<double> r, z, d;
  for (int i = 0; i <= 2000; ++i) {
    const double x = std::pow(i / 2000.0, 2.0);
    r.push_back(x);
    z.push_back(0.0);
    d.push_back(bubble_radial_slope(4, 5.0, x));
  }
  EXPECT_EQ(h1_norm_radial(p, r, z), 0.0);
  std::vector<double> d3 = d;
  for (double& v : d3) v *= 3.0;
  EXPECT_NEAR(h1_norm_radial(p, r, d3), 3.0 * h1_norm_radial(p, r, d), 1e-12);
  auto f = [](double x) { return bubble_radial_slope(4, 5.0, x); };
  EXPECT_NEAR(h1_norm_radial(p, f, 1.0, 0.2), h1_norm_radial(p, r, d), 1e-6);
}

TEST(H1Norm, MatchesEnergyBookkeeping) {
  for (int n : {4, 5}) {
    const Params p(n, 3.0);
    for (double et : {1e-2, 1e-5}) {
      const auto sol = scale_to_unit_ball(p, shoot(p, et, kDefaultRMax));
      std::vector<double> r, du;
      for (const auto& s : sol.profile) {
        r.push_back(s.r);
        du.push_back(s.du);
      }
      const double a = h1_norm_radial(p, r, du);
      const double b = h1_norm_radial(p, [&](double x) { return sol.du(x); }, 1.0,
                                      std::sqrt(n * (n - 2.0)) / sol.R_tilde);
      EXPECT_NEAR(b * b / sol.grad_sq, 1.0, 1e-8) << n << " " << et;
      EXPECT_NEAR(a * a / sol.grad_sq, 1.0, 1e-6) << n << " " << et;
    }
  }
}

TEST(Decomposition, FitConditions) {
  for (int n : {4, 5}) {
    const Params p(n, 3.0);
    const auto sol = scale_to_unit_ball(p, shoot(p, 1e-6, kDefaultRMax));
    const auto d = fit_decomposition(p, sol);
    EXPECT_LE(d.ortho_residuals[0], 1e-6);
    EXPECT_LE(d.ortho_residuals[1], 1e-6);
    EXPECT_LE(d.pythagoras_residual, 1e-8);
    EXPECT_NEAR(d.alpha / alpha_n(n), 1.0, 1e-2);
    const double scale = std::pow(sol.mu, 2.0 / (n - 2));
    EXPECT_GT(d.lambda / scale, 0.1);
    EXPECT_LT(d.lambda / scale, 10.0);
    EXPECT_NEAR(d.lambda_ratio, 1.0 / std::sqrt(n * (n - 2.0)), 0.05);
  }
}

TEST(Decomposition, OrderTargets) {
  EXPECT_EQ(perturbation_order_target(Params(5, 3.0)), -3.0);
  EXPECT_EQ(perturbation_order_target(Params(4, 3.0)), -2.0);
}

TEST(Decomposition, PerturbationDecaysAtTableRate) {
  for (int n : {4, 5}) {
    const Params p(n, 3.0);
    std::vector<DecompositionResult> fits;
    for (double et : log_grid_decreasing(1e-2, 1e-8, 13))
      fits.push_back(fit_decomposition(p, scale_to_unit_ball(p, shoot(p, et, kDefaultRMax))));
    const auto rep = perturbation_order_fit(p, fits);
    EXPECT_LE(rep.slope_estimate, rep.slope_target + 0.3) << n;
    EXPECT_LT(rep.rel_error, 1e-2) << n;
  }
}
