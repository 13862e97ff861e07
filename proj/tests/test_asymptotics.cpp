#include <gtest/gtest.h>

#include <cmath>

#include "bnlab/asymptotics.hpp"

using namespace bnlab;

namespace {

const std::vector<SweepRecord>& four_three() {
  static const auto recs = sweep(Params(4, 3.0), log_grid_decreasing(1e-2, 1e-8, 25), 1);
  return recs;
}

}  // namespace

TEST(Grid, LogDecreasing) {
  const auto g = log_grid_decreasing(1e-2, 1e-8, 25);
  ASSERT_EQ(g.size(), 25u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-2);
  EXPECT_DOUBLE_EQ(g.back(), 1e-8);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i], g[i - 1]);
  EXPECT_THROW(log_grid_decreasing(1e-8, 1e-2, 5), DomainError);
}

TEST(Sweep, EnergyDecreasingMuIncreasingProfileConverging) {
  const auto& recs = four_three();
  ASSERT_EQ(successful(recs).size(), recs.size());
  for (std::size_t i = 1; i < recs.size(); ++i) {
    // eps decreases along the sweep, so S_eps must increase
    EXPECT_LT(recs[i].eps, recs[i - 1].eps);
    EXPECT_GT(recs[i].S_eps, recs[i - 1].S_eps);
    EXPECT_GT(recs[i].mu, recs[i - 1].mu);
    EXPECT_LT(recs[i].profile_dist, recs[i - 1].profile_dist);
  }
}

TEST(Sweep, UpperBoundRatio) {
  for (const auto& r : four_three()) {
    EXPECT_GE(r.upper_bound_ratio, 1.0);
    EXPECT_LE(r.upper_bound_ratio, 1.5);
  }
  const auto sol = scale_to_unit_ball(Params(4, 3.0), shoot(Params(4, 3.0), 1e-3, kDefaultRMax));
  EXPECT_EQ(sol.shot->profile.front().u / normalized_radial(4, 0.0), 1.0);
}

TEST(BlowupRate, FourThreeTarget) {
  const auto rep = blowup_rate_fit(Params(4, 3.0), four_three());
  EXPECT_NEAR(rep.target, 24.0, 1e-10);
  EXPECT_LE(rep.rel_error, 0.05);
  EXPECT_TRUE(rep.stable);
  for (const auto& r : four_three()) EXPECT_NEAR(r.blowup_product, r.eps_tilde * std::pow(r.R_tilde, 2.0), 1e-12 * r.blowup_product);
}

TEST(BlowupRate, TargetsPositive) {
  for (int n = 3; n <= 7; ++n) {
    const Params p0(n, 3.0);
    const double q = 0.5 * (p0.lower_q() + p0.two_star);
    EXPECT_GT(alpha_nq(Params(n, q)) * unit_ball_robin_center(n), 0.0);
  }
}

TEST(DeficitRate, Targets) {
  const auto rep = deficit_rate_fit(Params(4, 3.0), four_three());
  EXPECT_DOUBLE_EQ(rep.slope_target, 2.0);
  EXPECT_LE(rep.rel_error, 0.1);
  std::vector<SweepRecord> fake(6);
  for (std::size_t i = 0; i < fake.size(); ++i) {
    fake[i].ok = true;
    fake[i].eps = std::pow(10.0, -double(i));
    fake[i].deficit = std::pow(fake[i].eps, 1.2);
  }
  EXPECT_NEAR(deficit_rate_fit(Params(5, 3.0), fake).slope_target, 1.2, 1e-15);
  EXPECT_NEAR(deficit_rate_fit(Params(5, 3.0), fake).slope_estimate, 1.2, 1e-12);
}

TEST(ProfileDistance, BubbleAndOrdering) {
  const Params p(4, 3.0);
  const auto bubble = shoot(p, 0.0, 100.0);
  for (double x : default_profile_grid()) EXPECT_EQ(bubble.u(x), normalized_radial(4, x));
  const auto a = scale_to_unit_ball(p, shoot(p, 1e-2, kDefaultRMax));
  const auto b = scale_to_unit_ball(p, shoot(p, 1e-4, kDefaultRMax));
  EXPECT_GT(profile_distance(p, a, default_profile_grid()), profile_distance(p, b, default_profile_grid()));
  EXPECT_EQ(default_profile_grid().size(), 512u);
  EXPECT_DOUBLE_EQ(default_profile_grid().back(), 10.0);
}

TEST(BoundaryLimit, DecreasingAndSmall) {
  const auto rep = boundary_green_limit(Params(4, 3.0), four_three());
  EXPECT_TRUE(rep.monotone_tail);
  EXPECT_LE(rep.limit_estimate, 5e-2);
}

TEST(BoundaryLimit, ThreeDimensionalLimitFunction) {
  // (1/3) alpha_3^6 4 pi (1/(4 pi)) (1/r - 1)
  const Params p(3, 5.0);
  const auto sol = scale_to_unit_ball(p, shoot(p, 1e-9, kDefaultRMax));
  for (double r : {0.7, 0.8, 0.9}) {
    const double lim = std::pow(3.0, 1.5) / 3.0 * (1.0 / r - 1.0);
    EXPECT_NEAR(sol.mu * sol.u(r) / lim, 1.0, 2e-2) << r;
  }
  EXPECT_LT(boundary_green_deviation(p, sol), 2e-2);
}

TEST(Branch, ThreeThreeHasFold) {
  const auto bm = branch_map(Params(3, 3.0), log_grid_decreasing(1e2, 1e-10, 41));
  EXPECT_TRUE(bm.has_fold);
  EXPECT_GT(bm.eps0, 0.0);
  EXPECT_EQ(bm.probe_mus.size(), 2u);
  EXPECT_GT(bm.probe_eps, bm.eps0);
}

TEST(Branch, FourThreeMonotoneAndVanishing) {
  const auto bm = branch_map(Params(4, 3.0), log_grid_decreasing(1e2, 1e-10, 25));
  EXPECT_TRUE(bm.monotone);
  EXPECT_FALSE(bm.has_fold);
  EXPECT_LT(bm.table.back().eps, 1e-4);
  EXPECT_GT(bm.table.back().mu, bm.table.front().mu);
}
