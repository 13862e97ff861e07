#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "bnlab/linearization.hpp"

using namespace bnlab;
constexpr double pi = std::numbers::pi;

namespace {

std::shared_ptr<const RadialSolution> solution(const Params& p, double et) {
  return std::make_shared<RadialSolution>(scale_to_unit_ball(p, shoot(p, et, kDefaultRMax)));
}

}  // namespace

TEST(Tridiagonal, SturmMatchesClosedForm) {
  const int n = 300;
  std::vector<double> a(n, 2.0), b(n - 1, -1.0);
  const auto ev = tridiagonal_smallest(a, b, 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev[k], 2.0 - 2.0 * std::cos((k + 1) * pi / (n + 1)), 1e-13);
  EXPECT_EQ(sturm_count(a, b, 0.0), 0);
  EXPECT_EQ(sturm_count(a, b, 4.1), n);
}

TEST(ModeOperator, PotentialAndCentrifugalTerm) {
  const Params p(5, 3.0);
  const auto sol = solution(p, 1e-3);
  const double mu = sol->mu;
  EXPECT_NEAR(detail::potential_at(p, *sol, 0.0),
              p.p() * std::pow(mu, p.two_star - 2.0) + sol->eps * (p.q - 1.0) * std::pow(mu, p.q - 2.0),
              1e-12 * std::pow(mu, p.two_star - 2.0));
  const auto op0 = build_mode_operator(p, sol, 0, 512);
  const auto op1 = build_mode_operator(p, sol, 1, 512);
  for (int i = 0; i < 512; ++i) EXPECT_GE(op0.potential[i], 0.0);
  // interior rows differ by exactly l(l+N-2)/r^2 = (N-1)/r^2
  for (int i = 1; i < 512; i += 37) {
    const double r = op0.grid[i];
    EXPECT_NEAR(op1.diag[i] - op0.diag[i], (p.N - 1.0) / (r * r), 1e-9 * op1.diag[i]);
  }
  for (double b : op0.offdiag) EXPECT_LT(b, 0.0);
  EXPECT_EQ(op0.offdiag.size(), 511u);
}

TEST(ModeOperator, RejectsBadInput) {
  const Params p(5, 3.0);
  const auto sol = solution(p, 1e-2);
  EXPECT_THROW(build_mode_operator(p, sol, -1, 512), DomainError);
  EXPECT_THROW(build_mode_operator(p, sol, 0, 100), DomainError);
  EXPECT_THROW(spectrum(p, build_mode_operator(p, sol, 0, 256), 1), DomainError);
  EXPECT_THROW(nondegeneracy_certificate(p, sol, 1), DomainError);
}

TEST(ModeOperator, LaplacianEigenvaluesAreBesselZeros) {
  // with the potential removed the operator is -Delta on the ball: j_{l+N/2-1,k}^2
  const Params p(3, 5.0);
  const auto sol = solution(p, 1e-3);
  for (int ell : {0, 1}) {
    auto op = build_mode_operator(p, sol, ell, 4096);
    for (int i = 0; i < op.n_grid; ++i) op.diag[i] += op.potential[i];
    const auto ev = tridiagonal_smallest(op.diag, op.offdiag, 2);
    if (ell == 0) {
      EXPECT_NEAR(ev[0], pi * pi, 1e-4 * pi * pi);
      EXPECT_NEAR(ev[1], 4 * pi * pi, 1e-4 * 4 * pi * pi);
    } else {
      const double j = 4.493409457909064;  // first positive root of tan x = x
      EXPECT_NEAR(ev[0], j * j, 1e-4 * j * j);
    }
  }
}

TEST(Spectrum, ModeStructureFiveThree) {
  const Params p(5, 3.0);
  const auto sol = solution(p, 1e-3);
  std::vector<SpectrumReport> reps;
  for (int l = 0; l <= 3; ++l) reps.push_back(spectrum(p, build_mode_operator(p, sol, l, 2048), 3));
  EXPECT_LT(reps[0].eigenvalues[0], 0.0);
  EXPECT_GT(reps[1].eigenvalues[0], 0.0);
  EXPECT_GT(reps[2].eigenvalues[0], 10.0);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.fd_converged) << r.ell;
    EXPECT_TRUE(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(r.eigenvalues[j], r.fd_doubled[j], 1e-3 * std::max(1.0, std::abs(r.eigenvalues[j])) + 0.2);
  }
  for (int j = 0; j < 3; ++j)
    for (int l = 1; l <= 3; ++l) EXPECT_GT(reps[l].eigenvalues[j], reps[l - 1].eigenvalues[j]);
}

TEST(Spectrum, TranslationModeApproachesZero) {
  const Params p(5, 3.0);
  double prev = 1e300;
  for (double et : {1e-2, 1e-3, 1e-4}) {
    const auto r = spectrum(p, build_mode_operator(p, solution(p, et), 1, 2048), 2);
    EXPECT_TRUE(r.resolved);
    EXPECT_GT(r.eigenvalues[0], 0.0);
    EXPECT_LT(r.min_abs, prev);
    prev = r.min_abs;
  }
}

TEST(Spectrum, ShootingRefinementIsConsistentWithGridLimit) {
  // second order: Richardson extrapolation of the grid values lands on the refined value
  const Params p(4, 3.0);
  const auto sol = solution(p, 1e-2);
  const auto op = build_mode_operator(p, sol, 2, 1024);
  const auto r = spectrum(p, op, 2);
  const double rich = (4.0 * r.fd_doubled[0] - r.fd_eigenvalues[0]) / 3.0;
  EXPECT_NEAR(r.eigenvalues[0], rich, 1e-5 * std::abs(rich));
}

TEST(Certificate, FiveThreeModerateEps) {
  const Params p(5, 3.0);
  const auto c = nondegeneracy_certificate(p, solution(p, 1e-2), 4);
  EXPECT_TRUE(c.nondegenerate);
  EXPECT_TRUE(c.monotone_in_ell);
  ASSERT_EQ(c.modes.size(), 5u);
  for (int l = 3; l <= 4; ++l) EXPECT_GT(c.modes[l].min_abs, c.modes[l - 1].min_abs);
}

TEST(Certificate, DegenerateSyntheticPotential) {
  // shift the potential until the second l = 0 eigenvalue crosses zero
  const Params p(5, 3.0);
  const auto sol = solution(p, 1e-2);
  auto shifted = [&](double c) { return refine_eigenvalue(p, *sol, 0, 1, 0.0, c); };
  double lo = -50.0, hi = 50.0;
  ASSERT_GT(shifted(lo), 0.0);
  ASSERT_LT(shifted(hi), 0.0);
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (lo + hi);
    (shifted(m) > 0.0 ? lo : hi) = m;
  }
  const auto c = nondegeneracy_certificate(p, sol, 2, 1e-3, 2048, 3, 0.5 * (lo + hi));
  EXPECT_FALSE(c.nondegenerate);
  EXPECT_LT(c.modes[0].min_abs, 1e-6);
}
