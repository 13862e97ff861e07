#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "bnlab/bubbles.hpp"
#include "bnlab/constants.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/fit.hpp"
#include "bnlab/green_ball.hpp"
#include "bnlab/radial_solver.hpp"

namespace bnlab {

/// Residual gate applied to every swept solution.
inline constexpr double kResidualGate = 1e-6;

struct SweepRecord {
  double eps = 0.0;
  double eps_tilde = 0.0;
  double mu = 0.0;
  double R_tilde = 0.0;
  double S_eps = 0.0;
  double blowup_product = 0.0;
  double deficit = 0.0;
  double profile_dist = 0.0;
  double upper_bound_ratio = 0.0;
  double nehari_residual = 0.0;
  double pohozaev_residual = 0.0;

  double sobolev_quotient = 0.0;
  double boundary_deviation = 0.0;  ///< relative sup deviation from the Green limit
  bool ok = false;
  std::string error;
  std::shared_ptr<const RadialSolution> solution;
};

/// Log-uniform grid from hi down to lo (inclusive), strictly decreasing.
inline std::vector<double> log_grid_decreasing(double hi, double lo, int n) {
  if (n < 2 || !(hi > lo) || !(lo > 0.0)) throw DomainError("log grid: need hi > lo > 0, n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * i / (n - 1.0));
  g.front() = hi;
  g.back() = lo;
  return g;
}

/// sup over the grid of |v_eps(x) - U(x)|, with v_eps(x) = u~(x) (zero beyond R~).
inline double profile_distance(const Params& p, const RadialSolution& sol,
                               const std::vector<double>& grid) {
  double m = 0.0;
  for (double x : grid) {
    if (x < 0.0) throw DomainError("profile_distance: grid must be non-negative");
    const double v = x >= sol.R_tilde ? 0.0 : sol.shot->u(x);
    m = std::max(m, std::abs(v - normalized_radial(p.N, x)));
  }
  return m;
}

inline std::vector<double> default_profile_grid() {
  std::vector<double> g(512);
  for (int i = 0; i < 512; ++i) g[i] = 10.0 * i / 511.0;
  return g;
}

/// sup_x u(x) / bound(x) with bound(x) = C mu / (N(N-2) + mu^{2*-2}|x|^2)^{(N-2)/2} and
/// C = (N(N-2))^{(N-2)/2}, so that the ratio is u~(s)/U(s) and equals 1 at the maximum.
inline double upper_bound_check(const Params& p, const RadialSolution& sol) {
  double m = 0.0;
  for (const auto& ps : sol.shot->profile) {
    if (ps.r >= sol.R_tilde) continue;
    m = std::max(m, ps.u / normalized_radial(p.N, ps.r));
  }
  return m;
}

/// Relative sup deviation of mu u(r) from (1/N) alpha_N^{2*} omega_N G(r, 0) on
/// r in [0.7, 0.95], normalized by the sup of the limit over the band.
inline double boundary_green_deviation(const Params& p, const RadialSolution& sol,
                                       int points = 64) {
  const BallGreen g(p.N, 1.0);
  const double c = std::pow(alpha_n(p.N), p.two_star) * omega_n(p.N) / p.N;
  const Point origin(p.N, 0.0);
  double dev = 0.0, scale = 0.0;
  for (int i = 0; i < points; ++i) {
    const double r = 0.7 + 0.25 * i / (points - 1.0);
    Point x(p.N, 0.0);
    x[0] = r;
    const double lim = c * green(g, x, origin);
    dev = std::max(dev, std::abs(sol.mu * sol.u(r) - lim));
    scale = std::max(scale, std::abs(lim));
  }
  return dev / scale;
}

inline SweepRecord make_record(const Params& p, double et) {
  SweepRecord rec;
  rec.eps_tilde = et;
  try {
    const ShootResult s = shoot(p, et, kDefaultRMax, 1e-10);
    if (!s.first_zero) throw UnreachableError("no zero crossing");
    auto sol = std::make_shared<RadialSolution>(scale_to_unit_ball(p, s));
    rec.eps = sol->eps;
    rec.mu = sol->mu;
    rec.R_tilde = sol->R_tilde;
    rec.S_eps = sol->energy;
    rec.blowup_product = sol->blowup_product();
    rec.deficit = sol->deficit;
    rec.profile_dist = profile_distance(p, *sol, default_profile_grid());
    rec.upper_bound_ratio = upper_bound_check(p, *sol);
    rec.nehari_residual = sol->nehari_residual;
    rec.pohozaev_residual = sol->pohozaev_residual;
    rec.sobolev_quotient = sol->sobolev_quotient();
    rec.boundary_deviation = boundary_green_deviation(p, *sol);
    rec.solution = sol;
    rec.ok = rec.nehari_residual <= kResidualGate && rec.pohozaev_residual <= kResidualGate;
    if (!rec.ok) rec.error = "residual gate exceeded";
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads; results are written by index.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned t = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  for (unsigned k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

/// One record per grid point (in grid order). Failures are recorded, not thrown.
inline std::vector<SweepRecord> sweep(const Params& p, const std::vector<double>& grid,
                                      unsigned jobs = 1) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw DomainError("sweep: grid must be positive");
    if (i > 0 && !(grid[i] < grid[i - 1])) throw DomainError("sweep: grid must be decreasing");
  }
  std::vector<SweepRecord> out(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) { out[i] = make_record(p, grid[i]); });
  return out;
}

inline std::vector<const SweepRecord*> successful(const std::vector<SweepRecord>& recs) {
  std::vector<const SweepRecord*> v;
  for (const auto& r : recs)
    if (r.ok) v.push_back(&r);
  return v;
}

namespace detail {

/// Least squares for b = L + C eps^gamma at fixed gamma; returns (L, C, sse).
inline std::array<double, 3> power_tail_fit(const std::vector<double>& e,
                                            const std::vector<double>& b, double gamma) {
  std::vector<double> x(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) x[i] = std::pow(e[i], gamma);
  const LineFit f = fit_line(x, b);
  double sse = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double r = b[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  return {f.intercept, f.slope, sse};
}

/// Extrapolated limit with the correction exponent fitted on [0.05, 4].
inline std::array<double, 3> extrapolate(const std::vector<double>& e, const std::vector<double>& b) {
  auto sse = [&](double g) { return power_tail_fit(e, b, g)[2]; };
  std::uintmax_t it = 200;
  const auto best = boost::math::tools::brent_find_minima(sse, 0.05, 4.0, 40, it);
  const auto f = power_tail_fit(e, b, best.first);
  return {f[0], f[1], best.first};
}

}  // namespace detail

/// Extrapolates eps mu^{q+2-2*} (= eps_tilde R~^{N-2}) to eps -> 0 over the tail half of the
/// successful records, assuming a power-law correction with fitted exponent.
inline FitReport blowup_rate_fit(const Params& p, const std::vector<SweepRecord>& records) {
  const auto ok = successful(records);
  if (ok.size() < 6) throw FitError("blowup_rate_fit: need at least six successful records");
  const double span = std::log10(ok.front()->eps / ok.back()->eps);
  FitReport rep;
  if (span < 3.0) rep.warnings.push_back("records span fewer than three decades of eps");
  const std::size_t n = ok.size(), m = std::max<std::size_t>(6, n / 2);
  std::vector<double> e, b;
  for (std::size_t i = n - m; i < n; ++i) {
    e.push_back(ok[i]->eps);
    b.push_back(ok[i]->blowup_product);
  }
  const auto f = detail::extrapolate(e, b);
  std::vector<double> e2(e.begin(), e.end() - 1), b2(b.begin(), b.end() - 1);
  const auto f2 = detail::extrapolate(e2, b2);

  rep.limit_estimate = f[0];
  rep.prefactor = f[1];
  rep.slope_estimate = f[2];  // fitted correction exponent
  rep.points_used = m;
  rep.target = alpha_nq(p) * unit_ball_robin_center(p.N);
  rep.rel_error = std::abs(rep.limit_estimate - rep.target) / rep.target;
  rep.stable = std::abs(f2[0] - f[0]) <= 0.01 * std::abs(f[0]);
  if (!rep.stable) rep.warnings.push_back("extrapolated limit moves by more than 1% without the last point");
  const std::size_t k = std::min<std::size_t>(5, n);
  int sign = 0;
  for (std::size_t i = n - k + 1; i < n; ++i) {
    const double d = ok[i]->blowup_product - ok[i - 1]->blowup_product;
    const int s = (d > 0.0) - (d < 0.0);
    if (s != 0 && sign != 0 && s != sign) rep.monotone_tail = false;
    if (s != 0) sign = s;
  }
  if (!rep.monotone_tail) rep.warnings.push_back("oscillating tail");
  return rep;
}

/// Least-squares slope of log(deficit) against log(eps) over the tail half.
inline FitReport deficit_rate_fit(const Params& p, const std::vector<SweepRecord>& records) {
  const auto ok = successful(records);
  if (ok.size() < 6) throw FitError("deficit_rate_fit: need at least six successful records");
  FitReport rep;
  const std::size_t n = ok.size(), m = std::max<std::size_t>(6, n / 2);
  std::vector<double> x, y;
  for (std::size_t i = n - m; i < n; ++i) {
    if (!(ok[i]->deficit > 1e-13)) {
      rep.warnings.push_back("deficit below 1e-13 truncated from the tail");
      continue;
    }
    x.push_back(std::log(ok[i]->eps));
    y.push_back(std::log(ok[i]->deficit));
  }
  const LineFit f = fit_line(x, y);
  rep.slope_estimate = f.slope;
  rep.slope_target = (2.0 * p.N - 4.0) / ((p.N - 2.0) * p.q - 4.0);
  rep.prefactor = std::exp(f.intercept);
  rep.r_squared = f.r_squared;
  rep.points_used = x.size();
  rep.rel_error = std::abs(f.slope - rep.slope_target) / std::abs(rep.slope_target);
  return rep;
}

/// Per-record boundary deviations; limit_estimate is the final deviation and
/// slope_estimate its log-log decay rate in eps over the successful records.
inline FitReport boundary_green_limit(const Params&, const std::vector<SweepRecord>& records) {
  const auto ok = successful(records);
  if (ok.size() < 2) throw FitError("boundary_green_limit: need at least two successful records");
  FitReport rep;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    x.push_back(std::log(ok[i]->eps));
    y.push_back(std::log(ok[i]->boundary_deviation));
    if (i > 0 && !(ok[i]->boundary_deviation < ok[i - 1]->boundary_deviation))
      rep.monotone_tail = false;
  }
  const LineFit f = fit_line(x, y);
  rep.slope_estimate = f.slope;
  rep.r_squared = f.r_squared;
  rep.limit_estimate = ok.back()->boundary_deviation;
  rep.target = 0.0;
  rep.rel_error = ok.back()->boundary_deviation;
  rep.points_used = ok.size();
  return rep;
}

struct BranchPoint {
  double eps_tilde, R_tilde, mu, eps;
};

struct BranchMap {
  std::vector<BranchPoint> table;  ///< ordered by increasing mu
  bool monotone = true;            ///< eps strictly decreasing in mu
  bool has_fold = false;           ///< interior minimum of eps(mu)
  double eps0 = std::numeric_limits<double>::quiet_NaN();
  double mu_at_eps0 = std::numeric_limits<double>::quiet_NaN();
  double probe_eps = std::numeric_limits<double>::quiet_NaN();  ///< a level above eps0
  std::vector<double> probe_mus;                                ///< all mu with eps(mu) = probe_eps
};

/// Tabulates eps against mu along the grid; for a fold, refines eps0 and lists the mu
/// values attaining a level halfway between eps0 and the smaller end value.
inline BranchMap branch_map(const Params& p, const std::vector<double>& grid) {
  if (grid.size() < 3) throw DomainError("branch_map: need at least three grid points");
  auto point = [&](double et) {
    const ShootResult s = shoot(p, et, kDefaultRMax, 1e-10);
    if (!s.first_zero) throw UnreachableError("branch_map: no zero crossing");
    const double R = *s.first_zero;
    return BranchPoint{et, R, std::pow(R, 0.5 * (p.N - 2.0)),
                       et * std::pow(R, 0.5 * (2.0 * p.N - (p.N - 2.0) * p.q))};
  };
  BranchMap bm;
  for (double et : grid) bm.table.push_back(point(et));
  std::sort(bm.table.begin(), bm.table.end(),
            [](const BranchPoint& a, const BranchPoint& b) { return a.mu < b.mu; });
  const auto& t = bm.table;
  std::size_t imin = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i].eps < t[i - 1].eps)) bm.monotone = false;
    if (t[i].eps < t[imin].eps) imin = i;
  }
  bm.has_fold = imin > 0 && imin + 1 < t.size();
  if (!bm.has_fold) return bm;

  // refine the minimum in log eps_tilde between the neighbours
  const double a = std::log(std::min(t[imin - 1].eps_tilde, t[imin + 1].eps_tilde));
  const double b = std::log(std::max(t[imin - 1].eps_tilde, t[imin + 1].eps_tilde));
  std::uintmax_t it = 100;
  const auto best = boost::math::tools::brent_find_minima(
      [&](double x) { return point(std::exp(x)).eps; }, a, b, 30, it);
  const BranchPoint bp = point(std::exp(best.first));
  bm.eps0 = bp.eps;
  bm.mu_at_eps0 = bp.mu;

  bm.probe_eps = bm.eps0 + 0.5 * (std::min(t.front().eps, t.back().eps) - bm.eps0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double f0 = t[i].eps - bm.probe_eps, f1 = t[i + 1].eps - bm.probe_eps;
    if ((f0 <= 0.0) == (f1 <= 0.0)) continue;
    std::uintmax_t iters = 100;
    auto fx = [&](double x) { return point(std::exp(x)).eps - bm.probe_eps; };
    auto stop = [](double u, double v) { return std::abs(v - u) <= 1e-12; };
    double xa = std::log(t[i].eps_tilde), xb = std::log(t[i + 1].eps_tilde), fa = f0, fb = f1;
    if (xa > xb) {
      std::swap(xa, xb);
      std::swap(fa, fb);
    }
    const auto r = boost::math::tools::toms748_solve(fx, xa, xb, fa, fb, stop, iters);
    bm.probe_mus.push_back(point(std::exp(0.5 * (r.first + r.second))).mu);
  }
  return bm;
}

}  // namespace bnlab
