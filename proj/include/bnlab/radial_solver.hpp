#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "bnlab/bubbles.hpp"
#include "bnlab/constants.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/ode.hpp"
#include "bnlab/quadrature.hpp"
#include "bnlab/spline.hpp"

namespace bnlab {

struct ProfileSample {
  double r, u, du;
};

struct ShootOptions {
  double rtol = 1e-11;
  double atol = 1e-11;
  double s0 = 1e-4;  ///< series start radius
};

/// Height-normalized shot: u~(0) = 1, u~'(0) = 0 for
///   u~'' + (N-1)/s u~' + u~^{2*-1} + eps_tilde u~^{q-1} = 0.
/// Internally the deviation d = u~ - U from the normalized bubble is integrated
/// (in units of eps_tilde), together with the running integrals
///   y2 = int (U'^2 - u~'^2) s^{N-1} / eps_tilde
///   y3 = int (U^{2*} - |u~|^{2*}) s^{N-1} / eps_tilde
///   y4 = int |u~|^q s^{N-1}.
/// This keeps the energy bookkeeping accurate when u~ is within 1e-8 of U.
struct ShootResult {
  int N = 4;
  double q = 3.0;
  double eps_tilde = 0.0;
  std::optional<double> first_zero;
  std::vector<ProfileSample> profile;  ///< (s, u~, u~') samples on [0, R~]

  std::shared_ptr<const DenseSolution<5>> dense;
  double s0 = 0.0;
  double series_c4 = 0.0;  ///< d/eps_tilde = -s^2/(2N) + series_c4 s^4 near 0
  State<5> at_zero{};      ///< scaled state at R~
  std::size_t steps = 0;

  /// d(s)/eps_tilde and its derivative.
  std::pair<double, double> scaled_deviation(double s) const {
    if (!dense || s <= s0) {
      if (!dense) return {0.0, 0.0};
      return {-s * s / (2.0 * N) + series_c4 * s * s * s * s,
              -s / N + 4.0 * series_c4 * s * s * s};
    }
    const State<5> y = dense->at(std::min(s, dense->t_end()));
    return {y[0], y[1]};
  }
  double deviation(double s) const { return eps_tilde * scaled_deviation(s).first; }
  double deviation_slope(double s) const { return eps_tilde * scaled_deviation(s).second; }
  double u(double s) const { return normalized_radial(N, s) + deviation(s); }
  double du(double s) const { return normalized_radial_slope(N, s) + deviation_slope(s); }
};

namespace detail {

inline double signed_pow(double x, double e) {
  return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

}  // namespace detail

/// Integrates the height-normalized problem outward until u~ first vanishes or s reaches
/// r_max. |u~(R~)| <= tol is enforced after the root polish.
inline ShootResult shoot(const Params& p, double eps_tilde, double r_max, double tol = 1e-10,
                         const ShootOptions& opt = {}) {
  if (!(eps_tilde >= 0.0)) throw DomainError("shoot: eps_tilde must be non-negative");
  if (!(r_max > 0.0)) throw DomainError("shoot: r_max must be positive");
  const int N = p.N;
  const double q = p.q, ts = p.two_star, pe = p.p();
  ShootResult res;
  res.N = N;
  res.q = q;
  res.eps_tilde = eps_tilde;

  if (eps_tilde == 0.0) {
    // exactly the normalized bubble: positive for every s
    res.profile.push_back({0.0, 1.0, 0.0});
    for (double s = 1e-3; s < r_max; s *= 1.05)
      res.profile.push_back({s, normalized_radial(N, s), normalized_radial_slope(N, s)});
    res.profile.push_back({r_max, normalized_radial(N, r_max), normalized_radial_slope(N, r_max)});
    return res;
  }

  const double et = eps_tilde;
  const double s0 = std::min(opt.s0, 0.5 * r_max);
  const double c4 = (pe + (q - 1.0) * (1.0 + et)) / (8.0 * N * (N + 2.0));
  res.s0 = s0;
  res.series_c4 = c4;

  auto rhs = [&](double s, const State<5>& y, State<5>& dy) {
    const double U = normalized_radial(N, s), Up = normalized_radial_slope(N, s);
    const double d = et * y[0], dp = et * y[1];
    const double ut = U + d;
    const double sn1 = std::pow(s, N - 1);
    double diff_p, diff_ts;
    if (ut > 0.0 && d > -0.5 * U) {
      const double l = std::log1p(d / U);
      diff_p = std::pow(U, pe) * std::expm1(pe * l) / et;
      diff_ts = std::pow(U, ts) * std::expm1(ts * l) / et;
    } else {
      diff_p = (detail::signed_pow(ut, pe) - std::pow(U, pe)) / et;
      diff_ts = (std::pow(std::abs(ut), ts) - std::pow(U, ts)) / et;
    }
    dy[0] = y[1];
    dy[1] = -(N - 1.0) / s * y[1] - diff_p - detail::signed_pow(ut, q - 1.0);
    dy[2] = -y[1] * (2.0 * Up + dp) * sn1;
    dy[3] = -diff_ts * sn1;
    dy[4] = std::pow(std::abs(ut), q) * sn1;
  };
  auto event = [&](double s, const State<5>& y) { return normalized_radial(N, s) + et * y[0]; };

  State<5> y0;
  y0[0] = -s0 * s0 / (2.0 * N) + c4 * std::pow(s0, 4);
  y0[1] = -s0 / N + 4.0 * c4 * std::pow(s0, 3);
  y0[2] = -(2.0 + et) * std::pow(s0, N + 2) / (N * N * (N + 2.0));
  y0[3] = ts * std::pow(s0, N + 2) / (2.0 * N * (N + 2.0));
  y0[4] = std::pow(s0, N) / N;

  OdeOptions<5> oo;
  oo.rtol = opt.rtol;
  oo.atol.fill(opt.atol);
  oo.h_init = 0.1 * s0;
  auto out = dopri5<5>(rhs, s0, y0, r_max, oo, event);
  res.steps = out.steps;
  res.dense = std::make_shared<DenseSolution<5>>(std::move(out.solution));

  res.profile.reserve(res.dense->segments.size() + 2);
  res.profile.push_back({0.0, 1.0, 0.0});
  for (const auto& seg : res.dense->segments) {
    const double s = seg.t0;
    if (out.event && s >= out.t_event) break;
    res.profile.push_back({s, res.u(s), res.du(s)});
  }
  if (out.event) {
    const double R = out.t_event;
    const double uz = normalized_radial(N, R) + et * out.y_event[0];
    if (!(std::abs(uz) <= tol))
      throw IntegrationError("shoot: zero not resolved to the requested tolerance");
    res.first_zero = R;
    res.at_zero = out.y_event;
    res.profile.push_back({R, 0.0, normalized_radial_slope(N, R) + et * out.y_event[1]});
  } else {
    const double s = res.dense->t_end();
    res.profile.push_back({s, res.u(s), res.du(s)});
  }
  return res;
}

/// Tails int_R^inf U'^2 s^{N-1} ds and int_R^inf U^{2*} s^{N-1} ds of the normalized bubble,
/// via s = R/t on (0, 1].
inline std::pair<double, double> normalized_bubble_tails(int N, double R) {
  static const GaussRule g = gauss_legendre(32);
  const double ts = 2.0 * N / (N - 2.0);
  const std::vector<double> br{0.0, 0.125, 0.25, 0.5, 1.0};
  auto tg = integrate_panels(g, br, [&](double t) {
    const double s = R / t, d = normalized_radial_slope(N, s);
    return d * d * std::pow(s, N - 1) * s * s / R;
  });
  auto tp = integrate_panels(g, br, [&](double t) {
    const double s = R / t;
    return std::pow(normalized_radial(N, s), ts) * std::pow(s, N - 1) * s * s / R;
  });
  return {tg, tp};
}

/// Positive radial solution on the unit ball and its integral diagnostics.
struct RadialSolution {
  int N = 4;
  double q = 3.0;
  double eps = 0.0;
  double mu = 0.0;
  double eps_tilde = 0.0;
  double R_tilde = 0.0;
  std::vector<ProfileSample> profile;  ///< (r, u, u') on [0, 1]

  double energy = 0.0;       ///< S_eps = I_eps(u)
  double grad_sq = 0.0;      ///< int |grad u|^2
  double lq_norm_q = 0.0;    ///< int u^q
  double l2star_norm = 0.0;  ///< int u^{2*}
  double nehari_residual = 0.0;
  double pohozaev_residual = 0.0;

  double grad_deficit = 0.0;   ///< S^{N/2} - int |grad u|^2
  double lstar_deficit = 0.0;  ///< S^{N/2} - int u^{2*}
  double deficit = 0.0;        ///< S^{N/2}/N - S_eps
  double du_boundary = 0.0;    ///< u'(1)

  std::shared_ptr<const ShootResult> shot;

  double blowup_product() const { return eps_tilde * std::pow(R_tilde, N - 2.0); }
  double sobolev_quotient() const {
    return grad_sq / std::pow(l2star_norm, (N - 2.0) / N);
  }
  /// u(r) and u'(r) from the dense solution; zero outside the ball.
  double u(double r) const {
    if (r >= 1.0) return 0.0;
    return mu * shot->u(R_tilde * r);
  }
  double du(double r) const {
    return std::pow(R_tilde, 0.5 * N) * shot->du(R_tilde * std::min(r, 1.0));
  }
};

/// Fills grad_sq, l2star_norm, lq_norm_q, energy, deficits and the Nehari residual
/// from the running integrals of the shot plus the analytic bubble tails beyond R~.
inline RadialSolution energy_functionals(const Params& p, RadialSolution sol) {
  if (!sol.shot || !sol.shot->first_zero) throw DomainError("energy_functionals: no profile");
  const int N = p.N;
  const double wN = omega_n(N), A = sobolev_sn2(N), q = p.q, ts = p.two_star;
  const double Rt = sol.R_tilde, et = sol.eps_tilde;
  const auto [tg, tp] = normalized_bubble_tails(N, Rt);
  const State<5>& z = sol.shot->at_zero;
  sol.grad_deficit = wN * (et * z[2] + tg);
  sol.lstar_deficit = wN * (et * z[3] + tp);
  sol.grad_sq = A - sol.grad_deficit;
  sol.l2star_norm = A - sol.lstar_deficit;
  sol.lq_norm_q = wN * z[4] * std::pow(Rt, 0.5 * (N - 2.0) * q - N);
  const double eQ = sol.eps * sol.lq_norm_q;
  sol.energy = 0.5 * sol.grad_sq - sol.l2star_norm / ts - eQ / q;
  sol.deficit = 0.5 * sol.grad_deficit - sol.lstar_deficit / ts + eQ / q;
  sol.nehari_residual =
      std::abs(sol.lstar_deficit - sol.grad_deficit - eQ) / sol.grad_sq;
  return sol;
}

/// Relative residual of (omega_N/(2N)) u'(1)^2 = (1/q - 1/2*) eps int u^q.
inline double pohozaev_residual(const Params& p, const RadialSolution& sol) {
  const double lhs = omega_n(p.N) / (2.0 * p.N) * sol.du_boundary * sol.du_boundary;
  const double rhs = (1.0 / p.q - 1.0 / p.two_star) * sol.eps * sol.lq_norm_q;
  return std::abs(lhs - rhs) / std::abs(rhs);
}

inline RadialSolution scale_to_unit_ball(const Params& p, const ShootResult& s) {
  if (!s.first_zero) throw DomainError("scale_to_unit_ball: shot has no zero");
  const int N = p.N;
  const double Rt = *s.first_zero;
  RadialSolution sol;
  sol.N = N;
  sol.q = p.q;
  sol.eps_tilde = s.eps_tilde;
  sol.R_tilde = Rt;
  sol.eps = s.eps_tilde * std::pow(Rt, 0.5 * (2.0 * N - (N - 2.0) * p.q));
  sol.mu = std::pow(Rt, 0.5 * (N - 2.0));
  const double dscale = std::pow(Rt, 0.5 * N);
  sol.profile.reserve(s.profile.size());
  for (const auto& ps : s.profile)
    sol.profile.push_back({ps.r / Rt, sol.mu * ps.u, dscale * ps.du});
  sol.profile.back().r = 1.0;
  sol.du_boundary = sol.profile.back().du;
  sol.shot = std::make_shared<ShootResult>(s);
  sol = energy_functionals(p, std::move(sol));
  sol.pohozaev_residual = pohozaev_residual(p, sol);
  return sol;
}

inline constexpr double kDefaultRMax = 1e15;

/// eps as a function of eps_tilde (shoot + rescale), without the diagnostics.
inline double eps_of_eps_tilde(const Params& p, double et, const ShootOptions& opt) {
  const ShootResult s = shoot(p, et, kDefaultRMax, 1e-8, opt);
  if (!s.first_zero) throw UnreachableError("no zero crossing for this eps_tilde");
  return et * std::pow(*s.first_zero, 0.5 * (2.0 * p.N - (p.N - 2.0) * p.q));
}

/// Finds eps_tilde with |eps(eps_tilde) - eps_target| <= tol eps_target on the branch
/// reached first when eps_tilde increases from 1e-14 (the large-R~ branch).
inline RadialSolution solve_for_eps(const Params& p, double eps_target, double tol = 1e-10,
                                    const ShootOptions& opt = {}) {
  if (!(eps_target > 0.0)) throw DomainError("solve_for_eps: eps_target must be positive");
  const double lo = std::log(1e-14), hi = std::log(1e2);
  const int n = 49;
  ShootOptions coarse = opt;
  coarse.rtol = std::max(opt.rtol, 1e-8);
  coarse.atol = std::max(opt.atol, 1e-8);
  const double lt = std::log(eps_target);
  double xa = 0.0, xb = 0.0, fa = 0.0, fb = 0.0;
  bool found = false;
  double prev_x = lo, prev_f = std::log(eps_of_eps_tilde(p, std::exp(lo), coarse)) - lt;
  for (int i = 1; i < n && !found; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double f = std::log(eps_of_eps_tilde(p, std::exp(x), coarse)) - lt;
    if ((prev_f <= 0.0) != (f <= 0.0)) {
      xa = prev_x;
      xb = x;
      found = true;
    }
    prev_x = x;
    prev_f = f;
  }
  if (!found)
    throw UnreachableError("eps target not reached for eps_tilde in [1e-14, 1e2]");

  auto F = [&](double x) { return std::log(eps_of_eps_tilde(p, std::exp(x), opt)) - lt; };
  fa = F(xa);
  fb = F(xb);
  if ((fa <= 0.0) == (fb <= 0.0))
    throw UnreachableError("eps target only grazes the branch; no clean bracket");
  std::uintmax_t iters = 200;
  auto stop = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
  const auto br = boost::math::tools::toms748_solve(F, xa, xb, fa, fb, stop, iters);
  const double x = std::abs(F(br.first)) < std::abs(F(br.second)) ? br.first : br.second;
  const ShootResult s = shoot(p, std::exp(x), kDefaultRMax, 1e-10, opt);
  if (!s.first_zero) throw UnreachableError("no zero crossing at the solved eps_tilde");
  RadialSolution sol = scale_to_unit_ball(p, s);
  if (std::abs(sol.eps - eps_target) > tol * eps_target)
    throw FitError("solve_for_eps: tolerance not met");
  return sol;
}

/// (1/2 - 1/q) int |grad u|^2 + (1/q - 1/2*) int u^{2*}, equal to S_eps on the Nehari manifold.
inline double nehari_energy(const Params& p, const RadialSolution& sol) {
  return (0.5 - 1.0 / p.q) * sol.grad_sq + (1.0 / p.q - 1.0 / p.two_star) * sol.l2star_norm;
}

/// omega_N int_0^{r_end} f(r) r^{N-1} dr from samples, by a natural cubic spline of the
/// integrand integrated exactly piece by piece (Simpson on each cubic).
inline double radial_integral_samples(int N, const std::vector<double>& r,
                                      const std::vector<double>& f) {
  std::vector<double> g(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) g[i] = f[i] * std::pow(r[i], N - 1);
  return omega_n(N) * CubicSpline(r, g).integral();
}

}  // namespace bnlab
