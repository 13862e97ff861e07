#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "bnlab/errors.hpp"

namespace bnlab {

template <std::size_t M>
using State = std::array<double, M>;

/// One accepted step with the Dormand-Prince continuous extension (order 4).
template <std::size_t M>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State<M>, 5> rc{};

  State<M> eval(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    State<M> y;
    for (std::size_t i = 0; i < M; ++i)
      y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    return y;
  }
};

/// Piecewise dense output of an integration, valid on [t_begin(), t_end()].
template <std::size_t M>
struct DenseSolution {
  std::vector<DenseSegment<M>> segments;
  double t_last = 0.0;  ///< may stop inside the last segment (event)

  bool empty() const { return segments.empty(); }
  double t_begin() const { return segments.front().t0; }
  double t_end() const { return t_last; }

  const DenseSegment<M>& locate(double t) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const DenseSegment<M>& s) { return v < s.t0; });
    if (it != segments.begin()) --it;
    return *it;
  }
  State<M> at(double t) const { return locate(t).eval(t); }
};

template <std::size_t M>
struct OdeOptions {
  double rtol = 1e-11;
  State<M> atol = [] {
    State<M> a;
    a.fill(1e-11);
    return a;
  }();
  double h_init = 0.0;            ///< 0 selects h = 1e-3 * |t0| or 1e-6
  double h_min_rel = 1e-13;       ///< step underflow threshold relative to max(|t|, 1)
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
};

template <std::size_t M>
struct OdeResult {
  DenseSolution<M> solution;
  bool event = false;
  double t_event = 0.0;
  State<M> y_event{};
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

struct NoEvent {
  template <std::size_t M>
  double operator()(double, const State<M>&) const {
    return 1.0;
  }
};

/// Dormand-Prince 5(4) with per-component tolerances and dense output. Integration
/// stops at t_end or at the first step over which `event` changes sign from positive
/// to non-positive; the crossing is then polished on the dense output.
template <std::size_t M, class F, class E = NoEvent>
OdeResult<M> dopri5(F&& f, double t0, const State<M>& y0, double t_end, const OdeOptions<M>& opt,
                    E&& event = E{}) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  OdeResult<M> res;
  double t = t0;
  State<M> y = y0, k1, k2, k3, k4, k5, k6, k7, yt, ynew;
  f(t, y, k1);
  double h = opt.h_init > 0.0 ? opt.h_init : (t0 != 0.0 ? 1e-3 * std::abs(t0) : 1e-6);
  double g_prev = event(t, y);
  bool last_rejected = false;

  auto finite = [](const State<M>& v) {
    for (double e : v)
      if (!std::isfinite(e)) return false;
    return true;
  };

  while (t < t_end) {
    if (res.steps + res.rejected > opt.max_steps)
      throw IntegrationError("dopri5: maximum number of steps exceeded");
    h = std::min({h, opt.h_max, t_end - t});
    if (h < opt.h_min_rel * std::max(std::abs(t), 1.0))
      throw IntegrationError("dopri5: step size underflow");

    for (std::size_t i = 0; i < M; ++i) yt[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, yt, k2);
    for (std::size_t i = 0; i < M; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, yt, k3);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, yt, k4);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, yt, k5);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, yt, k6);
    for (std::size_t i = 0; i < M; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      const double sc = opt.atol[i] + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / sc;
      err += ei * ei;
    }
    err = std::sqrt(err / static_cast<double>(M));

    if (!std::isfinite(err) || !finite(ynew)) {
      h *= 0.1;
      ++res.rejected;
      last_rejected = true;
      continue;
    }
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      ++res.rejected;
      last_rejected = true;
      continue;
    }

    DenseSegment<M> seg;
    seg.t0 = t;
    seg.h = h;
    for (std::size_t i = 0; i < M; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      seg.rc[0][i] = y[i];
      seg.rc[1][i] = ydiff;
      seg.rc[2][i] = bspl;
      seg.rc[3][i] = ydiff - h * k7[i] - bspl;
      seg.rc[4][i] =
          h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    res.solution.segments.push_back(seg);
    ++res.steps;

    const double t_new = t + h;
    const double g_new = event(t_new, ynew);
    if (g_prev > 0.0 && g_new <= 0.0) {
      double tz = t_new;
      if (g_new < 0.0) {
        auto gfun = [&](double tt) { return event(tt, seg.eval(tt)); };
        std::uintmax_t iters = 200;
        auto tolf = [](double a, double b) {
          return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a);
        };
        auto br = boost::math::tools::toms748_solve(gfun, t, t_new, g_prev, g_new, tolf, iters);
        const double ga = gfun(br.first), gb = gfun(br.second);
        tz = std::abs(ga) <= std::abs(gb) ? br.first : br.second;
      }
      res.event = true;
      res.t_event = tz;
      res.y_event = seg.eval(tz);
      res.solution.t_last = tz;
      return res;
    }
    g_prev = g_new;
    t = t_new;
    y = ynew;
    k1 = k7;

    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::min(last_rejected ? 1.0 : 5.0, std::max(0.2, fac));
    h *= fac;
    last_rejected = false;
  }
  res.solution.t_last = t;
  return res;
}

}  // namespace bnlab
