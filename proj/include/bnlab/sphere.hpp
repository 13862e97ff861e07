#pragma once

#include <cmath>
#include <numbers>
#include <type_traits>
#include <vector>

#include "bnlab/errors.hpp"
#include "bnlab/quadrature.hpp"

namespace bnlab {

using Point = std::vector<double>;

/// Quadrature on the unit sphere S^{N-1}: nodes are unit vectors, weights sum to omega_N.
struct SphereRule {
  int N = 3;
  std::vector<Point> nodes;
  std::vector<double> weights;
};

/// Product rule for N = 3 (Gauss in cos(theta) x trapezoid in azimuth) and N = 4
/// (an extra Gauss factor in the first hyperspherical angle with Jacobian sin^2).
/// The polar axis is e_1.
inline SphereRule sphere_rule(int N, int order) {
  if (N != 3 && N != 4) throw DomainError("sphere_rule: only N = 3 and N = 4 are supported");
  if (order < 2) throw DomainError("sphere_rule: order must be at least 2");
  SphereRule rule{N, {}, {}};
  const GaussRule gt = gauss_legendre(order);
  const int nphi = 2 * order;
  const double dphi = 2.0 * std::numbers::pi / nphi;
  auto push_s2 = [&](double scale, double lead, double wlead) {
    for (int i = 0; i < order; ++i) {
      const double t = gt.x[i], st = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int k = 0; k < nphi; ++k) {
        const double ph = (k + 0.5) * dphi;
        Point x;
        if (N == 3) {
          x = {t, st * std::cos(ph), st * std::sin(ph)};
        } else {
          x = {lead, scale * t, scale * st * std::cos(ph), scale * st * std::sin(ph)};
        }
        rule.nodes.push_back(std::move(x));
        rule.weights.push_back(wlead * gt.w[i] * dphi);
      }
    }
  };
  if (N == 3) {
    push_s2(1.0, 0.0, 1.0);
  } else {
    const GaussRule gc = gauss_legendre(order);
    for (int j = 0; j < order; ++j) {
      const double chi = 0.5 * std::numbers::pi * (gc.x[j] + 1.0);
      const double sc = std::sin(chi);
      push_s2(sc, std::cos(chi), 0.5 * std::numbers::pi * gc.w[j] * sc * sc);
    }
  }
  return rule;
}

namespace detail {
inline void accumulate(double& acc, double w, double v) { acc += w * v; }
inline void accumulate(std::vector<double>& acc, double w, const std::vector<double>& v) {
  if (acc.empty()) acc.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
}
}  // namespace detail

/// Integral over the sphere |x - c| = rho of f(x, n), n the outward unit normal.
/// f may return a double or a std::vector<double>.
template <class F>
auto integrate_sphere(const SphereRule& rule, const Point& c, double rho, F&& f) {
  using R = std::decay_t<decltype(f(Point{}, Point{}))>;
  R acc{};
  const double jac = std::pow(rho, rule.N - 1);
  Point x(rule.N);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Point& n = rule.nodes[i];
    for (int k = 0; k < rule.N; ++k) x[k] = c[k] + rho * n[k];
    detail::accumulate(acc, rule.weights[i] * jac, f(x, n));
  }
  return acc;
}

/// Axially symmetric integral over |x| = rho in any dimension: f depends on x only
/// through cos(theta) = x_1/|x|.
template <class F>
double integrate_sphere_axial(int N, int order, double rho, F&& f) {
  const GaussRule g = gauss_legendre(order);
  const double wn1 = (N == 2) ? 2.0 : 2.0 * std::pow(std::numbers::pi, 0.5 * (N - 1)) /
                                          std::tgamma(0.5 * (N - 1));
  double s = 0.0;
  for (int i = 0; i < order; ++i) {
    const double th = 0.5 * std::numbers::pi * (g.x[i] + 1.0);
    s += g.w[i] * std::pow(std::sin(th), N - 2) * f(std::cos(th));
  }
  return 0.5 * std::numbers::pi * s * wn1 * std::pow(rho, N - 1);
}

}  // namespace bnlab
