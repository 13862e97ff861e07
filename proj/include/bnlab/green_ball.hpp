#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bnlab/bubbles.hpp"
#include "bnlab/constants.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/sphere.hpp"

namespace bnlab {

using Matrix = std::vector<std::vector<double>>;

/// Dirichlet Green's function of -Delta on B(0,R), G = S - H, by the method of images.
/// `normalization_factor` scales the constant 1/((N-2) omega_N); it exists only so
/// that verification suites can be fed a deliberately wrong constant.
struct BallGreen {
  int N;
  double radius;
  double normalization_factor = 1.0;

  BallGreen(int n, double R, double factor = 1.0) : N(n), radius(R), normalization_factor(factor) {
    if (n < 3) throw DomainError("BallGreen: N must be at least 3");
    if (!(R > 0.0)) throw DomainError("BallGreen: radius must be positive");
  }

  double constant() const { return normalization_factor / ((N - 2.0) * omega_n(N)); }

  void check_inside(const Point& x, bool allow_boundary) const {
    check_dim(N, x);
    const double r2 = norm2(x), R2 = radius * radius;
    if (r2 > R2 * (1.0 + 1e-12) || (!allow_boundary && r2 >= R2))
      throw DomainError("point outside the ball");
  }

  /// |x|^2|y|^2 - 2R^2 x.y + R^4, divided by R^2: squared distance of the image term.
  double image_dist2(const Point& x, const Point& y) const {
    const double R2 = radius * radius;
    return (norm2(x) * norm2(y) - 2.0 * R2 * dot(x, y) + R2 * R2) / R2;
  }
};

inline double singular_part(const BallGreen& g, const Point& x, const Point& y) {
  const double d2 = dist2(x, y);
  if (d2 == 0.0) throw SingularityError("singular part evaluated at x = y");
  return g.constant() * std::pow(d2, 0.5 * (2.0 - g.N));
}

inline double regular_part(const BallGreen& g, const Point& x, const Point& y) {
  g.check_inside(x, true);
  g.check_inside(y, true);
  return g.constant() * std::pow(g.image_dist2(x, y), 0.5 * (2.0 - g.N));
}

inline double green(const BallGreen& g, const Point& x, const Point& y) {
  g.check_inside(x, true);
  g.check_inside(y, true);
  const double d2 = dist2(x, y);
  if (d2 == 0.0) throw SingularityError("green evaluated at x = y");
  const double m = 0.5 * (2.0 - g.N);
  return g.constant() * (std::pow(d2, m) - std::pow(g.image_dist2(x, y), m));
}

inline double robin(const BallGreen& g, const Point& x) {
  g.check_inside(x, false);
  const double R = g.radius;
  return g.constant() * std::pow((R * R - norm2(x)) / R, 2.0 - g.N);
}

inline Point robin_gradient(const BallGreen& g, const Point& x) {
  g.check_inside(x, false);
  const double R = g.radius, w = R * R - norm2(x);
  const double gp = g.constant() * std::pow(R, g.N - 2.0) * (g.N - 2.0) * std::pow(w, 1.0 - g.N);
  Point out(g.N);
  for (int i = 0; i < g.N; ++i) out[i] = 2.0 * gp * x[i];
  return out;
}

inline Matrix robin_hessian(const BallGreen& g, const Point& x) {
  g.check_inside(x, false);
  const double R = g.radius, w = R * R - norm2(x), N = g.N;
  const double base = g.constant() * std::pow(R, N - 2.0) * (N - 2.0);
  const double gp = base * std::pow(w, 1.0 - N);
  const double gpp = base * (N - 1.0) * std::pow(w, -N);
  Matrix h(g.N, std::vector<double>(g.N));
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) h[i][j] = 4.0 * gpp * x[i] * x[j] + (i == j ? 2.0 * gp : 0.0);
  return h;
}

/// Gradient of G(., y) at x.
inline Point green_gradient(const BallGreen& g, const Point& x, const Point& y) {
  const double c = g.constant(), N = g.N, R2 = g.radius * g.radius;
  const double d2 = dist2(x, y);
  if (d2 == 0.0) throw SingularityError("green gradient evaluated at x = y");
  const double D2 = g.image_dist2(x, y), y2 = norm2(y);
  const double fs = c * (2.0 - N) * std::pow(d2, -0.5 * N);
  const double fh = c * 0.5 * (2.0 - N) * std::pow(D2, -0.5 * N);
  Point out(g.N);
  for (int k = 0; k < g.N; ++k)
    out[k] = fs * (x[k] - y[k]) - fh * (2.0 * y2 * x[k] - 2.0 * R2 * y[k]) / R2;
  return out;
}

/// Gradient of H(., y) at x.
inline Point regular_part_gradient(const BallGreen& g, const Point& x, const Point& y) {
  const double c = g.constant(), N = g.N, R2 = g.radius * g.radius;
  const double fh = c * 0.5 * (2.0 - N) * std::pow(g.image_dist2(x, y), -0.5 * N);
  const double y2 = norm2(y);
  Point out(g.N);
  for (int k = 0; k < g.N; ++k) out[k] = fh * (2.0 * y2 * x[k] - 2.0 * R2 * y[k]) / R2;
  return out;
}

/// Mixed derivatives d^2 G / dx_k dy_j, returned as m[k][j].
inline Matrix green_mixed(const BallGreen& g, const Point& x, const Point& y) {
  const double c = g.constant(), N = g.N, R2 = g.radius * g.radius;
  const double m = 0.5 * (2.0 - N);
  const double d2 = dist2(x, y);
  if (d2 == 0.0) throw SingularityError("green derivative evaluated at x = y");
  const double D2 = g.image_dist2(x, y), x2 = norm2(x), y2 = norm2(y);
  const double s1 = c * m * std::pow(d2, m - 1.0), s2 = c * m * (m - 1.0) * std::pow(d2, m - 2.0);
  const double h1 = c * m * std::pow(D2, m - 1.0), h2 = c * m * (m - 1.0) * std::pow(D2, m - 2.0);
  Matrix out(g.N, std::vector<double>(g.N));
  for (int k = 0; k < g.N; ++k) {
    for (int j = 0; j < g.N; ++j) {
      const double dl = (k == j) ? 1.0 : 0.0;
      const double sm = s2 * (2.0 * (x[k] - y[k])) * (-2.0 * (x[j] - y[j])) + s1 * (-2.0 * dl);
      const double zx = (2.0 * y2 * x[k] - 2.0 * R2 * y[k]) / R2;
      const double zy = (2.0 * x2 * y[j] - 2.0 * R2 * x[j]) / R2;
      const double hm = h2 * zx * zy + h1 * (4.0 * x[k] * y[j] - 2.0 * R2 * dl) / R2;
      out[k][j] = sm - hm;
    }
  }
  return out;
}

struct IdentityCheck {
  std::string name;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double rel_residual = 0.0;
  double rel_residual_coarse = 0.0;  ///< same check at half the quadrature order
  bool converged = true;
};

struct SurfaceIdentityReport {
  Point y;
  int quad_order = 0;
  std::vector<IdentityCheck> checks;
  double max_rel_residual() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.rel_residual);
    return m;
  }
};

namespace detail {

inline double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

/// Relative mismatch; `magnitude` is the integral of the absolute integrand and keeps
/// zero right-hand sides meaningful.
inline double rel_mismatch(const std::vector<double>& a, const std::vector<double>& b,
                           double magnitude) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return vec_norm(d) / std::max(vec_norm(b), magnitude);
}

/// Evaluates the five identities at one quadrature order. The last entry of every
/// integrand vector carries the absolute-value magnitude.
inline std::vector<IdentityCheck> surface_checks(const BallGreen& g, const Point& y, int order) {
  const int N = g.N;
  const double R = g.radius;
  const SphereRule rule = sphere_rule(N, order);
  const Point origin(N, 0.0);
  auto dn = [&](const Point& x, const Point& n) { return dot(green_gradient(g, x, y), n); };

  std::vector<IdentityCheck> out;

  // boundary moment: int (x-y).n (dG/dn)^2 = (N-2) R(y)
  {
    auto v = integrate_sphere(rule, origin, R, [&](const Point& x, const Point& n) {
      Point d(N);
      for (int k = 0; k < N; ++k) d[k] = x[k] - y[k];
      const double f = dot(d, n) * std::pow(dn(x, n), 2);
      return std::vector<double>{f, std::abs(f)};
    });
    IdentityCheck c{"boundary_moment", {v[0]}, {(N - 2.0) * robin(g, y)}};
    c.rel_residual = rel_mismatch(c.lhs, c.rhs, v[1]);
    out.push_back(c);
  }
  // boundary vector: int (dG/dn)^2 n = grad R(y)
  {
    auto v = integrate_sphere(rule, origin, R, [&](const Point& x, const Point& n) {
      const double f = std::pow(dn(x, n), 2);
      std::vector<double> r(N + 1);
      for (int k = 0; k < N; ++k) r[k] = f * n[k];
      r[N] = f;
      return r;
    });
    IdentityCheck c{"boundary_gradient", std::vector<double>(v.begin(), v.begin() + N),
                    robin_gradient(g, y)};
    c.rel_residual = rel_mismatch(c.lhs, c.rhs, v[N]);
    out.push_back(c);
  }
  // boundary hessian: int dG/dx_i d/dn(dG/dy_j) = (1/2) d^2 R / dy_i dy_j
  {
    auto v = integrate_sphere(rule, origin, R, [&](const Point& x, const Point& n) {
      const Point gx = green_gradient(g, x, y);
      const Matrix mx = green_mixed(g, x, y);
      std::vector<double> r(N * N + 1, 0.0);
      double mag = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          double dnj = 0.0;
          for (int k = 0; k < N; ++k) dnj += n[k] * mx[k][j];
          r[i * N + j] = gx[i] * dnj;
          mag += std::abs(gx[i] * dnj);
        }
      r[N * N] = mag;
      return r;
    });
    const Matrix h = robin_hessian(g, y);
    std::vector<double> rhs;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) rhs.push_back(0.5 * h[i][j]);
    IdentityCheck c{"boundary_hessian", std::vector<double>(v.begin(), v.begin() + N * N), rhs};
    c.rel_residual = rel_mismatch(c.lhs, c.rhs, v[N * N]);
    out.push_back(c);
  }
  const double d = 0.5 * (R - std::sqrt(norm2(y)));
  // local scalar identity on the small sphere around the pole
  {
    auto v = integrate_sphere(rule, y, d, [&](const Point& x, const Point& n) {
      const Point gx = green_gradient(g, x, y);
      const double gn = dot(gx, n);
      Point dx(N);
      for (int k = 0; k < N; ++k) dx[k] = x[k] - y[k];
      const double t1 = -gn * dot(dx, gx);
      const double t2 = 0.5 * dot(dx, n) * norm2(gx);
      const double t3 = -0.5 * (N - 2.0) * green(g, x, y) * gn;
      return std::vector<double>{t1 + t2 + t3, std::abs(t1) + std::abs(t2) + std::abs(t3)};
    });
    IdentityCheck c{"local_scalar", {v[0]}, {-0.5 * (N - 2.0) * robin(g, y)}};
    c.rel_residual = rel_mismatch(c.lhs, c.rhs, v[1]);
    out.push_back(c);
  }
  // local vector identity: int dG/dn dG/dx_i - (1/2)|grad G|^2 n_i = d/dx_i H(x, y) at x = y
  {
    auto v = integrate_sphere(rule, y, d, [&](const Point& x, const Point& n) {
      const Point gx = green_gradient(g, x, y);
      const double gn = dot(gx, n), g2 = norm2(gx);
      std::vector<double> r(N + 1);
      double mag = 0.0;
      for (int i = 0; i < N; ++i) {
        r[i] = gn * gx[i] - 0.5 * g2 * n[i];
        mag += std::abs(gn * gx[i]) + std::abs(0.5 * g2 * n[i]);
      }
      r[N] = mag;
      return r;
    });
    IdentityCheck c{"local_vector", std::vector<double>(v.begin(), v.begin() + N),
                    regular_part_gradient(g, y, y)};
    c.rel_residual = rel_mismatch(c.lhs, c.rhs, v[N]);
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Surface-integral identities of the Green's function on the ball, at pole y:
///   boundary_moment    int_{dB} (x-y).n (dG/dn)^2         = (N-2) R(y)
///   boundary_gradient  int_{dB} (dG/dn)^2 n               = grad R(y)
///   boundary_hessian   int_{dB} dG/dx_i d/dn (dG/dy_j)    = (1/2) d^2R/dy_i dy_j
///   local_scalar       on dB(y,d): -int dG/dn (x-y).grad G + (1/2) int (x-y).n |grad G|^2
///                                  - (N-2)/2 int G dG/dn = -(N-2)/2 H(y,y)
///   local_vector       on dB(y,d): int dG/dn grad G - (1/2) int |grad G|^2 n = grad_x H(x,y)|_{x=y}
/// Each identity is also evaluated at half the order; `converged` is false when
/// refining the quadrature did not reduce the residual.
inline SurfaceIdentityReport surface_identity_suite(const BallGreen& g, const Point& y,
                                                    int quad_order = 64) {
  if (quad_order < 16) throw DomainError("surface_identity_suite: quad_order must be at least 16");
  g.check_inside(y, false);
  SurfaceIdentityReport rep{y, quad_order, detail::surface_checks(g, y, quad_order)};
  const auto coarse = detail::surface_checks(g, y, quad_order / 2);
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    rep.checks[i].rel_residual_coarse = coarse[i].rel_residual;
    rep.checks[i].converged =
        rep.checks[i].rel_residual <= std::max(coarse[i].rel_residual, 1e-12);
  }
  return rep;
}

/// int_B G(x,y) f(y) dy by polar coordinates centred at x (the singularity is absorbed
/// by the Jacobian rho^{N-1}); N = 3 or 4.
template <class F>
double green_volume_integral(const BallGreen& g, const Point& x, F&& f, int order = 48) {
  g.check_inside(x, false);
  const int N = g.N;
  const SphereRule rule = sphere_rule(N, order);
  const GaussRule gr = gauss_legendre(order);
  const double R2 = g.radius * g.radius, x2 = norm2(x);
  return integrate_sphere(rule, x, 1.0, [&](const Point&, const Point& th) {
    const double b = dot(x, th);
    const double rmax = -b + std::sqrt(b * b + R2 - x2);
    Point y(N);
    return integrate_gauss(gr, 0.0, rmax, [&](double rho) {
      if (rho == 0.0) return 0.0;
      for (int k = 0; k < N; ++k) y[k] = x[k] + rho * th[k];
      return green(g, x, y) * f(y) * std::pow(rho, N - 1);
    });
  });
}

/// Green representation of u = R^2 - |x|^2 (which solves -Delta u = 2N, u = 0 on the
/// boundary): returns the pair (int G(x,.) 2N, R^2 - |x|^2).
inline std::pair<double, double> green_representation_check(const BallGreen& g, const Point& x,
                                                             int order = 48) {
  const double v =
      green_volume_integral(g, x, [&](const Point&) { return 2.0 * g.N; }, order);
  return {v, g.radius * g.radius - norm2(x)};
}

}  // namespace bnlab
