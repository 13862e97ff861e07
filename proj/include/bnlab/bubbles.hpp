#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bnlab/constants.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/sphere.hpp"

namespace bnlab {

inline double norm2(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double dist2(const Point& x, const Point& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

inline double dot(const Point& x, const Point& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// U_{lambda,a}(x) = (lambda/(1+lambda^2|x-a|^2))^{(N-2)/2}, the un-normalized bubble.
/// alpha_N * U_{lambda,a} solves -Delta u = u^{2*-1} on R^N.
struct Bubble {
  int N;
  double lambda;
  Point center;

  Bubble(int n, double lam, Point a) : N(n), lambda(lam), center(std::move(a)) {
    if (n < 3) throw DomainError("Bubble: N must be at least 3");
    if (!(lam > 0.0)) throw DomainError("Bubble: lambda must be positive");
    if (static_cast<int>(center.size()) != n) throw DomainError("Bubble: center has wrong dimension");
  }
  Bubble(int n, double lam) : Bubble(n, lam, Point(n, 0.0)) {}
};

inline void check_dim(int N, const Point& x) {
  if (static_cast<int>(x.size()) != N) throw DomainError("point has wrong dimension");
}

inline double eval_bubble(const Bubble& b, const Point& x) {
  check_dim(b.N, x);
  const double r2 = dist2(x, b.center);
  return std::pow(b.lambda / (1.0 + b.lambda * b.lambda * r2), 0.5 * (b.N - 2.0));
}

/// Radial form of U_{lambda,0} and its r-derivative.
inline double bubble_radial(int N, double lambda, double r) {
  return std::pow(lambda / (1.0 + lambda * lambda * r * r), 0.5 * (N - 2.0));
}
inline double bubble_radial_slope(int N, double lambda, double r) {
  return -(N - 2.0) * std::pow(lambda, 0.5 * (N + 2.0)) * r *
         std::pow(1.0 + lambda * lambda * r * r, -0.5 * N);
}
/// d/dlambda of U_{lambda,0}(r) and its r-derivative.
inline double bubble_radial_dlambda(int N, double lambda, double r) {
  const double t = lambda * lambda * r * r;
  return 0.5 * (N - 2.0) * std::pow(lambda, 0.5 * (N - 4.0)) * (1.0 - t) *
         std::pow(1.0 + t, -0.5 * N);
}
inline double bubble_radial_dlambda_slope(int N, double lambda, double r) {
  const double t = lambda * lambda * r * r;
  return 0.5 * (N - 2.0) * std::pow(lambda, 0.5 * (N - 4.0)) * (-2.0 * lambda * lambda * r) *
         std::pow(1.0 + t, -0.5 * N - 1.0) * ((1.0 + t) + 0.5 * N * (1.0 - t));
}

/// U(s) = (N(N-2)/(N(N-2)+s^2))^{(N-2)/2}; U(0) = 1 and -Delta U = U^{2*-1}.
inline double normalized_radial(int N, double s) {
  const double K = N * (N - 2.0);
  return std::pow(K / (K + s * s), 0.5 * (N - 2.0));
}
inline double normalized_radial_slope(int N, double s) { return normalized_bubble_slope(N, s); }

inline double eval_normalized(int N, const Point& x) {
  if (N < 3) throw DomainError("eval_normalized: N must be at least 3");
  check_dim(N, x);
  return normalized_radial(N, std::sqrt(norm2(x)));
}

struct BubbleDerivatives {
  double d_by_lambda;
  Point d_by_center;
};

inline BubbleDerivatives bubble_derivatives(const Bubble& b, const Point& x) {
  check_dim(b.N, x);
  const double m = 0.5 * (b.N - 2.0), l = b.lambda;
  const double r2 = dist2(x, b.center);
  const double den = 1.0 + l * l * r2;
  const double U = std::pow(l / den, m);
  BubbleDerivatives d{m * U * (1.0 - l * l * r2) / (l * den), Point(b.N)};
  for (int j = 0; j < b.N; ++j) d.d_by_center[j] = U * m * l * l * 2.0 * (x[j] - b.center[j]) / den;
  return d;
}

/// Kernel of -Delta - (2*-1)U^{2*-2} for the normalized bubble:
/// index 0 gives (K-|x|^2)/(K+|x|^2)^{N/2}, index i gives x_i/(K+|x|^2)^{N/2}, K = N(N-2).
inline double kernel_eval(int N, int index, const Point& x) {
  if (N < 3) throw DomainError("kernel_eval: N must be at least 3");
  if (index < 0 || index > N) throw DomainError("kernel_eval: index out of range");
  check_dim(N, x);
  const double K = N * (N - 2.0), r2 = norm2(x);
  const double den = std::pow(K + r2, 0.5 * N);
  if (index == 0) return (K - r2) / den;
  return x[index - 1] / den;
}

/// Harmonic function psi on B(0,R) with psi = U_{lambda,a} on the boundary, by the
/// Poisson integral. Collinear configurations (x, a and 0 on one line) reduce to a
/// one-dimensional integral in the polar angle; otherwise N = 3 or 4 is required.
inline double bubble_harmonic_part(const Bubble& b, double R, const Point& x, int order = 128) {
  check_dim(b.N, x);
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  const int N = b.N;
  const double x2 = norm2(x), a2 = norm2(b.center);
  if (a2 >= R * R) throw DomainError("bubble center must lie inside the ball");
  if (x2 > R * R * (1.0 + 1e-12)) throw DomainError("point outside the ball");
  const double m = 0.5 * (N - 2.0), l = b.lambda;
  auto Ub = [&](double d2) { return std::pow(l / (1.0 + l * l * d2), m); };
  if (a2 == 0.0) return Ub(R * R);
  if (x2 >= R * R * (1.0 - 1e-14)) return eval_bubble(b, x);
  const double wN = omega_n(N);
  const double pk = (R * R - x2) / (wN * R);

  // collinear test: |x|^2|a|^2 == (x.a)^2
  const double xa = dot(x, b.center);
  const bool collinear = x2 == 0.0 || std::abs(x2 * a2 - xa * xa) <= 1e-28 * (x2 * a2 + 1e-300);
  if (collinear) {
    const double ta = std::sqrt(a2);
    const double tx = (x2 == 0.0) ? 0.0 : xa / ta;
    return integrate_sphere_axial(N, order, R, [&](double c) {
      const double dx2 = R * R - 2.0 * R * tx * c + tx * tx;
      const double da2 = R * R - 2.0 * R * ta * c + ta * ta;
      return pk * std::pow(dx2, -0.5 * N) * Ub(da2);
    });
  }
  if (N != 3 && N != 4)
    throw DomainError("bubble_harmonic_part: non-collinear points need N = 3 or 4");
  const SphereRule rule = sphere_rule(N, order);
  return integrate_sphere(rule, Point(N, 0.0), R, [&](const Point& z, const Point&) {
    return pk * std::pow(dist2(x, z), -0.5 * N) * Ub(dist2(z, b.center));
  });
}

/// PU_{lambda,a} = U_{lambda,a} - psi, vanishing on the sphere of radius R.
inline double projected_bubble(const Bubble& b, double R, const Point& x, int order = 128) {
  check_dim(b.N, x);
  const double x2 = norm2(x);
  if (x2 > R * R * (1.0 + 1e-12)) throw DomainError("projected_bubble: point outside the ball");
  if (x2 >= R * R * (1.0 - 1e-14)) return 0.0;
  return eval_bubble(b, x) - bubble_harmonic_part(b, R, x, order);
}

}  // namespace bnlab
