#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bnlab {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = z; p0 = 1.0; }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = z;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) { p1 = z; p0 = 1.0; }
    dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

/// Integrates f over [a, b] with a fixed Gauss-Legendre rule.
template <class F>
double integrate_gauss(const GaussRule& rule, double a, double b, F&& f) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
  return s * h;
}

/// Composite Gauss-Legendre over the given breakpoints.
template <class F>
double integrate_panels(const GaussRule& rule, const std::vector<double>& breaks, F&& f) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    s += integrate_gauss(rule, breaks[k], breaks[k + 1], f);
  return s;
}

/// Breakpoints 0, first, first*growth, ... ending exactly at end.
/// Suited to integrands concentrated near the origin with algebraic tails.
inline std::vector<double> geometric_breaks(double first, double growth, double end) {
  std::vector<double> b{0.0};
  if (end <= first) {
    b.push_back(end);
    return b;
  }
  double x = first;
  while (x < end / growth) {
    b.push_back(x);
    x *= growth;
  }
  b.push_back(x);
  if (x < end) b.push_back(end);
  return b;
}

/// Integral over [0, inf) via r = tan(theta), with panels graded towards pi/2
/// so that fractional powers of cos(theta) at the far end stay well resolved.
/// Total node count is panels * nodes (256 by default).
template <class F>
double integrate_half_line(F&& f, std::size_t panels = 16, std::size_t nodes = 16) {
  const GaussRule rule = gauss_legendre(nodes);
  const double top = 0.5 * std::numbers::pi;
  std::vector<double> breaks(panels + 1);
  // uniform in theta for the first half, geometric approach to pi/2 after that
  const std::size_t uni = panels / 2;
  for (std::size_t k = 0; k <= uni; ++k)
    breaks[k] = 0.25 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(uni);
  double gap = 0.25 * std::numbers::pi;
  for (std::size_t k = uni + 1; k < panels; ++k) {
    gap *= 0.35;
    breaks[k] = top - gap;
  }
  breaks[panels] = top;
  return integrate_panels(rule, breaks, [&](double th) {
    const double c = std::cos(th);
    if (c <= 0.0) return 0.0;
    const double r = std::tan(th);
    return f(r) / (c * c);
  });
}

}  // namespace bnlab
