#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bnlab/errors.hpp"

namespace bnlab {

/// Cubic spline through (x_i, y_i) on a strictly increasing, possibly non-uniform grid.
/// End slopes come from the cubic through the four outermost samples, which keeps the
/// fourth-order accuracy up to the ends; with fewer than four samples the ends are natural.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("CubicSpline: need at least two samples");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw DomainError("CubicSpline: abscissae must increase");
    m_.assign(n, 0.0);
    if (n == 2) return;

    // rows a_i m_{i-1} + b_i m_i + c_i m_{i+1} = d_i
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    if (n >= 4) {
      const double h0 = x_[1] - x_[0], hn = x_[n - 1] - x_[n - 2];
      b[0] = h0 / 3.0;
      c[0] = h0 / 6.0;
      d[0] = (y_[1] - y_[0]) / h0 - end_slope(0, 1, 2, 3);
      a[n - 1] = hn / 6.0;
      b[n - 1] = hn / 3.0;
      d[n - 1] = end_slope(n - 1, n - 2, n - 3, n - 4) - (y_[n - 1] - y_[n - 2]) / hn;
    }
    // Thomas
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  /// Exact integral of the spline over its whole support.
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double h = x_[i + 1] - x_[i];
      s += 0.5 * h * (y_[i] + y_[i + 1]) - h * h * h * (m_[i] + m_[i + 1]) / 24.0;
    }
    return s;
  }

  double operator()(double t) const {
    std::size_t lo = 0, hi = x_.size() - 1;
    if (t <= x_[0]) hi = 1;
    else if (t >= x_[hi]) lo = hi - 1;
    else
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (x_[mid] > t ? hi : lo) = mid;
      }
    const double h = x_[hi] - x_[lo];
    const double a = (x_[hi] - t) / h, b = (t - x_[lo]) / h;
    return a * y_[lo] + b * y_[hi] +
           ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
  }

 private:
  // derivative at x_[i0] of the Lagrange cubic through samples i0..i3
  double end_slope(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const {
    const std::size_t idx[4] = {i0, i1, i2, i3};
    const double t = x_[i0];
    double s = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double xj = x_[idx[j]];
      double den = 1.0;
      for (int k = 0; k < 4; ++k)
        if (k != j) den *= xj - x_[idx[k]];
      // derivative of prod_{k != j} (t - x_k) at t
      double num = 0.0;
      for (int m = 0; m < 4; ++m) {
        if (m == j) continue;
        double p = 1.0;
        for (int k = 0; k < 4; ++k)
          if (k != j && k != m) p *= t - x_[idx[k]];
        num += p;
      }
      s += y_[idx[j]] * num / den;
    }
    return s;
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace bnlab
