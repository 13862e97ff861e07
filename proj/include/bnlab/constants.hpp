#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "bnlab/errors.hpp"
#include "bnlab/quadrature.hpp"

namespace bnlab {

/// Problem parameters: dimension N and the subcritical exponent q.
struct Params {
  int N = 4;
  double q = 3.0;
  double two_star = 4.0;
  bool regime_ok = true;

  Params() = default;
  Params(int n, double q_) : N(n), q(q_) {
    if (n < 3) throw DomainError("dimension N must be at least 3");
    two_star = 2.0 * n / (n - 2.0);
    regime_ok = q > lower_q() && q < two_star;
  }

  /// max{2, 4/(N-2)}
  double lower_q() const { return std::max(2.0, 4.0 / (N - 2.0)); }
  /// exponent of the critical nonlinearity u^{p}
  double p() const { return two_star - 1.0; }

  /// Human-readable reason for regime failure, empty when the regime holds.
  std::string regime_message() const {
    if (regime_ok) return {};
    std::ostringstream os;
    os.precision(17);
    if (!(q > lower_q()))
      os << "q must exceed max{2, 4/(N-2)} = " << lower_q() << " (got q = " << q << ")";
    else
      os << "q must be below the critical exponent 2N/(N-2) = " << two_star << " (got q = " << q
         << ")";
    return os.str();
  }

  void require_regime() const {
    if (!regime_ok) throw DomainError(regime_message());
  }
};

/// Lanczos approximation of Gamma (g = 7, 9 coefficients) with reflection for x < 1/2.
inline double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  const double z = x - 1.0;
  double a = c[0];
  const double t = z + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

/// Surface area of the unit sphere S^{N-1} in R^N.
inline double omega_n(int N) {
  if (N < 2) throw DomainError("omega_n: N must be at least 2");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / gamma_fn(0.5 * N);
}

/// alpha_N = (N(N-2))^{(N-2)/4}, the factor turning U_{lambda,a} into a solution.
inline double alpha_n(int N) {
  if (N < 3) throw DomainError("alpha_n: N must be at least 3");
  return std::pow(N * (N - 2.0), (N - 2.0) / 4.0);
}

/// C_{N,q} = Gamma(N/2) Gamma((N-2)q/2 - N/2) / (2 Gamma((N-2)q/2)).
inline double c_nq(const Params& p) {
  const double b = 0.5 * (p.N - 2.0) * p.q;
  if (!(b - 0.5 * p.N > 0.0))
    throw DomainError("c_nq: integrand not integrable, need q > N/(N-2)");
  p.require_regime();
  return gamma_fn(0.5 * p.N) * gamma_fn(b - 0.5 * p.N) / (2.0 * gamma_fn(b));
}

/// Quadrature oracle for C_{N,q}: int_0^inf r^{N-1} (1+r^2)^{-(N-2)q/2} dr.
inline double c_nq_quadrature(const Params& p) {
  const double b = 0.5 * (p.N - 2.0) * p.q;
  if (!(b - 0.5 * p.N > 0.0))
    throw DomainError("c_nq_quadrature: integrand not integrable, need q > N/(N-2)");
  return integrate_half_line(
      [&](double r) { return std::pow(r, p.N - 1) * std::pow(1.0 + r * r, -b); });
}

/// alpha_{N,q}, the constant of the blow-up law eps mu^{q+2-2*} -> alpha_{N,q} R(x0).
inline double alpha_nq(const Params& p) {
  p.require_regime();
  const double N = p.N, q = p.q, ts = p.two_star;
  const double b = 0.5 * (N - 2.0) * q;
  return (2.0 * q / (ts - q)) * (std::pow(alpha_n(p.N), ts) * omega_n(p.N) / (N * N)) *
         gamma_fn(b) / (gamma_fn(0.5 * N) * gamma_fn(b - 0.5 * N));
}

/// Derivative of the normalized bubble (K/(K+s^2))^{(N-2)/2}, K = N(N-2).
inline double normalized_bubble_slope(int N, double s) {
  const double K = N * (N - 2.0);
  return -(N - 2.0) * s * std::pow(K, 0.5 * (N - 2.0)) * std::pow(K + s * s, -0.5 * N);
}

/// S^{N/2} = alpha_N^2 int |grad U_{1,0}|^2, by radial quadrature of the normalized bubble.
inline double sobolev_sn2(int N) {
  if (N < 3) throw DomainError("sobolev_sn2: N must be at least 3");
  const double I = integrate_half_line([&](double s) {
    const double d = normalized_bubble_slope(N, s);
    return d * d * std::pow(s, N - 1);
  });
  return omega_n(N) * I;
}

/// Second route: alpha_N^{2*} int U_{1,0}^{2*}, which equals S^{N/2} as well.
inline double sobolev_sn2_from_lstar(int N) {
  if (N < 3) throw DomainError("sobolev_sn2_from_lstar: N must be at least 3");
  const double K = N * (N - 2.0);
  const double ts = 2.0 * N / (N - 2.0);
  const double I = integrate_half_line(
      [&](double s) { return std::pow(K / (K + s * s), 0.5 * (N - 2.0) * ts) * std::pow(s, N - 1); });
  return omega_n(N) * I;
}

/// Robin function of the unit ball at its center, 1/((N-2) omega_N).
inline double unit_ball_robin_center(int N) { return 1.0 / ((N - 2.0) * omega_n(N)); }

struct ConstantSet {
  double alpha_N;
  double omega_N;
  double C_Nq;
  double alpha_Nq;
  double sobolev_SN2;
  double blowup_target;
};

inline ConstantSet constant_set(const Params& p) {
  p.require_regime();
  return {alpha_n(p.N), omega_n(p.N),   c_nq(p), alpha_nq(p),
          sobolev_sn2(p.N), alpha_nq(p) * unit_ball_robin_center(p.N)};
}

}  // namespace bnlab
