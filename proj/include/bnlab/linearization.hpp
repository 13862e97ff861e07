#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "bnlab/constants.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/ode.hpp"
#include "bnlab/radial_solver.hpp"

namespace bnlab {

/// Mode-l part of the linearized operator
///   L_l v = -v'' - (N-1)/r v' + l(l+N-2)/r^2 v - V(r) v,  v(1) = 0,
///   V = (2*-1) u^{2*-2} + eps (q-1) u^{q-2} (+ potential_shift),
/// discretized by finite volumes on a grid stretched towards the concentration point and
/// symmetrized with the square roots of the cell volumes.
struct ModeOperator {
  int N = 4;
  int ell = 0;
  int n_grid = 0;
  double potential_shift = 0.0;
  std::vector<double> grid;       ///< nodes r_1 < ... < r_n < 1
  std::vector<double> potential;  ///< V(r_i) without the shift
  std::vector<double> diag;
  std::vector<double> offdiag;  ///< offdiag[i] couples i and i+1
  std::shared_ptr<const RadialSolution> solution;
};

struct SpectrumReport {
  int ell = 0;
  std::vector<double> eigenvalues;     ///< shooting-refined, ascending
  std::vector<double> fd_eigenvalues;  ///< tridiagonal eigenvalues at n_grid
  std::vector<double> fd_doubled;      ///< same at 2 n_grid
  double fd_doubling_shift = 0.0;      ///< max relative shift under grid doubling
  bool fd_converged = true;
  double min_abs = 0.0;
  /// change of the eigenvalue nearest 0 when the shooting tolerance is tightened 100x
  double min_abs_uncertainty = 0.0;
  bool resolved = true;  ///< min_abs exceeds 10x its uncertainty
};

namespace detail {

/// kappa with kappa/sinh(kappa) = target (target in (0,1)); 0 means a uniform grid.
inline double stretch_parameter(double target) {
  if (target >= 1.0) return 0.0;
  double lo = 1e-8, hi = 1.0;
  while (hi / std::sinh(hi) > target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid / std::sinh(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double potential_at(const Params& p, const RadialSolution& sol, double r) {
  const double u = std::max(sol.u(r), 0.0);
  return p.p() * std::pow(u, p.two_star - 2.0) + sol.eps * (p.q - 1.0) * std::pow(u, p.q - 2.0);
}

}  // namespace detail

inline ModeOperator build_mode_operator(const Params& p, std::shared_ptr<const RadialSolution> sol,
                                        int ell, int n_grid, double potential_shift = 0.0) {
  if (ell < 0) throw DomainError("build_mode_operator: ell must be non-negative");
  if (n_grid < 256) throw DomainError("build_mode_operator: n_grid must be at least 256");
  if (!sol || !sol->shot) throw DomainError("build_mode_operator: no solution");
  const int N = p.N, n = n_grid;
  ModeOperator op;
  op.N = N;
  op.ell = ell;
  op.n_grid = n;
  op.potential_shift = potential_shift;
  op.solution = sol;

  // r = sinh(kappa t)/sinh(kappa) with t uniform; kappa depends only on the bubble core
  // width sqrt(N(N-2))/R~, so doubling n refines every cell (first cell ~ core/n_grid*16)
  const double core = std::sqrt(N * (N - 2.0)) / sol->R_tilde;
  const double kappa = detail::stretch_parameter(16.0 * core);
  auto map = [&](double t) { return kappa == 0.0 ? t : std::sinh(kappa * t) / std::sinh(kappa); };
  std::vector<double> r(n + 2);
  for (int i = 0; i <= n + 1; ++i) r[i] = map(static_cast<double>(i) / (n + 1.0));
  r[n + 1] = 1.0;

  op.grid.assign(r.begin() + 1, r.begin() + n + 1);
  op.potential.resize(n);
  op.diag.resize(n);
  op.offdiag.resize(n - 1);
  std::vector<double> face(n + 1), vol(n), flux(n + 1);
  // face[i] sits between r[i] and r[i+1]
  for (int i = 0; i <= n; ++i) face[i] = 0.5 * (r[i] + r[i + 1]);
  for (int i = 0; i <= n; ++i) flux[i] = std::pow(face[i], N - 1) / (r[i + 1] - r[i]);
  if (ell == 0) flux[0] = 0.0;  // reflection: no flux through the innermost face
  for (int i = 1; i <= n; ++i)
    vol[i - 1] = (std::pow(face[i], N) - std::pow(face[i - 1], N)) / N;
  const double cent = ell * (ell + N - 2.0);
  for (int i = 1; i <= n; ++i) {
    const double V = detail::potential_at(p, *sol, r[i]);
    op.potential[i - 1] = V;
    op.diag[i - 1] = (flux[i - 1] + flux[i]) / vol[i - 1] + cent / (r[i] * r[i]) - V -
                     potential_shift;
  }
  for (int i = 1; i < n; ++i) op.offdiag[i - 1] = -flux[i] / std::sqrt(vol[i - 1] * vol[i]);
  return op;
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below x (Sturm sequence).
inline int sturm_count(const std::vector<double>& a, const std::vector<double>& b, double x) {
  int c = 0;
  double d = a[0] - x;
  if (d < 0.0) ++c;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (d == 0.0) d = std::numeric_limits<double>::epsilon() * (std::abs(b[i - 1]) + 1e-300);
    d = a[i] - x - b[i - 1] * b[i - 1] / d;
    if (d < 0.0) ++c;
  }
  return c;
}

/// k smallest eigenvalues by bisection on the Sturm count.
inline std::vector<double> tridiagonal_smallest(const std::vector<double>& a,
                                                const std::vector<double>& b, int k) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double rad = (i > 0 ? std::abs(b[i - 1]) : 0.0) + (i + 1 < a.size() ? std::abs(b[i]) : 0.0);
    lo = std::min(lo, a[i] - rad);
    hi = std::max(hi, a[i] + rad);
  }
  std::vector<double> ev(k);
  for (int j = 0; j < k; ++j) {
    double l = lo, h = hi;
    for (int it = 0; it < 200 && h - l > 4.0 * std::numeric_limits<double>::epsilon() *
                                                (std::abs(l) + std::abs(h)); ++it) {
      const double m = 0.5 * (l + h);
      (sturm_count(a, b, m) > j ? h : l) = m;
    }
    ev[j] = 0.5 * (l + h);
  }
  return ev;
}

namespace detail {

/// Shooting for the mode equation in the variable s = R~ r with phi = s^l chi:
///   chi'' = -((N-1+2l)/s) chi' - (V~(s) + sigma~) chi,   chi(R~) = 0.
/// Returns the number of sign changes of chi on (0, R~] and chi(R~) (normalized).
struct ModeShot {
  int zeros;
  double end_value;
};

inline ModeShot mode_shot(const Params& p, const RadialSolution& sol, int ell, double sig_t,
                          double rtol) {
  const int N = p.N;
  const ShootResult& sh = *sol.shot;
  const double Rt = sol.R_tilde, et = sol.eps_tilde;
  const double pe = p.p(), ts = p.two_star, q = p.q;
  auto Vt = [&](double s) {
    const double u = std::max(sh.u(s), 0.0);
    return pe * std::pow(u, ts - 2.0) + et * (q - 1.0) * std::pow(u, q - 2.0);
  };
  const double a = N - 1.0 + 2.0 * ell;
  auto rhs = [&](double s, const State<2>& y, State<2>& dy) {
    dy[0] = y[1];
    dy[1] = -a / s * y[1] - (Vt(s) + sig_t) * y[0];
  };
  const double s0 = std::min(1e-4, 1e-3 * Rt);
  const double c = (Vt(0.0) + sig_t) / (2.0 * (N + 2.0 * ell));
  State<2> y{1.0 - c * s0 * s0, -2.0 * c * s0};
  OdeOptions<2> oo;
  oo.rtol = rtol;
  oo.atol = {1e-300, 1e-300};
  oo.h_init = 0.1 * s0;
  int zeros = 0;
  double s = s0;
  double prev = y[0];
  // chunks keep exponentially growing solutions representable: at most ~e^100 each
  const double grow = 100.0 / std::sqrt(std::abs(sig_t) + 1e-30);
  while (s < Rt) {
    const double s1 = std::min(Rt, s + std::min(std::max(s, 1.0), grow));
    const auto out = dopri5<2>(rhs, s, y, s1, oo);
    for (const auto& seg : out.solution.segments) {
      const double v = seg.rc[0][0];
      if (v != 0.0 && prev != 0.0 && (v < 0.0) != (prev < 0.0)) ++zeros;
      if (v != 0.0) prev = v;
    }
    y = out.solution.at(s1);
    const double v = y[0];
    if (v != 0.0 && prev != 0.0 && (v < 0.0) != (prev < 0.0)) ++zeros;
    if (v != 0.0) prev = v;
    const double m = std::abs(y[0]) + std::abs(y[1]);
    if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
      y[0] /= m;
      y[1] /= m;
    }
    s = s1;
  }
  // boundary value relative to the local amplitude
  const double amp = std::abs(y[0]) + std::abs(y[1]) * Rt;
  return {zeros, y[0] / amp};
}

}  // namespace detail

/// Refines the j-th eigenvalue (0-based, r-units) by shooting; `guess` seeds the bracket.
inline double refine_eigenvalue(const Params& p, const RadialSolution& sol, int ell, int j,
                                double guess, double shift, double rtol = 1e-10) {
  const double R2 = sol.R_tilde * sol.R_tilde;
  // sigma~ for the operator with the shifted potential: V~ + shift/R~^2
  auto count = [&](double sig) {
    return detail::mode_shot(p, sol, ell, (sig + shift) / R2, rtol).zeros;
  };
  // eigenvalue sigma_j is where the zero count of chi(.; sigma) increases from j to j+1
  double step = std::max(1.0, std::abs(guess) * 0.5);
  double lo = guess - step, hi = guess + step;
  int clo = count(lo), chi = count(hi);
  for (int it = 0; clo > j && it < 200; ++it) {
    step *= 2.0;
    lo = guess - step;
    clo = count(lo);
  }
  for (int it = 0; chi < j + 1 && it < 200; ++it) {
    step *= 2.0;
    hi = guess + step;
    chi = count(hi);
  }
  if (clo > j || chi < j + 1) throw FitError("refine_eigenvalue: could not bracket the eigenvalue");
  for (int it = 0; it < 200 && !(clo == j && chi == j + 1); ++it) {
    const double m = 0.5 * (lo + hi);
    const int cm = count(m);
    if (cm > j) {
      hi = m;
      chi = cm;
    } else {
      lo = m;
      clo = cm;
    }
  }
  // chi(R~) has sign (-1)^j just below sigma_j and (-1)^{j+1} just above
  const double parity = j % 2 == 0 ? 1.0 : -1.0;
  auto endval = [&](double sig) {
    return parity * detail::mode_shot(p, sol, ell, (sig + shift) / R2, rtol).end_value;
  };
  double flo = endval(lo), fhi = endval(hi);
  if ((flo <= 0.0) == (fhi <= 0.0)) return 0.5 * (lo + hi);
  std::uintmax_t iters = 200;
  auto stop = [&](double a, double b) {
    return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a));
  };
  const auto br = boost::math::tools::toms748_solve(endval, lo, hi, flo, fhi, stop, iters);
  return 0.5 * (br.first + br.second);
}

/// k smallest eigenvalues (unit-ball units) of the mode operator. The tridiagonal
/// eigenvalues at n_grid and 2 n_grid are reported for the convergence check; the
/// returned eigenvalues are refined by shooting, which resolves the near-zero
/// translation mode that the finite-volume grid cannot.
inline SpectrumReport spectrum(const Params& p, const ModeOperator& op, int k) {
  if (k < 2) throw DomainError("spectrum: k must be at least 2");
  SpectrumReport rep;
  rep.ell = op.ell;
  rep.fd_eigenvalues = tridiagonal_smallest(op.diag, op.offdiag, k);
  const ModeOperator fine =
      build_mode_operator(p, op.solution, op.ell, 2 * op.n_grid, op.potential_shift);
  rep.fd_doubled = tridiagonal_smallest(fine.diag, fine.offdiag, k);
  double vmax = 0.0;
  for (double v : op.potential) vmax = std::max(vmax, v);
  for (int j = 0; j < k; ++j) {
    const double sh = std::abs(rep.fd_doubled[j] - rep.fd_eigenvalues[j]) /
                      std::max(std::abs(rep.fd_doubled[j]), vmax);
    rep.fd_doubling_shift = std::max(rep.fd_doubling_shift, sh);
  }
  rep.fd_converged = rep.fd_doubling_shift <= 1e-4;
  rep.eigenvalues.resize(k);
  for (int j = 0; j < k; ++j)
    rep.eigenvalues[j] =
        refine_eigenvalue(p, *op.solution, op.ell, j, rep.fd_doubled[j], op.potential_shift);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  rep.min_abs = std::numeric_limits<double>::infinity();
  int jmin = 0;
  for (int j = 0; j < k; ++j)
    if (std::abs(rep.eigenvalues[j]) < rep.min_abs) {
      rep.min_abs = std::abs(rep.eigenvalues[j]);
      jmin = j;
    }
  const double tight = refine_eigenvalue(p, *op.solution, op.ell, jmin, rep.eigenvalues[jmin],
                                         op.potential_shift, 1e-12);
  rep.min_abs_uncertainty = std::abs(tight - rep.eigenvalues[jmin]);
  rep.resolved = rep.min_abs > 10.0 * rep.min_abs_uncertainty;
  return rep;
}

struct NondegeneracyReport {
  bool nondegenerate = false;
  double tol = 0.0;
  double min_abs = 0.0;
  std::vector<SpectrumReport> modes;
  bool monotone_in_ell = true;  ///< lowest eigenvalue increasing in ell
  std::string note;
};

/// True iff every computed eigenvalue of modes 0..ell_max stays at least tol away from 0.
/// Higher modes are controlled by the centrifugal term: their lowest eigenvalue exceeds
/// that of ell_max, which the report checks is increasing in ell.
inline NondegeneracyReport nondegeneracy_certificate(const Params& p,
                                                     std::shared_ptr<const RadialSolution> sol,
                                                     int ell_max, double tol = 1e-3,
                                                     int n_grid = 2048, int k = 3,
                                                     double potential_shift = 0.0) {
  if (ell_max < 2) throw DomainError("nondegeneracy_certificate: ell_max must be at least 2");
  NondegeneracyReport rep;
  rep.tol = tol;
  rep.min_abs = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= ell_max; ++l) {
    const ModeOperator op = build_mode_operator(p, sol, l, n_grid, potential_shift);
    rep.modes.push_back(spectrum(p, op, k));
    rep.min_abs = std::min(rep.min_abs, rep.modes.back().min_abs);
    if (l > 0 && !(rep.modes[l].eigenvalues[0] > rep.modes[l - 1].eigenvalues[0]))
      rep.monotone_in_ell = false;
  }
  rep.nondegenerate = rep.min_abs >= tol;
  rep.note = rep.monotone_in_ell
                 ? "lowest eigenvalue increases with ell; modes above ell_max are further from 0"
                 : "lowest eigenvalue not monotone in ell; modes above ell_max unchecked";
  return rep;
}

}  // namespace bnlab
