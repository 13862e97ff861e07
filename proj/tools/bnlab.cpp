// bnlab: command line front end. Subcommands constants, solve, sweep, verify, decompose,
// spectrum, branch. Flags override values from --config (a JSON object).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bnlab/bnlab.hpp"

using json = nlohmann::ordered_json;
using namespace bnlab;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kBadConfig = 2, kUnreachable = 3, kNumerical = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- options -------------------------------------------------------------------------

struct Flags {
  std::optional<int> n, points, jobs, ell_max, k, n_grid, quad_order;
  std::optional<double> q, eps, eps_tilde, eps_tilde_max, eps_tilde_min, tol, potential_shift,
      green_scale;
  std::optional<std::string> csv, out;
  std::string config;
  bool inject_green_fault = false;
  bool no_certificates = false;
};

struct Config {
  json file = json::object();
  const Flags* f = nullptr;

  template <class T>
  std::optional<T> get(const std::optional<T>& flag, const char* key) const {
    if (flag) return flag;
    if (file.contains(key)) {
      try {
        return file.at(key).get<T>();
      } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
      }
    }
    return std::nullopt;
  }
  template <class T>
  T get(const std::optional<T>& flag, const char* key, T fallback) const {
    return get(flag, key).value_or(fallback);
  }
};

void add_common(CLI::App* s, Flags& f) {
  s->add_option("--n", f.n, "dimension N (>= 3)");
  s->add_option("--q", f.q, "subcritical exponent q");
  s->add_option("--config", f.config, "JSON config file; flags take precedence");
  s->add_option("--out", f.out, "write the JSON document here instead of stdout");
}

void add_grid(CLI::App* s, Flags& f) {
  s->add_option("--eps-tilde-max", f.eps_tilde_max, "largest eps_tilde of the sweep grid");
  s->add_option("--eps-tilde-min", f.eps_tilde_min, "smallest eps_tilde of the sweep grid");
  s->add_option("--points", f.points, "number of log-spaced grid points");
  s->add_option("--jobs", f.jobs, "worker threads (default: hardware concurrency)");
}

void add_point(CLI::App* s, Flags& f) {
  s->add_option("--eps", f.eps, "target eps");
  s->add_option("--eps-tilde", f.eps_tilde, "height-normalized eps_tilde");
  s->add_option("--tol", f.tol, "relative tolerance on eps");
}

Config load(const Flags& f) {
  Config c;
  c.f = &f;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot open config file " + f.config);
    try {
      in >> c.file;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!c.file.is_object()) throw ConfigError("config file must hold a JSON object");
  }
  return c;
}

Params params(const Config& c, bool allow_branch_cell = false) {
  const int n = c.get(c.f->n, "n", 4);
  const double q = c.get(c.f->q, "q", 3.0);
  if (n < 3) throw ConfigError("N must be at least 3 (got N = " + std::to_string(n) + ")");
  if (!std::isfinite(q)) throw ConfigError("q must be finite");
  Params p(n, q);
  if (p.regime_ok) return p;
  if (allow_branch_cell && n == 3 && q > 2.0 && q <= 4.0) return p;
  throw ConfigError(p.regime_message());
}

std::vector<double> grid(const Config& c) {
  const double hi = c.get(c.f->eps_tilde_max, "eps_tilde_max", 1e-2);
  const double lo = c.get(c.f->eps_tilde_min, "eps_tilde_min", 1e-8);
  const int n = c.get(c.f->points, "points", 25);
  if (n < 6) throw ConfigError("a sweep needs at least 6 grid points");
  if (!(hi > lo && lo > 0.0)) throw ConfigError("need eps_tilde_max > eps_tilde_min > 0");
  return log_grid_decreasing(hi, lo, n);
}

unsigned jobs(const Config& c) {
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int j = c.get(c.f->jobs, "jobs", hw);
  if (j < 1) throw ConfigError("--jobs must be positive");
  return static_cast<unsigned>(j);
}

// ---- output --------------------------------------------------------------------------

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const Config& c, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (auto path = c.get(c.f->out, "out")) {
    std::ofstream o(*path, std::ios::binary);
    if (!o) throw ConfigError("cannot write " + *path);
    o << text;
  } else {
    std::cout << text;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw ConfigError("cannot write " + path);
  o << text;
}

json header(const char* command, const Params& p) {
  json j;
  j["schema_version"] = "1";
  j["command"] = command;
  j["n"] = p.N;
  j["q"] = p.q;
  return j;
}

json to_json(const FitReport& r) {
  json j;
  j["limit_estimate"] = r.limit_estimate;
  j["target"] = r.target;
  j["rel_error"] = r.rel_error;
  j["slope_estimate"] = r.slope_estimate;
  j["slope_target"] = r.slope_target;
  j["prefactor"] = r.prefactor;
  j["r_squared"] = r.r_squared;
  j["points_used"] = r.points_used;
  j["monotone_tail"] = r.monotone_tail;
  j["stable"] = r.stable;
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const RadialSolution& s) {
  json j;
  j["eps"] = s.eps;
  j["eps_tilde"] = s.eps_tilde;
  j["mu"] = s.mu;
  j["R_tilde"] = s.R_tilde;
  j["energy"] = s.energy;
  j["grad_sq"] = s.grad_sq;
  j["l2star_norm"] = s.l2star_norm;
  j["lq_norm_q"] = s.lq_norm_q;
  j["grad_deficit"] = s.grad_deficit;
  j["lstar_deficit"] = s.lstar_deficit;
  j["deficit"] = s.deficit;
  j["du_boundary"] = s.du_boundary;
  j["blowup_product"] = s.blowup_product();
  j["sobolev_quotient"] = s.sobolev_quotient();
  j["nehari_residual"] = s.nehari_residual;
  j["pohozaev_residual"] = s.pohozaev_residual;
  return j;
}

json to_json(const DecompositionResult& d) {
  json j;
  j["alpha"] = d.alpha;
  j["lambda"] = d.lambda;
  j["lambda_ratio"] = d.lambda_ratio;
  j["w_h1_norm"] = d.w_h1_norm;
  j["pu_h1_norm"] = d.pu_h1_norm;
  j["ortho_residuals"] = {d.ortho_residuals[0], d.ortho_residuals[1]};
  j["pythagoras_residual"] = d.pythagoras_residual;
  return j;
}

json to_json(const NondegeneracyReport& r) {
  json j;
  j["nondegenerate"] = r.nondegenerate;
  j["tol"] = r.tol;
  j["min_abs"] = r.min_abs;
  j["monotone_in_ell"] = r.monotone_in_ell;
  j["note"] = r.note;
  json modes = json::array();
  for (const auto& m : r.modes) {
    json mj;
    mj["ell"] = m.ell;
    mj["eigenvalues"] = m.eigenvalues;
    mj["min_abs"] = m.min_abs;
    mj["min_abs_uncertainty"] = m.min_abs_uncertainty;
    mj["resolved"] = m.resolved;
    mj["fd_eigenvalues"] = m.fd_eigenvalues;
    mj["fd_doubled"] = m.fd_doubled;
    mj["fd_doubling_shift"] = m.fd_doubling_shift;
    mj["fd_converged"] = m.fd_converged;
    modes.push_back(mj);
  }
  j["modes"] = modes;
  return j;
}

RadialSolution solve_point(const Params& p, const Config& c) {
  const auto eps = c.get(c.f->eps, "eps");
  const auto et = c.get(c.f->eps_tilde, "eps_tilde");
  if (eps.has_value() == et.has_value()) throw ConfigError("give exactly one of --eps and --eps-tilde");
  if (et) {
    if (!(*et > 0.0)) throw ConfigError("eps_tilde must be positive");
    const ShootResult s = shoot(p, *et, kDefaultRMax);
    if (!s.first_zero) throw UnreachableError("no zero crossing for this eps_tilde");
    return scale_to_unit_ball(p, s);
  }
  if (!(*eps > 0.0)) throw ConfigError("eps must be positive");
  return solve_for_eps(p, *eps, c.get(c.f->tol, "tol", 1e-10));
}

// ---- commands ------------------------------------------------------------------------

int cmd_constants(const Config& c) {
  const Params p = params(c);
  const ConstantSet k = constant_set(p);
  json j = header("constants", p);
  j["alpha_N"] = k.alpha_N;
  j["omega_N"] = k.omega_N;
  j["C_Nq"] = k.C_Nq;
  j["alpha_Nq"] = k.alpha_Nq;
  j["S_N2"] = k.sobolev_SN2;
  j["blowup_target"] = k.blowup_target;
  emit(c, j);
  return kOk;
}

int cmd_solve(const Config& c) {
  const Params p = params(c);
  const RadialSolution s = solve_point(p, c);
  std::string csv = "r,u,du\n";
  for (const auto& ps : s.profile) csv += num(ps.r) + "," + num(ps.u) + "," + num(ps.du) + "\n";
  write_file(c.get(c.f->csv, "csv", std::string("profile.csv")), csv);
  json j = header("solve", p);
  j["solution"] = to_json(s);
  j["profile_rows"] = s.profile.size();
  emit(c, j);
  return kOk;
}

int cmd_sweep(const Config& c) {
  const Params p = params(c);
  const auto g = grid(c);
  const unsigned nj = jobs(c);
  const auto recs = sweep(p, g, nj);
  const auto ok = successful(recs);

  std::string csv =
      "eps_tilde,eps,mu,R_tilde,S_eps,blowup_product,deficit,profile_dist,upper_bound_ratio,"
      "nehari_residual,pohozaev_residual\n";
  for (const auto* r : ok)
    csv += num(r->eps_tilde) + "," + num(r->eps) + "," + num(r->mu) + "," + num(r->R_tilde) + "," +
           num(r->S_eps) + "," + num(r->blowup_product) + "," + num(r->deficit) + "," +
           num(r->profile_dist) + "," + num(r->upper_bound_ratio) + "," + num(r->nehari_residual) +
           "," + num(r->pohozaev_residual) + "\n";
  write_file(c.get(c.f->csv, "csv", std::string("sweep.csv")), csv);

  json j = header("sweep", p);
  j["requested_points"] = g.size();
  j["successful_points"] = ok.size();
  json failures = json::array();
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (!recs[i].ok) failures.push_back({{"index", i}, {"eps_tilde", recs[i].eps_tilde}, {"error", recs[i].error}});
  j["failures"] = failures;

  auto guarded = [](auto&& fn) -> json {
    try {
      return fn();
    } catch (const std::exception& e) {
      return json{{"error", e.what()}};
    }
  };
  j["blowup_fit"] = guarded([&] { return to_json(blowup_rate_fit(p, recs)); });
  j["deficit_fit"] = guarded([&] { return to_json(deficit_rate_fit(p, recs)); });

  std::vector<std::optional<DecompositionResult>> dec(ok.size());
  std::vector<std::string> dec_err(ok.size());
  parallel_for(ok.size(), nj, [&](std::size_t i) {
    try {
      dec[i] = fit_decomposition(p, *ok[i]->solution);
    } catch (const std::exception& e) {
      dec_err[i] = e.what();
    }
  });
  json dj = json::array();
  std::vector<DecompositionResult> fits;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    json e = dec[i] ? to_json(*dec[i]) : json{{"error", dec_err[i]}};
    e["eps_tilde"] = ok[i]->eps_tilde;
    dj.push_back(e);
    if (dec[i]) fits.push_back(*dec[i]);
  }
  j["decomposition"] = {{"fit", guarded([&] { return to_json(perturbation_order_fit(p, fits)); })},
                        {"points", dj}};

  json bj = json::array();
  for (const auto* r : ok) bj.push_back({{"eps_tilde", r->eps_tilde}, {"deviation", r->boundary_deviation}});
  j["boundary_limit"] = {{"fit", guarded([&] { return to_json(boundary_green_limit(p, recs)); })},
                         {"points", bj}};

  if (!c.f->no_certificates && !c.get(std::optional<bool>{}, "no_certificates", false)) {
    const int ell_max = c.get(c.f->ell_max, "ell_max", 4);
    const int n_grid = c.get(c.f->n_grid, "n_grid", 2048);
    if (ell_max < 2) throw ConfigError("ell_max must be at least 2");
    if (n_grid < 256) throw ConfigError("n_grid must be at least 256");
    std::vector<json> cert(ok.size());
    parallel_for(ok.size(), nj, [&](std::size_t i) {
      cert[i] = guarded([&] { return to_json(nondegeneracy_certificate(p, ok[i]->solution, ell_max, 1e-3, n_grid)); });
      cert[i]["eps_tilde"] = ok[i]->eps_tilde;
    });
    j["nondegeneracy"] = cert;
  }
  emit(c, j);
  return 5 * ok.size() >= 4 * g.size() ? kOk : kNumerical;
}

struct Check {
  std::string name;
  double residual;
  double threshold;
};

int cmd_verify(const Config& c) {
  double scale = c.get(c.f->green_scale, "green_scale", 1.0);
  if (c.f->inject_green_fault) scale *= 1.01;
  const int order = c.get(c.f->quad_order, "quad_order", 64);
  if (order < 16) throw ConfigError("quad_order must be at least 16");
  constexpr double pi = std::numbers::pi;
  std::vector<Check> checks;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };

  {
    double m = 0.0;
    for (double x = 0.05; x < 40.0; x *= 1.3) m = std::max(m, rel(gamma_fn(x + 1.0), x * gamma_fn(x)));
    checks.push_back({"gamma_recurrence", m, 1e-12});
  }
  checks.push_back({"gamma_special_values",
                    std::max({rel(gamma_fn(0.5), std::sqrt(pi)), rel(gamma_fn(5.0), 24.0), rel(gamma_fn(1.0), 1.0)}),
                    1e-13});
  checks.push_back({"sphere_areas",
                    std::max({rel(omega_n(2), 2 * pi), rel(omega_n(3), 4 * pi), rel(omega_n(4), 2 * pi * pi),
                              rel(omega_n(5), 8 * pi * pi / 3)}),
                    1e-13});
  {
    double m = 0.0;
    for (auto [n, q] : {std::pair{4, 3.0}, {3, 5.0}, {5, 3.0}, {3, 4.5}, {6, 2.5}}) {
      const Params p(n, q);
      m = std::max(m, rel(c_nq(p), c_nq_quadrature(p)));
    }
    checks.push_back({"c_nq_gamma_vs_quadrature", m, 1e-8});
  }
  {
    double m = 0.0;
    for (int n = 3; n <= 7; ++n) m = std::max(m, rel(sobolev_sn2(n), sobolev_sn2_from_lstar(n)));
    checks.push_back({"sobolev_two_routes", m, 1e-6});
  }

  // everything below uses the (possibly perturbed) Green's function
  std::vector<std::pair<int, Point>> poles = {{3, Point{0.0, 0.0, 0.0}}, {3, Point{0.3, 0.0, 0.0}},
                                              {3, Point{0.2, -0.3, 0.25}}, {4, Point{0.0, 0.0, 0.0, 0.0}},
                                              {4, Point{0.3, 0.0, 0.15, 0.0}}};
  std::vector<double> worst(5, 0.0);
  std::vector<std::string> names(5);
  for (const auto& [n, y] : poles) {
    const auto rep = surface_identity_suite(BallGreen(n, 1.0, scale), y, order);
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
      names[i] = rep.checks[i].name;
      worst[i] = std::max(worst[i], rep.checks[i].rel_residual);
    }
  }
  for (std::size_t i = 0; i < 5; ++i) checks.push_back({"green_surface_" + names[i], worst[i], 1e-6});
  {
    const BallGreen g3(3, 1.0, scale), g4(4, 1.0, scale);
    checks.push_back({"robin_ball_formula",
                      std::max({rel(robin(g3, Point{0.0, 0.0, 0.0}), 1 / (4 * pi)),
                                rel(robin(g3, Point{0.5, 0.0, 0.0}), 1 / (3 * pi)),
                                rel(robin(g4, Point(4, 0.0)), 1 / (4 * pi * pi))}),
                      1e-13});
    double m = 0.0;
    for (const auto& pr : {std::pair{g3, Point{0.3, 0.0, 0.0}}, {g4, Point{0.2, 0.1, 0.0, 0.0}}}) {
      const auto [lhs, rhs] = green_representation_check(pr.first, pr.second, 48);
      m = std::max(m, rel(lhs, rhs));
    }
    checks.push_back({"green_representation", m, 1e-8});
    // regular part equals the singular part on the boundary, and G is symmetric
    double s = 0.0;
    const Point a{0.3, -0.2, 0.1}, b{-0.4, 0.1, 0.5}, z{0.0, 0.6, 0.8};
    s = std::max(s, rel(regular_part(g3, a, z), singular_part(g3, a, z)));
    s = std::max(s, rel(green(g3, a, b), green(g3, b, a)));
    checks.push_back({"green_boundary_and_symmetry", s, 1e-13});
    // bubble projection: lambda^{(N-2)/2} psi -> (N-2) omega_N H(a, x)
    const Point ctr{0.2, 0.0, 0.1}, x{-0.1, 0.3, 0.0};
    const double v = std::pow(1000.0, 0.5) * bubble_harmonic_part(Bubble(3, 1000.0, ctr), 1.0, x, 96);
    checks.push_back({"bubble_projection_limit", rel(v, omega_n(3) * regular_part(g3, ctr, x)), 1e-5});
  }
  {
    // bubble and kernel residuals by a Richardson-combined five-point Laplacian
    auto lap = [](auto&& f, const Point& x, double h) {
      auto one = [&](double s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          Point u = x, w = x;
          u[i] += s;
          w[i] -= s;
          acc += (f(u) - 2.0 * f(x) + f(w)) / (s * s);
        }
        return acc;
      };
      return (4.0 * one(0.5 * h) - one(h)) / 3.0;
    };
    double mb = 0.0, mk = 0.0;
    for (int n : {3, 4, 5}) {
      Point x(n);
      for (int i = 0; i < n; ++i) x[i] = 0.3 + 0.45 * i - 0.2 * (i % 2);
      const double U = eval_normalized(n, x);
      const double fu = std::pow(U, (n + 2.0) / (n - 2.0));
      const double lu = lap([&](const Point& z) { return eval_normalized(n, z); }, x, 1e-2);
      mb = std::max(mb, std::abs(-lu - fu) / (std::abs(lu) + fu));
      const double V = (n + 2.0) / (n - 2.0) * std::pow(U, 4.0 / (n - 2.0));
      for (int k = 0; k <= n; ++k) {
        const double psi = kernel_eval(n, k, x);
        const double lk = lap([&](const Point& z) { return kernel_eval(n, k, z); }, x, 1e-2);
        mk = std::max(mk, std::abs(-lk - V * psi) / (std::abs(lk) + std::abs(V * psi)));
      }
    }
    checks.push_back({"bubble_pde_residual", mb, 1e-6});
    checks.push_back({"kernel_pde_residual", mk, 1e-6});
  }
  {
    const Params p(4, 3.0);
    checks.push_back({"blowup_target_four_three", rel(constant_set(p).blowup_target, 24.0), 1e-10});
    const auto s = scale_to_unit_ball(p, shoot(p, 1e-4, kDefaultRMax));
    checks.push_back({"nehari_residual", s.nehari_residual, 1e-7});
    checks.push_back({"pohozaev_residual", s.pohozaev_residual, 1e-6});
  }

  json j;
  j["schema_version"] = "1";
  j["command"] = "verify";
  j["green_scale"] = scale;
  j["quad_order"] = order;
  json arr = json::array();
  bool all = true;
  for (const auto& ch : checks) {
    const bool pass = ch.residual <= ch.threshold;
    all = all && pass;
    arr.push_back({{"name", ch.name}, {"residual", ch.residual}, {"threshold", ch.threshold}, {"pass", pass}});
  }
  j["checks"] = arr;
  j["all_pass"] = all;
  emit(c, j);
  return all ? kOk : kVerifyFailed;
}

int cmd_decompose(const Config& c) {
  const Params p = params(c);
  json j = header("decompose", p);
  if (c.get(c.f->eps, "eps") || c.get(c.f->eps_tilde, "eps_tilde")) {
    const RadialSolution s = solve_point(p, c);
    j["eps"] = s.eps;
    j["eps_tilde"] = s.eps_tilde;
    j["decomposition"] = to_json(fit_decomposition(p, s));
    emit(c, j);
    return kOk;
  }
  const auto g = grid(c);
  const auto recs = sweep(p, g, jobs(c));
  const auto ok = successful(recs);
  std::vector<DecompositionResult> fits(ok.size());
  parallel_for(ok.size(), jobs(c), [&](std::size_t i) { fits[i] = fit_decomposition(p, *ok[i]->solution); });
  json pts = json::array();
  for (std::size_t i = 0; i < ok.size(); ++i) {
    json e = to_json(fits[i]);
    e["eps_tilde"] = ok[i]->eps_tilde;
    e["eps"] = ok[i]->eps;
    pts.push_back(e);
  }
  j["points"] = pts;
  j["fit"] = to_json(perturbation_order_fit(p, fits));
  emit(c, j);
  return kOk;
}

int cmd_spectrum(const Config& c) {
  const Params p = params(c);
  const auto s = std::make_shared<RadialSolution>(solve_point(p, c));
  const int ell_max = c.get(c.f->ell_max, "ell_max", 4);
  const int k = c.get(c.f->k, "k", 3);
  const int n_grid = c.get(c.f->n_grid, "n_grid", 2048);
  const double tol = c.get(c.f->tol, "tol", 1e-3);
  const double shift = c.get(c.f->potential_shift, "potential_shift", 0.0);
  if (ell_max < 2) throw ConfigError("ell_max must be at least 2");
  if (k < 2) throw ConfigError("k must be at least 2");
  if (n_grid < 256) throw ConfigError("n_grid must be at least 256");
  json j = header("spectrum", p);
  j["eps"] = s->eps;
  j["eps_tilde"] = s->eps_tilde;
  j["potential_shift"] = shift;
  j["certificate"] = to_json(nondegeneracy_certificate(p, s, ell_max, tol, n_grid, k, shift));
  emit(c, j);
  return kOk;
}

int cmd_branch(const Config& c) {
  const Params p = params(c, true);
  const double hi = c.get(c.f->eps_tilde_max, "eps_tilde_max", 1e2);
  const double lo = c.get(c.f->eps_tilde_min, "eps_tilde_min", 1e-10);
  const int n = c.get(c.f->points, "points", 41);
  if (n < 3) throw ConfigError("branch needs at least 3 grid points");
  if (!(hi > lo && lo > 0.0)) throw ConfigError("need eps_tilde_max > eps_tilde_min > 0");
  const BranchMap bm = branch_map(p, log_grid_decreasing(hi, lo, n));
  json j = header("branch", p);
  json t = json::array();
  for (const auto& b : bm.table)
    t.push_back({{"eps_tilde", b.eps_tilde}, {"R_tilde", b.R_tilde}, {"mu", b.mu}, {"eps", b.eps}});
  j["table"] = t;
  j["monotone"] = bm.monotone;
  j["has_fold"] = bm.has_fold;
  j["eps0"] = bm.eps0;
  j["mu_at_eps0"] = bm.mu_at_eps0;
  j["probe_eps"] = bm.probe_eps;
  j["probe_mus"] = bm.probe_mus;
  emit(c, j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical-exponent equation with a subcritical term on the unit ball: solver and verification lab"};
  app.require_subcommand(1);
  Flags f;

  auto* constants = app.add_subcommand("constants", "closed-form constants for (N, q)");
  add_common(constants, f);

  auto* solve = app.add_subcommand("solve", "one solution: profile CSV and diagnostics JSON");
  add_common(solve, f);
  add_point(solve, f);
  solve->add_option("--csv", f.csv, "profile CSV path (default profile.csv)");

  auto* sw = app.add_subcommand("sweep", "eps_tilde sweep: records CSV and fits JSON");
  add_common(sw, f);
  add_grid(sw, f);
  sw->add_option("--csv", f.csv, "records CSV path (default sweep.csv)");
  sw->add_option("--ell-max", f.ell_max, "highest spherical-harmonic mode for certificates");
  sw->add_option("--n-grid", f.n_grid, "radial grid size for the mode operators");
  sw->add_flag("--no-certificates", f.no_certificates, "skip the nondegeneracy certificates");

  auto* verify = app.add_subcommand("verify", "identity suites; exit 1 on any failure");
  verify->add_option("--config", f.config, "JSON config file");
  verify->add_option("--out", f.out, "write the JSON report here instead of stdout");
  verify->add_option("--green-scale", f.green_scale, "multiply the Green's function constant");
  verify->add_flag("--inject-green-fault", f.inject_green_fault, "perturb the Green's constant by 1%");
  verify->add_option("--quad-order", f.quad_order, "surface quadrature order (>= 16)");

  auto* dec = app.add_subcommand("decompose", "bubble plus perturbation decomposition");
  add_common(dec, f);
  add_point(dec, f);
  add_grid(dec, f);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "mode spectra and nondegeneracy certificate");
  add_common(spectrum_cmd, f);
  add_point(spectrum_cmd, f);
  spectrum_cmd->add_option("--ell-max", f.ell_max, "highest spherical-harmonic mode (>= 2)");
  spectrum_cmd->add_option("--k", f.k, "eigenvalues per mode (>= 2)");
  spectrum_cmd->add_option("--n-grid", f.n_grid, "radial grid size (>= 256)");
  spectrum_cmd->add_option("--potential-shift", f.potential_shift, "constant added to the potential");

  auto* branch = app.add_subcommand("branch", "eps against mu along an eps_tilde grid");
  add_common(branch, f);
  branch->add_option("--eps-tilde-max", f.eps_tilde_max, "largest eps_tilde");
  branch->add_option("--eps-tilde-min", f.eps_tilde_min, "smallest eps_tilde");
  branch->add_option("--points", f.points, "number of grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadConfig;
  }

  try {
    const Config c = load(f);
    if (*constants) return cmd_constants(c);
    if (*solve) return cmd_solve(c);
    if (*sw) return cmd_sweep(c);
    if (*verify) return cmd_verify(c);
    if (*dec) return cmd_decompose(c);
    if (*spectrum_cmd) return cmd_spectrum(c);
    if (*branch) return cmd_branch(c);
  } catch (const ConfigError& e) {
    std::cerr << "bnlab: invalid configuration: " << e.what() << "\n";
    return kBadConfig;
  } catch (const UnreachableError& e) {
    std::cerr << "bnlab: unreachable target: " << e.what() << "\n";
    return kUnreachable;
  } catch (const DomainError& e) {
    std::cerr << "bnlab: invalid configuration: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "bnlab: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kBadConfig;
}
