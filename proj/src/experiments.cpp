// SPDX-License-Identifier: Apache-2.0
#include "starfrac/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "starfrac/equilibrium.hpp"
#include "starfrac/grid_solver.hpp"
#include "starfrac/jump_mc.hpp"
#include "starfrac/kinetic_mc.hpp"
#include "starfrac/nonlocal_op.hpp"
#include "starfrac/quadrature.hpp"
#include "starfrac/rng.hpp"
#include "starfrac/snapshot.hpp"
#include "starfrac/stats.hpp"

namespace starfrac {

namespace {

using nlohmann::json;

Vec2 vec_from(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 2)
    throw std::runtime_error("expected a point as [x] or [x,y]");
  return {j.at(0).get<double>(), j.size() > 1 ? j.at(1).get<double>() : 0.0};
}

DomainSpec lshape_domain() {
  return DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

std::uint64_t seed_of(const json& cfg) {
  return cfg.value("seed", static_cast<std::uint64_t>(20260814));
}

Vec2 sample_interior(const DomainSpec& dom, Pcg32& rng, double min_delta) {
  const Vec2 lo = dom.box_lo(), hi = dom.box_hi();
  for (int k = 0; k < 1000000; ++k) {
    Vec2 p{lo.x + rng.u01() * (hi.x - lo.x), 0.0};
    if (dom.dim() == 2) p.y = lo.y + rng.u01() * (hi.y - lo.y);
    if (dom.contains(p) && dom.boundary_distance(p) >= min_delta) return p;
  }
  throw std::runtime_error("could not sample an interior point");
}

/// Relative gap with a scale-aware floor so sign-cancellation points do not
/// inflate the metric.
double rel_gap(double a, double b, double floor_scale) {
  const double d = std::abs(a - b);
  if (d == 0.0) return 0.0;
  return d / std::max({std::abs(a), std::abs(b), floor_scale, 1e-300});
}

TestFunction default_phi(const DomainSpec& dom) {
  switch (dom.dim()) {
    case 1:
      return TestFunction::interval_bump(
          0.5 * (dom.interval_a() + dom.interval_b()),
          0.5 * (dom.interval_b() - dom.interval_a()));
    default:
      if (dom.kind() == DomainSpec::Kind::Disk)
        return TestFunction::disk_bump(dom.disk_center(), dom.disk_radius());
      // Suited to the default L-shape; explicit configs override this.
      return TestFunction::compact_bump({0.5, 0.5}, 0.45);
  }
}

OperatorParams op_params_from(const json& cfg, int default_n_dir = 512) {
  OperatorParams p;
  p.n_dir = cfg.value("n_dir", default_n_dir);
  return p;
}

DomainSpec domain_or_default(const json& cfg) {
  if (cfg.contains("domain")) return domain_from_json(cfg.at("domain"));
  return DomainSpec::interval(-1.0, 1.0);
}

std::vector<DensityField> snapshots_from_trajectory(const EvolveResult& traj,
                                                    const std::vector<double>& times) {
  std::vector<DensityField> out;
  for (double t : times) {
    size_t best = 0;
    for (size_t k = 1; k < traj.times.size(); ++k)
      if (std::abs(traj.times[k] - t) < std::abs(traj.times[best] - t)) best = k;
    out.push_back(traj.fields[best]);
    out.back().time = traj.times[best];
  }
  return out;
}

// ---------------------------------------------------------------------------
// operator-identity: the killed generator against its complement form.

bool run_operator_identity(const json& cfg, const std::string& out, json& mx) {
  const DomainSpec dom = domain_or_default(cfg);
  const auto alphas = cfg.value("alphas", std::vector<double>{0.5, 1.0, 1.5});
  const int n_points = cfg.value("n_points", 100);
  const double tol = cfg.value("tol_rel", 1e-6);
  const double min_delta = cfg.value("min_boundary_distance", 0.02);
  const OperatorParams params = op_params_from(cfg);
  const TestFunction phi = cfg.contains("phi") ? test_function_from_json(cfg["phi"])
                                               : default_phi(dom);

  Pcg32 rng = Pcg32::for_stream(seed_of(cfg), 7);
  std::vector<Vec2> points(n_points);
  for (auto& p : points) p = sample_interior(dom, rng, min_delta);

  std::vector<std::vector<double>> rows;
  double max_rel = 0.0;
  for (double alpha : alphas) {
    for (const Vec2& p : points) {
      const double gen = generator(dom, phi, p, alpha, params);
      const double com = generator_complement_form(dom, phi, p, alpha, params);
      const double kill = killing_rate(dom, p, alpha, params);
      const double phix = phi.value(p);
      const double floor_scale =
          1e-3 * (kill * std::abs(phix) + std::abs(gen + kill * phix));
      const double rel = rel_gap(gen, com, floor_scale);
      max_rel = std::max(max_rel, rel);
      rows.push_back({p.x, p.y, alpha, gen, com, rel});
    }
  }
  write_table_csv(out + "/operator_identity.csv",
                  {"x", "y", "alpha", "generator", "complement_form", "rel_err"},
                  rows);
  mx["max_rel_err"] = max_rel;
  mx["tol_rel"] = tol;
  mx["n_points"] = n_points;
  return max_rel <= tol;
}

// ---------------------------------------------------------------------------
// convex-vs-nonconvex: restricted form equals the generator on a convex
// domain; a bump hidden behind a reflex corner separates them.

bool run_convex_vs_nonconvex(const json& cfg, const std::string& out, json& mx) {
  const DomainSpec convex = cfg.contains("domain")
                                ? domain_from_json(cfg.at("domain"))
                                : DomainSpec::disk({0, 0}, 1.0);
  const DomainSpec nonconvex = cfg.contains("domain_b")
                                   ? domain_from_json(cfg.at("domain_b"))
                                   : lshape_domain();
  const auto alphas = cfg.value("alphas", std::vector<double>{0.5, 1.0, 1.5});
  const int n_points = cfg.value("n_points", 20);
  const double tol = cfg.value("tol_rel", 1e-6);
  const double min_rel_diff = cfg.value("min_rel_diff", 0.05);
  const OperatorParams params = op_params_from(cfg);
  const TestFunction phi_convex = cfg.contains("phi")
                                      ? test_function_from_json(cfg["phi"])
                                      : default_phi(convex);

  Pcg32 rng = Pcg32::for_stream(seed_of(cfg), 11);
  std::vector<std::vector<double>> rows;
  double max_rel = 0.0;
  for (double alpha : alphas) {
    for (int i = 0; i < n_points; ++i) {
      const Vec2 p = sample_interior(convex, rng, 0.05);
      const double gen = generator(convex, phi_convex, p, alpha, params);
      const double res = frac_laplacian_restricted(convex, phi_convex, p, alpha,
                                                   params);
      const double kill = killing_rate(convex, p, alpha, params);
      const double phix = phi_convex.value(p);
      const double floor_scale =
          1e-3 * (kill * std::abs(phix) + std::abs(gen + kill * phix));
      const double rel = rel_gap(gen, res, floor_scale);
      max_rel = std::max(max_rel, rel);
      rows.push_back({p.x, p.y, alpha, gen, res, rel});
    }
  }
  write_table_csv(out + "/convex_equivalence.csv",
                  {"x", "y", "alpha", "generator", "restricted_form", "rel_err"},
                  rows);

  const Vec2 hx = cfg.contains("hidden_point") ? vec_from(cfg["hidden_point"])
                                               : Vec2{1.8, 0.5};
  const Vec2 bc = cfg.contains("bump_center") ? vec_from(cfg["bump_center"])
                                              : Vec2{0.5, 1.8};
  const double br = cfg.value("bump_radius", 0.15);
  const double alpha_hidden = cfg.value("alpha_hidden", 1.0);
  const TestFunction bump = TestFunction::compact_bump(bc, br);
  const double gen_h = generator(nonconvex, bump, hx, alpha_hidden, params);
  const double res_h =
      frac_laplacian_restricted(nonconvex, bump, hx, alpha_hidden, params);
  const double rel_diff =
      std::abs(gen_h - res_h) / std::max({std::abs(gen_h), std::abs(res_h), 1e-300});

  mx["convex_max_rel_err"] = max_rel;
  mx["tol_rel"] = tol;
  mx["hidden_generator"] = gen_h;
  mx["hidden_restricted"] = res_h;
  mx["hidden_rel_diff"] = rel_diff;
  mx["min_rel_diff"] = min_rel_diff;
  return max_rel <= tol && rel_diff >= min_rel_diff;
}

// ---------------------------------------------------------------------------
// h-alpha-bound: radial reduction vs direct quadrature, closed forms, and
// the boundary blow-up bound  h(x) delta(x)^alpha <= Gamma(alpha) |S^(d-1)|.

bool run_h_alpha_bound(const json& cfg, const std::string& out, json& mx) {
  const DomainSpec dom = cfg.contains("domain") ? domain_from_json(cfg.at("domain"))
                                                : DomainSpec::disk({0, 0}, 1.0);
  const auto alphas = cfg.value("alphas", std::vector<double>{0.5, 1.0, 1.5});
  const int n_points = cfg.value("n_points", 10);
  const double tol_reduction = cfg.value("tol_reduction", 1e-4);
  const double tol_closed = cfg.value("tol_closed", 1e-8);
  const int k_min = cfg.value("k_min", 1), k_max = cfg.value("k_max", 12);
  const OperatorParams params = op_params_from(cfg);
  bool pass = true;

  {
    // Closed forms on reference domains.
    const DomainSpec iv = DomainSpec::interval(-1.0, 1.0);
    const double h_iv = killing_rate(iv, {0, 0}, 1.0, params);
    const double h_iv_direct = killing_rate_direct(iv, {0, 0}, 1.0, params);
    mx["interval_center_rel_err"] = rel_gap(h_iv, 2.0, 0.0);
    mx["interval_center_direct_rel_err"] = rel_gap(h_iv_direct, 2.0, 0.0);
    pass = pass && rel_gap(h_iv, 2.0, 0.0) <= tol_closed &&
           rel_gap(h_iv_direct, 2.0, 0.0) <= tol_closed;
    const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
    double worst = 0.0;
    for (double alpha : alphas) {
      const double closed = 2.0 * M_PI * std::tgamma(alpha);
      worst = std::max(worst, rel_gap(killing_rate(dk, {0, 0}, alpha, params),
                                      closed, 0.0));
      worst = std::max(worst, rel_gap(killing_rate_direct(dk, {0, 0}, alpha, params),
                                      closed, 0.0));
    }
    mx["disk_center_max_rel_err"] = worst;
    pass = pass && worst <= tol_closed;
  }

  {
    // Radial reduction vs direct quadrature at random interior points.
    Pcg32 rng = Pcg32::for_stream(seed_of(cfg), 13);
    double worst = 0.0;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n_points; ++i) {
      const Vec2 p = sample_interior(dom, rng, 0.05);
      for (double alpha : alphas) {
        const double h_r = killing_rate(dom, p, alpha, params);
        const double h_d = killing_rate_direct(dom, p, alpha, params);
        const double rel = rel_gap(h_r, h_d, 0.0);
        worst = std::max(worst, rel);
        rows.push_back({p.x, p.y, alpha, h_r, h_d, rel});
      }
    }
    write_table_csv(out + "/reduction_check.csv",
                    {"x", "y", "alpha", "radial", "direct", "rel_err"}, rows);
    mx["reduction_max_rel_err"] = worst;
    mx["tol_reduction"] = tol_reduction;
    pass = pass && worst <= tol_reduction;
  }

  {
    // Boundary approach along an inward line with delta = 2^-k.
    Vec2 base, inward;
    if (cfg.contains("approach")) {
      base = vec_from(cfg["approach"].at("base"));
      inward = vec_from(cfg["approach"].at("inward"));
    } else if (dom.kind() == DomainSpec::Kind::Disk) {
      base = dom.disk_center() + Vec2{dom.disk_radius(), 0.0};
      inward = {-1.0, 0.0};
    } else if (dom.kind() == DomainSpec::Kind::Interval) {
      base = {dom.interval_b(), 0.0};
      inward = {-1.0, 0.0};
    } else {
      base = {0.5, 0.0};
      inward = {0.0, 1.0};
    }
    const double inorm = inward.norm();
    inward = (1.0 / inorm) * inward;
    const double bound_const =
        Equilibrium::sphere_measure(dom.dim());
    std::vector<std::vector<double>> rows;
    double geom_err = 0.0;
    json sups = json::object();
    for (double alpha : alphas) {
      double sup = 0.0;
      const double bound = std::tgamma(alpha) * bound_const;
      for (int k = k_min; k <= k_max; ++k) {
        const double delta = std::ldexp(1.0, -k);
        const Vec2 p = base + delta * inward;
        geom_err = std::max(geom_err,
                            std::abs(dom.boundary_distance(p) - delta) / delta);
        const double h = killing_rate(dom, p, alpha, params);
        const double ratio = h * std::pow(delta, alpha);
        sup = std::max(sup, ratio);
        rows.push_back({alpha, static_cast<double>(k), delta, h, ratio, bound});
      }
      sups[format_g17(alpha)] = {{"sup", sup}, {"bound", bound}};
      pass = pass && sup <= bound * (1.0 + 1e-9);
    }
    write_table_csv(out + "/boundary_approach.csv",
                    {"alpha", "k", "delta", "h_alpha", "ratio", "bound"}, rows);
    mx["approach_geometry_rel_err"] = geom_err;
    mx["boundary_ratio"] = sups;
    pass = pass && geom_err <= 1e-9;
  }
  return pass;
}

// ---------------------------------------------------------------------------
// adjoint-moments: the scaled adjoint moment converges to the tail
// coefficient times the generator; plus the adjoint L2 norm bound.

bool run_adjoint_moments(const json& cfg, const std::string& out, json& mx) {
  const DomainSpec dom = domain_or_default(cfg);
  const int dim = dom.dim();
  const Vec2 x = cfg.contains("point")
                     ? vec_from(cfg["point"])
                     : (dim == 1 ? Vec2{0.3, 0.0} : Vec2{0.25, 0.15});
  const TestFunction phi = cfg.contains("phi") ? test_function_from_json(cfg["phi"])
                                               : default_phi(dom);
  const OperatorParams params = op_params_from(cfg, dim == 1 ? 2 : 128);
  const int k_min = cfg.value("k_min", 3), k_max = cfg.value("k_max", 9);
  const double band = cfg.value("rate_band", 0.3);
  const double c_growth = cfg.value("log_c_growth", 1.25);
  bool pass = true;
  std::vector<std::vector<double>> rows;

  auto sweep = [&](double alpha, std::vector<double>& eps_v,
                   std::vector<double>& err_v) {
    const Equilibrium eq(dim, alpha, Equilibrium::Mode::Normalized);
    const double ref = eq.tail_coefficient() * generator(dom, phi, x, alpha, params);
    for (int k = k_min; k <= k_max; ++k) {
      const double eps = std::ldexp(1.0, -k);
      const double m = adjoint_moment(dom, phi, x, eps, eq, params);
      eps_v.push_back(eps);
      err_v.push_back(std::abs(m - ref));
      rows.push_back({alpha, eps, m, ref, err_v.back()});
    }
  };

  if (cfg.value("rate_mode", true)) {
    const auto alphas = cfg.value("alphas_rate", std::vector<double>{0.5, 1.5});
    json fits = json::object();
    for (double alpha : alphas) {
      std::vector<double> eps_v, err_v, lx, ly;
      sweep(alpha, eps_v, err_v);
      for (size_t i = 0; i < eps_v.size(); ++i) {
        lx.push_back(std::log2(eps_v[i]));
        ly.push_back(std::log2(std::max(err_v[i], 1e-300)));
      }
      const LineFit fit = fit_line(lx, ly);
      fits[format_g17(alpha)] = {{"order", fit.slope},
                                 {"expected", 2.0 - alpha},
                                 {"band", band}};
      pass = pass && std::abs(fit.slope - (2.0 - alpha)) <= band;
    }
    mx["fitted_orders"] = fits;
  }

  if (cfg.value("log_mode", true)) {
    const double alpha = cfg.value("alpha_log", 1.0);
    std::vector<double> eps_v, err_v;
    sweep(alpha, eps_v, err_v);
    bool monotone = true, stable = true;
    std::vector<double> c_v;
    for (size_t i = 0; i < eps_v.size(); ++i) {
      c_v.push_back(err_v[i] / (eps_v[i] * std::log(1.0 / eps_v[i])));
      if (i > 0 && err_v[i] >= err_v[i - 1]) monotone = false;
      if (i > 0 && c_v[i] > c_growth * c_v[i - 1]) stable = false;
    }
    mx["log_monotone"] = monotone;
    mx["log_c_first"] = c_v.front();
    mx["log_c_last"] = c_v.back();
    mx["log_c_stable"] = stable;
    pass = pass && monotone && stable;
  }

  if (!rows.empty())
    write_table_csv(out + "/moment_convergence.csv",
                    {"alpha", "eps", "moment", "reference", "abs_err"}, rows);

  if (cfg.contains("norm_bound") && cfg["norm_bound"].value("enabled", false)) {
    const json& nb = cfg["norm_bound"];
    if (dim != 1)
      throw std::runtime_error("the adjoint norm bound check is 1D only");
    const double alpha = nb.value("alpha", 1.0);
    const auto eps_list = nb.value("eps_list", std::vector<double>{0.5, 0.1, 0.02});
    const Equilibrium eq(1, alpha, Equilibrium::Mode::Normalized);
    std::vector<TestFunction> phis;
    if (nb.contains("phis"))
      for (const auto& pj : nb["phis"]) phis.push_back(test_function_from_json(pj));
    else {
      phis.push_back(default_phi(dom));
      phis.push_back(TestFunction::compact_bump(
          {0.5 * (dom.interval_a() + dom.interval_b()), 0.0},
          0.4 * (dom.interval_b() - dom.interval_a())));
    }
    const double a_lo = dom.interval_a(), a_hi = dom.interval_b();
    std::vector<std::vector<double>> nrows;
    bool ok = true;
    for (size_t pi = 0; pi < phis.size(); ++pi) {
      const TestFunction& f = phis[pi];
      const double rhs2 = gauss_panels(
          [&](double s) { const double v = f.value({s, 0.0}); return v * v; },
          a_lo, a_hi, 24, 12);
      for (double eps : eps_list) {
        auto chi_at = [&](double sx, double v) {
          const double c =
              adjoint_ray_average(dom, f, {sx, 0.0}, {v, 0.0}, 0.0, eps);
          return c * c;
        };
        // Plateau speeds first, then the tail mapped by v = 1/t so the
        // integration range stays finite.
        auto x_integrand = [&](double sx) {
          const double plateau = gauss_panels(
              [&](double u) { return chi_at(sx, u) + chi_at(sx, -u); }, 0.0, 1.0,
              6, 10);
          const double tail = gauss_panels(
              [&](double t) {
                return std::pow(t, alpha - 1.0) *
                       (chi_at(sx, 1.0 / t) + chi_at(sx, -1.0 / t));
              },
              0.0, 1.0, 8, 10);
          return eq.plateau() * plateau + eq.tail_coefficient() * tail;
        };
        const double lhs2 = gauss_panels(x_integrand, a_lo, a_hi, 24, 12);
        const double lhs = std::sqrt(std::max(lhs2, 0.0));
        const double rhs = std::sqrt(std::max(rhs2, 0.0));
        nrows.push_back({static_cast<double>(pi), eps, lhs, rhs});
        ok = ok && lhs <= rhs * (1.0 + 1e-9);
      }
    }
    write_table_csv(out + "/norm_bound.csv", {"phi_index", "eps", "lhs", "rhs"},
                    nrows);
    mx["norm_bound_ok"] = ok;
    pass = pass && ok;
  }
  return pass;
}

// ---------------------------------------------------------------------------
// kinetic-sweep: particle densities against the limit equation, plus the
// solver structure checks (positivity, L2 decay, weak-residual refinement).

bool run_kinetic_sweep(const json& cfg, const std::string& out, json& mx) {
  const DomainSpec dom = domain_or_default(cfg);
  const double alpha = cfg.value("alpha", 1.0);
  const double T = cfg.value("T", 0.1);
  const int cells = cfg.value("grid_cells", 200);
  const Grid grid = make_grid(dom, cells, cfg.value("grid_cells_y", 0));
  const InitialDensity init =
      cfg.contains("initial")
          ? initial_from_json(cfg.at("initial"), &grid)
          : InitialDensity::gaussian_truncated({0, 0}, 0.3);
  const Equilibrium eq(dom.dim(), alpha, Equilibrium::Mode::Normalized);
  bool pass = true;

  SolverParams sp;
  sp.scale = cfg.value("pde_scale", eq.tail_coefficient());
  sp.n_dir = cfg.value("solver_n_dir", 64);
  const OperatorMatrix mat = assemble(dom, grid, alpha, sp);
  const double dt = 0.45 / mat.max_abs_diag;
  const DensityField rho_in = initial_field(init, grid);
  const EvolveResult traj = evolve(rho_in, grid, mat, T, dt);
  pass = pass && traj.positivity_ok && traj.l2_monotone && traj.mass_monotone;
  mx["pde"] = {{"dt", dt},
               {"steps", traj.times.size() - 1},
               {"positivity_ok", traj.positivity_ok},
               {"l2_monotone", traj.l2_monotone},
               {"mass_monotone", traj.mass_monotone},
               {"final_mass", traj.mass.back()},
               {"nnz", mat.nnz()},
               {"n_dir", mat.n_dir},
               {"radial_nodes", mat.radial_nodes},
               {"max_abs_diag", mat.max_abs_diag}};
  const std::vector<double> snap_times = cfg.value("snapshot_times",
                                                   std::vector<double>{T});
  write_density_csv(out + "/pde_density.csv", grid,
                    snapshots_from_trajectory(traj, snap_times));

  if (cfg.value("sweep_mode", true)) {
    const auto eps_list =
        cfg.value("eps_list", std::vector<double>{0.4, 0.2, 0.1, 0.05});
    const long n_particles = cfg.value("n_particles", 100000L);
    const double l1_tol = cfg.value("l1_tol", 0.1);
    const double slack = cfg.value("monotone_slack", 0.005);
    const DensityField& pde_final = traj.fields.back();
    std::vector<std::vector<double>> rows;
    std::vector<double> l1s;
    json survival = json::array();
    for (size_t k = 0; k < eps_list.size(); ++k) {
      KineticRunConfig kc;
      kc.eps = eps_list[k];
      kc.alpha = alpha;
      kc.T_final = T;
      kc.n_particles = n_particles;
      kc.seed = seed_of(cfg);  // common random numbers across the sweep
      kc.initial = init;
      kc.snapshot_times = snap_times;
      KineticEnsemble ens = init_ensemble(kc, dom, eq);
      std::vector<DensityField> snaps;
      json surv_k = json::array();
      for (double st : snap_times) {
        advance(ens, dom, eq, kc, st);
        snaps.push_back(estimate_density(ens, grid));
        surv_k.push_back(ens.survival_mass());
      }
      advance(ens, dom, eq, kc, T);
      const DensityField rho_mc = estimate_density(ens, grid);
      const double l1 = l1_distance(grid, rho_mc, pde_final);
      l1s.push_back(l1);
      rows.push_back({kc.eps, l1, ens.survival_mass()});
      survival.push_back({{"eps", kc.eps}, {"survival", surv_k}});
      write_density_csv(out + "/kinetic_eps" + std::to_string(k) + ".csv", grid,
                        snaps);
    }
    write_table_csv(out + "/kinetic_sweep.csv", {"eps", "l1_vs_pde", "survival"},
                    rows);
    bool monotone = true;
    for (size_t k = 1; k < l1s.size(); ++k)
      if (l1s[k] > l1s[k - 1] + slack) monotone = false;
    mx["sweep"] = {{"l1", l1s},
                   {"l1_tol", l1_tol},
                   {"monotone", monotone},
                   {"survival", survival}};
    pass = pass && monotone && l1s.back() <= l1_tol;
  }

  if (cfg.contains("residual_refinement") &&
      cfg["residual_refinement"].value("enabled", false)) {
    const json& rr = cfg["residual_refinement"];
    const int cells_c = rr.value("cells_coarse", 100);
    const int cells_f = rr.value("cells_fine", 2 * cells_c);
    const double factor = rr.value("factor", 1.5);
    const TestFunction phi = rr.contains("phi")
                                 ? test_function_from_json(rr["phi"])
                                 : default_phi(dom);
    SolverParams sp1 = sp;
    sp1.scale = rr.value("scale", 1.0);
    const OperatorParams opp = op_params_from(cfg, 64);

    const Grid gc = make_grid(dom, cells_c);
    const Grid gf = make_grid(dom, cells_f);
    const OperatorMatrix mc = assemble(dom, gc, alpha, sp1);
    const OperatorMatrix mf = assemble(dom, gf, alpha, sp1);
    const double dt_c = std::min(0.45 / mc.max_abs_diag, 0.9 / mf.max_abs_diag);
    const double dt_f = 0.5 * dt_c;
    const EvolveResult tc = evolve(initial_field(init, gc), gc, mc, T, dt_c);
    const EvolveResult tf = evolve(initial_field(init, gf), gf, mf, T, dt_f);
    const double res_c = weak_residual(tc, gc, dom, phi, alpha, sp1.scale, opp);
    const double res_f = weak_residual(tf, gf, dom, phi, alpha, sp1.scale, opp);
    const bool flags = tc.positivity_ok && tc.l2_monotone && tf.positivity_ok &&
                       tf.l2_monotone;
    mx["residual"] = {{"coarse", res_c},
                      {"fine", res_f},
                      {"ratio", res_c / std::max(res_f, 1e-300)},
                      {"required_factor", factor},
                      {"flags_ok", flags}};
    pass = pass && flags && res_f * factor <= res_c;
  }
  return pass;
}

// ---------------------------------------------------------------------------
// jump-vs-pde: the truncated jump process against the limit equation, and
// the empirical kill hazard against the killing rate.

bool run_jump_vs_pde(const json& cfg, const std::string& out, json& mx) {
  const DomainSpec dom = domain_or_default(cfg);
  const double alpha = cfg.value("alpha", 1.0);
  const double T = cfg.value("T", 0.1);
  const int cells = cfg.value("grid_cells", 200);
  const Grid grid = make_grid(dom, cells, cfg.value("grid_cells_y", 0));
  const InitialDensity init =
      cfg.contains("initial")
          ? initial_from_json(cfg.at("initial"), &grid)
          : InitialDensity::gaussian_truncated({0, 0}, 0.3);
  bool pass = true;

  if (cfg.value("density_mode", true)) {
    SolverParams sp;
    sp.scale = 1.0;
    sp.n_dir = cfg.value("solver_n_dir", 64);
    const OperatorMatrix mat = assemble(dom, grid, alpha, sp);
    const double dt = 0.45 / mat.max_abs_diag;
    const EvolveResult traj = evolve(initial_field(init, grid), grid, mat, T, dt);
    pass = pass && traj.positivity_ok && traj.l2_monotone && traj.mass_monotone;

    JumpRunConfig jc;
    jc.alpha = alpha;
    jc.r_min = cfg.value("r_min", 1e-3);
    jc.T_final = T;
    jc.n_particles = cfg.value("n_particles", 100000L);
    jc.seed = seed_of(cfg);
    jc.initial = init;
    JumpEnsemble ens = init_ensemble(jc, dom);
    advance(ens, dom, jc, T);
    const DensityField rho_mc = estimate_density(ens, grid);
    const double l1 = l1_distance(grid, rho_mc, traj.fields.back());
    const double l1_tol = cfg.value("l1_tol", 0.05);
    write_density_csv(out + "/jump_density.csv", grid, {rho_mc});
    write_density_csv(out + "/pde_density.csv", grid, {traj.fields.back()});
    mx["density"] = {{"l1", l1},
                     {"l1_tol", l1_tol},
                     {"survival", ens.survival_mass()},
                     {"pde_final_mass", traj.mass.back()},
                     {"dt", dt}};
    pass = pass && l1 <= l1_tol;
  }

  if (cfg.value("hazard_mode", true)) {
    const json hz = cfg.value("hazard", json::object());
    const Vec2 x = hz.contains("x") ? vec_from(hz["x"]) : Vec2{0.0, 0.0};
    const auto r_list = hz.value("r_list", std::vector<double>{0.1, 0.01, 0.001});
    const long n_trials = hz.value("n_trials", 1000000L);
    const OperatorParams params = op_params_from(cfg);
    const double h_ref = killing_rate(dom, x, alpha, params);
    std::vector<std::vector<double>> rows;
    std::vector<HazardEstimate> ests;
    bool in_band = true;
    for (size_t i = 0; i < r_list.size(); ++i) {
      const HazardEstimate est = empirical_kill_hazard(
          dom, x, alpha, r_list[i], n_trials, seed_of(cfg) + 101 + i);
      ests.push_back(est);
      rows.push_back({r_list[i], est.hazard, est.sigma, h_ref});
      if (std::abs(est.hazard - h_ref) > 3.0 * est.sigma) in_band = false;
    }
    const bool upward =
        ests.back().hazard >=
        ests.front().hazard -
            3.0 * std::hypot(ests.back().sigma, ests.front().sigma);
    write_table_csv(out + "/kill_hazard.csv",
                    {"r_min", "hazard", "sigma", "h_alpha"}, rows);
    mx["hazard"] = {{"h_alpha", h_ref}, {"in_band", in_band}, {"upward", upward}};
    pass = pass && in_band && upward;
  }
  return pass;
}

// ---------------------------------------------------------------------------
// sampler-tests: KS goodness of fit for the speed law and the mass identity.

bool run_sampler_tests(const json& cfg, const std::string& out, json& mx) {
  const auto alphas = cfg.value("alphas", std::vector<double>{0.5, 1.0, 1.5});
  const auto dims = cfg.value("dims", std::vector<int>{1, 2});
  const long n = cfg.value("n_samples", 100000L);
  const double significance = cfg.value("ks_significance", 0.01);
  const double mass_tol = cfg.value("mass_tol", 1e-8);
  bool pass = true;
  std::vector<std::vector<double>> rows;
  int combo = 0;
  for (int d : dims) {
    for (double alpha : alphas) {
      const Equilibrium eq(d, alpha, Equilibrium::Mode::Normalized);
      Pcg32 rng = Pcg32::for_stream(seed_of(cfg), 500 + combo);
      std::vector<double> speeds(n);
      long inside = 0;
      for (long i = 0; i < n; ++i) {
        speeds[i] = eq.sample(rng).norm();
        if (speeds[i] < 1.0) ++inside;
      }
      const double ks =
          ks_statistic(speeds, [&](double s) { return eq.speed_cdf(s); });
      const double crit = ks_critical(n, significance);

      const double sphere = Equilibrium::sphere_measure(d);
      const double cut = 1e6;
      auto inner_f = [&](double s) {
        return eq.plateau() * std::pow(s, static_cast<double>(d - 1));
      };
      auto tail_f = [&](double s) {
        return eq.tail_coefficient() * std::pow(s, -1.0 - alpha);
      };
      const double mass =
          sphere * (gk15_adaptive(inner_f, 0.0, 1.0, 1e-12, 1e-15).value +
                    gk15_adaptive(tail_f, 1.0, cut, 1e-12, 1e-15, 20000).value +
                    eq.tail_coefficient() * std::pow(cut, -alpha) / alpha);
      const double mass_err = std::abs(mass - 1.0);
      const double p_emp = static_cast<double>(inside) / n;
      const double p_sig =
          std::sqrt(eq.inner_probability() * (1.0 - eq.inner_probability()) / n);
      rows.push_back({static_cast<double>(d), alpha, ks, crit, mass_err, p_emp,
                      eq.inner_probability(), p_sig});
      pass = pass && ks <= crit && mass_err <= mass_tol;
      ++combo;
    }
  }
  write_table_csv(out + "/sampler_tests.csv",
                  {"dim", "alpha", "ks_stat", "ks_crit", "mass_err", "p_in_emp",
                   "p_in", "p_in_sigma"},
                  rows);
  mx["all_ks_pass"] = pass;
  mx["mass_tol"] = mass_tol;
  return pass;
}

}  // namespace

DomainSpec domain_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval")
    return DomainSpec::interval(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "disk")
    return DomainSpec::disk(vec_from(j.at("center")), j.at("radius").get<double>());
  if (kind == "polygon") {
    std::vector<Vec2> verts;
    for (const auto& vj : j.at("vertices")) verts.push_back(vec_from(vj));
    return DomainSpec::polygon(std::move(verts));
  }
  if (kind == "polygon_file")
    return DomainSpec::polygon_from_file(j.at("path").get<std::string>());
  if (kind == "lshape") return lshape_domain();
  throw std::invalid_argument("unknown domain kind: " + kind);
}

TestFunction test_function_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval_bump")
    return TestFunction::interval_bump(j.at("mid").get<double>(),
                                       j.at("halfwidth").get<double>());
  if (kind == "disk_bump")
    return TestFunction::disk_bump(vec_from(j.at("center")),
                                   j.at("radius").get<double>());
  if (kind == "compact_bump")
    return TestFunction::compact_bump(vec_from(j.at("center")),
                                      j.at("radius").get<double>());
  if (kind == "flat_top")
    return TestFunction::flat_top(vec_from(j.at("center")),
                                  j.at("r_in").get<double>(),
                                  j.at("r_out").get<double>());
  throw std::invalid_argument("unknown test function kind: " + kind);
}

InitialDensity initial_from_json(const json& j, const Grid* grid) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return InitialDensity::uniform();
  if (kind == "uniform_box")
    return InitialDensity::uniform_box(vec_from(j.at("lo")), vec_from(j.at("hi")));
  if (kind == "gaussian")
    return InitialDensity::gaussian_truncated(vec_from(j.at("center")),
                                              j.at("sigma").get<double>());
  if (kind == "grid_table") {
    if (!grid) throw std::invalid_argument("grid_table initial density needs a grid");
    return InitialDensity::grid_table(*grid,
                                      j.at("weights").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown initial density kind: " + kind);
}

ExperimentOutcome run_experiment(const json& config, const std::string& out_dir) {
  const std::string name = config.at("experiment").get<std::string>();
  std::filesystem::create_directories(out_dir);
  const auto t0 = std::chrono::steady_clock::now();

  json metrics = json::object();
  bool pass = false;
  if (name == "operator-identity")
    pass = run_operator_identity(config, out_dir, metrics);
  else if (name == "convex-vs-nonconvex")
    pass = run_convex_vs_nonconvex(config, out_dir, metrics);
  else if (name == "h-alpha-bound")
    pass = run_h_alpha_bound(config, out_dir, metrics);
  else if (name == "adjoint-moments")
    pass = run_adjoint_moments(config, out_dir, metrics);
  else if (name == "kinetic-sweep")
    pass = run_kinetic_sweep(config, out_dir, metrics);
  else if (name == "jump-vs-pde")
    pass = run_jump_vs_pde(config, out_dir, metrics);
  else if (name == "sampler-tests")
    pass = run_sampler_tests(config, out_dir, metrics);
  else
    throw std::invalid_argument("unknown experiment: " + name);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ExperimentOutcome outcome;
  outcome.pass = pass;
  outcome.summary = {{"experiment", name},
                     {"config", config},
                     {"metrics", metrics},
                     {"pass", pass},
                     {"wall_time_s", wall}};
  const char* proc = nullptr;
  if (name == "kinetic-sweep") proc = "kinetic";
  if (name == "jump-vs-pde") proc = "jump";
  if (proc) outcome.summary["process"] = proc;
  write_json_file(out_dir + "/summary.json", outcome.summary);
  return outcome;
}

}  // namespace starfrac
