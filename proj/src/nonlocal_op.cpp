// SPDX-License-Identifier: Apache-2.0
#include "starfrac/nonlocal_op.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "starfrac/quadrature.hpp"

namespace starfrac {

namespace {

/// Uniform antipodally symmetric direction set: sigma[j + half] == -sigma[j].
struct DirSet {
  std::vector<Vec2> sigma;
  double weight = 1.0;
  int half = 1;
  int n() const { return static_cast<int>(sigma.size()); }
};

DirSet make_dirs(int dim, int n_dir) {
  DirSet ds;
  if (dim == 1) {
    ds.sigma = {{1.0, 0.0}, {-1.0, 0.0}};
    ds.weight = 1.0;
    ds.half = 1;
    return ds;
  }
  ds.sigma.resize(n_dir);
  for (int j = 0; j < n_dir; ++j) {
    const double theta = 2.0 * M_PI * (j + 0.5) / n_dir;
    ds.sigma[j] = {std::cos(theta), std::sin(theta)};
  }
  ds.weight = 2.0 * M_PI / n_dir;
  ds.half = n_dir / 2;
  return ds;
}

std::vector<double> exit_distances(const DomainSpec& dom, const Vec2& x,
                                   const DirSet& ds) {
  std::vector<double> d(ds.n());
  for (int j = 0; j < ds.n(); ++j) d[j] = dom.ray_exit(x, ds.sigma[j]).distance;
  return d;
}

/// |sum over all directions - sum over every other direction|, an angular
/// resolution estimate.  Zero in 1D where the direction set is exact.
double angular_estimate(const std::vector<double>& contrib, double weight) {
  const int n = static_cast<int>(contrib.size());
  if (n <= 2) return 0.0;
  double full = 0.0, sub = 0.0;
  for (int j = 0; j < n; ++j) {
    full += weight * contrib[j];
    if (j % 2 == 0) sub += 2.0 * weight * contrib[j];
  }
  return std::abs(full - sub);
}

/// PV core over (0, rho0) for one antipodal pair: the second difference
/// divided by r^2 is flattened by the substitution r = rho0 u^(1/(2-alpha)),
/// with an exact Hessian value below the cancellation radius.
double pv_pair_core(const TestFunction& phi, const Vec2& x, const Vec2& sigma,
                    double rho0, double alpha, const OperatorParams& par,
                    double* err, long* evals) {
  const double phix = phi.value(x);
  const double hdir = phi.second_directional(x, sigma);
  const double r_c = 1e-4 * rho0;
  const double pexp = 1.0 / (2.0 - alpha);
  const double scale = std::pow(rho0, 2.0 - alpha) * pexp;
  auto integrand = [&](double u) {
    const double r = rho0 * std::pow(u, pexp);
    if (r <= r_c) return hdir;
    const double d2 =
        phi.value(x + r * sigma) + phi.value(x - r * sigma) - 2.0 * phix;
    return d2 / (r * r);
  };
  const QuadResult q = gk15_adaptive(integrand, 0.0, 1.0, par.rel_tol, par.abs_tol);
  if (err) *err += scale * q.error;
  if (evals) *evals += q.evals;
  return scale * q.value;
}

/// One-sided core over (0, rho0) for a single direction.  The gradient
/// moment below r_f is dropped, so this is meaningful only when phi is even
/// about x (or alpha < 1); the paired core is the default for a reason.
double one_sided_core(const TestFunction& phi, const Vec2& x, const Vec2& sigma,
                      double rho0, double alpha, const OperatorParams& par,
                      double* err, long* evals) {
  const double phix = phi.value(x);
  const double r_f = 1e-7 * rho0;
  const double hess_piece = 0.5 * phi.second_directional(x, sigma) *
                            std::pow(r_f, 2.0 - alpha) / (2.0 - alpha);
  auto integrand = [&](double r) {
    return (phi.value(x + r * sigma) - phix) * std::pow(r, -1.0 - alpha);
  };
  const QuadResult q = gk15_adaptive(integrand, r_f, rho0, par.rel_tol, par.abs_tol);
  if (err) *err += q.error;
  if (evals) *evals += q.evals;
  return hess_piece + q.value;
}

double min_of(const std::vector<double>& v) {
  double m = v.front();
  for (double t : v) m = std::min(m, t);
  return m;
}

}  // namespace

void OperatorParams::validate(int dim) const {
  if (dim == 2 && (n_dir < 16 || n_dir % 2 != 0))
    throw std::invalid_argument("n_dir must be even and >= 16");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("quadrature tolerances must be positive");
}

double OperatorParams::jump_prefactor(double alpha) const {
  return prefactor == Prefactor::GammaAlphaPlusOne ? std::tgamma(alpha + 1.0)
                                                   : custom_prefactor;
}

double killing_rate(const DomainSpec& dom, const Vec2& x, double alpha,
                    const OperatorParams& params, EvalReport* report) {
  params.validate(dom.dim());
  const DirSet ds = make_dirs(dom.dim(), params.n_dir);
  const std::vector<double> dist = exit_distances(dom, x, ds);
  std::vector<double> contrib(ds.n());
  for (int j = 0; j < ds.n(); ++j) contrib[j] = std::pow(dist[j], -alpha);
  double sum = 0.0;
  for (double c : contrib) sum += c;
  const double value = std::tgamma(alpha) * ds.weight * sum;
  if (report) {
    report->value = value;
    report->error_estimate = std::tgamma(alpha) * angular_estimate(contrib, ds.weight);
    report->evals = ds.n();
  }
  return value;
}

double killing_rate_direct(const DomainSpec& dom, const Vec2& x, double alpha,
                           const OperatorParams& params) {
  params.validate(dom.dim());
  const DirSet ds = make_dirs(dom.dim(), params.n_dir);
  const std::vector<double> dist = exit_distances(dom, x, ds);
  double sum = 0.0;
  for (int j = 0; j < ds.n(); ++j) {
    // Int_0^inf eta^(-1-alpha) e^(-d/eta) deta = Int_0^inf t^(alpha-1) e^(-d t) dt,
    // flattened by z = t^alpha so the rule sees a bounded smooth integrand.
    const double d = dist[j];
    const double zmax = std::pow(45.0 / d, alpha);
    auto integrand = [&](double z) { return std::exp(-d * std::pow(z, 1.0 / alpha)); };
    sum += gk15_adaptive(integrand, 0.0, zmax, params.rel_tol, params.abs_tol).value /
           alpha;
  }
  return ds.weight * sum;
}

double star_fractional(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                       double alpha, const OperatorParams& params,
                       EvalReport* report) {
  params.validate(dom.dim());
  const DirSet ds = make_dirs(dom.dim(), params.n_dir);
  const std::vector<double> dist = exit_distances(dom, x, ds);
  const double rho0 = std::min(dom.boundary_distance(x), min_of(dist));
  const double phix = phi.value(x);

  double rad_err = 0.0;
  long evals = 0;
  std::vector<double> contrib(ds.n(), 0.0);  // per-direction, core split evenly
  for (int p = 0; p < ds.half; ++p) {
    double core;
    if (params.pv_pairing) {
      core = pv_pair_core(phi, x, ds.sigma[p], rho0, alpha, params, &rad_err, &evals);
    } else {
      core = one_sided_core(phi, x, ds.sigma[p], rho0, alpha, params, &rad_err,
                            &evals) +
             one_sided_core(phi, x, ds.sigma[p + ds.half], rho0, alpha, params,
                            &rad_err, &evals);
    }
    contrib[p] += 0.5 * core;
    contrib[p + ds.half] += 0.5 * core;
  }
  for (int j = 0; j < ds.n(); ++j) {
    auto integrand = [&](double r) {
      return (phi.value(x + r * ds.sigma[j]) - phix) * std::pow(r, -1.0 - alpha);
    };
    const QuadResult q =
        gk15_adaptive(integrand, rho0, dist[j], params.rel_tol, params.abs_tol);
    contrib[j] += q.value;
    rad_err += q.error;
    evals += q.evals;
  }
  double sum = 0.0;
  for (double c : contrib) sum += c;
  const double pf = params.jump_prefactor(alpha);
  if (report) {
    report->value = pf * ds.weight * sum;
    report->error_estimate =
        pf * (ds.weight * rad_err + angular_estimate(contrib, ds.weight));
    report->evals = evals;
  }
  return pf * ds.weight * sum;
}

double generator(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                 double alpha, const OperatorParams& params) {
  return -killing_rate(dom, x, alpha, params) * phi.value(x) +
         star_fractional(dom, phi, x, alpha, params);
}

double complement_kernel_mass(const DomainSpec& dom, const Vec2& x, double alpha,
                              const OperatorParams& params) {
  params.validate(dom.dim());
  const DirSet ds = make_dirs(dom.dim(), params.n_dir);
  const std::vector<double> dist = exit_distances(dom, x, ds);
  double sum = 0.0;
  for (int j = 0; j < ds.n(); ++j) {
    const double d = dist[j];
    const double rc = 8.0 * d;
    auto kernel = [&](double r) { return std::pow(r, -1.0 - alpha); };
    sum += gk15_adaptive(kernel, d, rc, params.rel_tol, params.abs_tol).value +
           std::pow(rc, -alpha) / alpha;
  }
  return ds.weight * sum;
}

double generator_complement_form(const DomainSpec& dom, const TestFunction& phi,
                                 const Vec2& x, double alpha,
                                 const OperatorParams& params) {
  const double star = star_fractional(dom, phi, x, alpha, params);
  const double pf = params.jump_prefactor(alpha);
  return star - pf * phi.value(x) * complement_kernel_mass(dom, x, alpha, params);
}

double frac_laplacian_restricted(const DomainSpec& dom, const TestFunction& phi,
                                 const Vec2& x, double alpha,
                                 const OperatorParams& params) {
  params.validate(dom.dim());
  const DirSet ds = make_dirs(dom.dim(), params.n_dir);
  std::vector<std::vector<double>> crossings(ds.n());
  std::vector<double> first(ds.n());
  for (int j = 0; j < ds.n(); ++j) {
    crossings[j] = dom.ray_crossings(x, ds.sigma[j]);
    first[j] = crossings[j].front();
  }
  const double rho0 = std::min(dom.boundary_distance(x), min_of(first));
  const double phix = phi.value(x);

  double sum = 0.0;
  for (int p = 0; p < ds.half; ++p)
    sum += pv_pair_core(phi, x, ds.sigma[p], rho0, alpha, params, nullptr, nullptr);

  for (int j = 0; j < ds.n(); ++j) {
    const Vec2 sigma = ds.sigma[j];
    auto diff_integrand = [&](double r) {
      return (phi.value(x + r * sigma) - phix) * std::pow(r, -1.0 - alpha);
    };
    const auto& ts = crossings[j];
    sum += gk15_adaptive(diff_integrand, rho0, ts[0], params.rel_tol, params.abs_tol)
               .value;
    // Segments between crossings classified by their midpoint; the final
    // unbounded segment is outside because the domain is bounded.
    for (size_t k = 0; k + 1 < ts.size(); ++k) {
      const double a = ts[k], b = ts[k + 1];
      if (b - a <= 1e-9 * (1.0 + b)) continue;
      if (dom.contains(x + (0.5 * (a + b)) * sigma)) {
        sum +=
            gk15_adaptive(diff_integrand, a, b, params.rel_tol, params.abs_tol).value;
      } else {
        sum += -phix * (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
      }
    }
    sum += -phix * std::pow(ts.back(), -alpha) / alpha;
  }
  return params.jump_prefactor(alpha) * ds.weight * sum;
}

double adjoint_ray_average(const DomainSpec& dom, const TestFunction& phi,
                           const Vec2& x, const Vec2& v, double t, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double L = dom.free_path(x, v) / eps;
  const double phix = phi.value(x);
  const double smax = std::min(L, 45.0);
  auto integrand = [&](double s) {
    return std::exp(-s) * (phi.value(x + (eps * s) * v) - phix);
  };
  const double tail_avg =
      gk15_adaptive(integrand, 0.0, smax, 1e-10, 1e-14).value;
  return phi.time_weight(t) * (phix * (-std::expm1(-L)) + tail_avg);
}

double adjoint_ray_diff(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                        const Vec2& v, double t, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double L = dom.free_path(x, v) / eps;
  const double phix = phi.value(x);
  const double smax = std::min(L, 45.0);
  auto integrand = [&](double s) {
    return std::exp(-s) * (phi.value(x + (eps * s) * v) - phix);
  };
  const double tail_avg =
      gk15_adaptive(integrand, 0.0, smax, 1e-10, 1e-14).value;
  return phi.time_weight(t) * (-phix * std::exp(-L) + tail_avg);
}

double adjoint_moment(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                      double eps, const Equilibrium& eq, const OperatorParams& params,
                      EvalReport* report) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (eq.dim() != dom.dim())
    throw std::invalid_argument("equilibrium dimension must match the domain");
  const double alpha = eq.alpha();
  params.validate(dom.dim());
  const DirSet ds = make_dirs(dom.dim(), params.n_dir);
  const std::vector<double> dist = exit_distances(dom, x, ds);
  const double phix = phi.value(x);

  double rad_err = 0.0;
  long evals = 0;
  std::vector<double> contrib(ds.n(), 0.0);

  // Slow velocities |v| <= 1: plateau density, smooth in the speed u.
  const double eps_pow = std::pow(eps, -alpha);
  for (int p = 0; p < ds.half; ++p) {
    const Vec2 sp = ds.sigma[p];
    const Vec2 sm = ds.sigma[p + ds.half];
    auto integrand = [&](double u) {
      const double shell = dom.dim() == 1 ? 1.0 : u;
      return shell * (adjoint_ray_diff(dom, phi, x, u * sp, 0.0, eps) +
                      adjoint_ray_diff(dom, phi, x, u * sm, 0.0, eps));
    };
    const double inner = eq.plateau() * eps_pow * gauss_panels(integrand, 0.0, 1.0, 4, 12);
    contrib[p] += 0.5 * inner;
    contrib[p + ds.half] += 0.5 * inner;
    evals += 48;
  }

  // Fast velocities |v| > 1 after w = eps v: radial eta from eps upward.
  // Boundary-layer term, per direction:
  //   -phi(x) Int_eps^inf eta^(-1-alpha) e^(-d/eta) deta
  //     = -phi(x) d^(-alpha) Gamma(alpha) P(alpha, d/eps).
  const double C = eq.tail_coefficient();
  for (int j = 0; j < ds.n(); ++j)
    contrib[j] += -C * phix * std::pow(dist[j], -alpha) * std::tgamma(alpha) *
                  boost::math::gamma_p(alpha, dist[j] / eps);

  // Difference term, antipodally paired and mapped by eta = 1/t so the
  // integral lives on (0, 1/eps].
  for (int p = 0; p < ds.half; ++p) {
    const Vec2 sp = ds.sigma[p];
    const Vec2 sm = ds.sigma[p + ds.half];
    const double dp = dist[p];
    const double dm = dist[p + ds.half];
    auto ray_diff = [&](const Vec2& sigma, double d, double eta) {
      const double smax = std::min(d / eta, 45.0);
      auto g = [&](double s) {
        return std::exp(-s) * (phi.value(x + (s * eta) * sigma) - phix);
      };
      const QuadResult q = gk15_adaptive(g, 0.0, smax, 1e-10, 1e-14);
      return q.value;
    };
    auto integrand = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double eta = 1.0 / t;
      return std::pow(t, alpha - 1.0) *
             (ray_diff(sp, dp, eta) + ray_diff(sm, dm, eta));
    };
    const QuadResult q =
        gk15_adaptive(integrand, 0.0, 1.0 / eps, 1e-8, 1e-12);
    contrib[p] += 0.5 * C * q.value;
    contrib[p + ds.half] += 0.5 * C * q.value;
    rad_err += C * q.error;
    evals += q.evals;
  }

  double sum = 0.0;
  for (double c : contrib) sum += c;
  const double value = ds.weight * sum;
  const double est = ds.weight * rad_err + angular_estimate(contrib, ds.weight);
  if (report) {
    report->value = value;
    report->error_estimate = est;
    report->evals = evals;
  }
  if (est > 0.01 * std::abs(value) && std::abs(value) > 0.0)
    std::cerr << "adjoint_moment: quadrature error estimate " << est
              << " exceeds 1% of value " << value << "\n";
  return value;
}

}  // namespace starfrac
