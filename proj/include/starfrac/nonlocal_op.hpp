// SPDX-License-Identifier: Apache-2.0
/**
 * Nonlocal operators of the killed stable process on a bounded domain.
 *
 * For interior x and 0 < alpha < 2, with d(x,sigma) the distance to the
 * boundary along the unit direction sigma and S(x) the star-shaped set of
 * points visible from x:
 *
 *   killing_rate(x)   = Gamma(alpha) * Int_{S^{d-1}} d(x,sigma)^(-alpha) dsigma
 *   star_fractional   = pf * PV Int_{S(x)} (phi(y)-phi(x)) |y-x|^(-d-alpha) dy
 *   generator         = -killing_rate * phi(x) + star_fractional
 *
 * with the default prefactor pf = Gamma(alpha+1).  The complement form
 * rewrites the generator as one principal-value integral over R^d with the
 * field cut off outside S(x); it must agree with `generator` identically
 * because pf / alpha = Gamma(alpha) recovers the killing rate.  The
 * restricted form cuts the field off outside the whole domain instead, which
 * differs on nonconvex domains where points are in the domain but hidden
 * from x.
 *
 * Angular integrals use a uniform trapezoid over n_dir directions (exactly
 * {+1,-1} in 1D).  Radial integrals are adaptive Gauss-Kronrod; the PV core
 * pairs antipodal directions so the integrand becomes a second difference
 * O(r^2) and the singularity r^(-1-alpha) integrates cleanly.  Identity
 * checks between the three forms share one direction set, so angular
 * discretization cancels exactly.
 */
#pragma once

#include "starfrac/equilibrium.hpp"
#include "starfrac/geometry.hpp"
#include "starfrac/test_function.hpp"

namespace starfrac {

struct OperatorParams {
  int n_dir = 512;          // even, >= 16; ignored in 1D
  double rel_tol = 1e-9;    // adaptive radial tolerance (relative)
  double abs_tol = 1e-13;   // adaptive radial tolerance (absolute)
  bool pv_pairing = true;   // antipodal pairing of the PV core
  enum class Prefactor { GammaAlphaPlusOne, Custom };
  Prefactor prefactor = Prefactor::GammaAlphaPlusOne;
  double custom_prefactor = 1.0;

  void validate(int dim) const;
  double jump_prefactor(double alpha) const;
};

/// Value together with an internal error estimate (angular subsampling plus
/// summed radial estimates).
struct EvalReport {
  double value = 0.0;
  double error_estimate = 0.0;
  long evals = 0;
};

/// Killing rate via the closed radial form Gamma(alpha) d^(-alpha).
double killing_rate(const DomainSpec& dom, const Vec2& x, double alpha,
                    const OperatorParams& params = {}, EvalReport* report = nullptr);

/// Killing rate with the radial factor Int_0^inf eta^(-1-alpha) e^(-d/eta) deta
/// evaluated numerically per direction; slow oracle path.
double killing_rate_direct(const DomainSpec& dom, const Vec2& x, double alpha,
                           const OperatorParams& params = {});

/// PV integral over the visible star set (no killing term).
double star_fractional(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                       double alpha, const OperatorParams& params = {},
                       EvalReport* report = nullptr);

/// -killing_rate(x) phi(x) + star_fractional(phi)(x).
double generator(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                 double alpha, const OperatorParams& params = {});

/// Kernel mass of the complement of the star set, radial integrals numeric
/// out to 8 d(x,sigma) with an analytic power tail beyond.
double complement_kernel_mass(const DomainSpec& dom, const Vec2& x, double alpha,
                              const OperatorParams& params = {});

/// Single-PV complement form of the generator; agrees with generator().
double generator_complement_form(const DomainSpec& dom, const TestFunction& phi,
                                 const Vec2& x, double alpha,
                                 const OperatorParams& params = {});

/// Restricted fractional Laplacian: field extended by zero outside the
/// domain (not outside the star set).  Rays that re-enter the domain pick
/// the hidden parts back up.
double frac_laplacian_restricted(const DomainSpec& dom, const TestFunction& phi,
                                 const Vec2& x, double alpha,
                                 const OperatorParams& params = {});

/// Damped ray average  Int_0^{r/eps} e^(-s) phi(x + eps s v, t) ds  with
/// r = free_path(x, v); the adjoint boundary-layer solution.
double adjoint_ray_average(const DomainSpec& dom, const TestFunction& phi,
                           const Vec2& x, const Vec2& v, double t, double eps);

/// adjoint_ray_average(...) - phi(x,t), evaluated without cancellation.
double adjoint_ray_diff(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                        const Vec2& v, double t, double eps);

/// eps^(-alpha) Int M(v) (chi_eps - phi)(x,v) dv at t = 0.  Converges to
/// tail_coefficient * generator as eps -> 0 at rate eps^(2-alpha)
/// (eps log(1/eps) at alpha = 1) for fixed interior x.  Warns on stderr when
/// the quadrature error estimate exceeds 1% of the value.
double adjoint_moment(const DomainSpec& dom, const TestFunction& phi, const Vec2& x,
                      double eps, const Equilibrium& eq,
                      const OperatorParams& params = {}, EvalReport* report = nullptr);

}  // namespace starfrac
