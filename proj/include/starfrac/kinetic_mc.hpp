// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "starfrac/equilibrium.hpp"
#include "starfrac/geometry.hpp"
#include "starfrac/grid.hpp"
#include "starfrac/initial_density.hpp"
#include "starfrac/rng.hpp"

namespace starfrac {

/// Particle Monte Carlo for the scaled relaxation model
///   eps^alpha d_t f + eps v . grad f = rho M - f
/// with absorption on exit.  In macroscopic time this is free flight at
/// velocity eps^(1-alpha) v, collision clock Exp(mean eps^alpha), and at
/// each collision the velocity is redrawn from the equilibrium; both follow
/// from dividing the equation by eps^alpha and reading off characteristics.
struct KineticRunConfig {
  double eps = 0.1;
  double alpha = 1.0;
  double T_final = 0.1;
  long n_particles = 1000;
  std::uint64_t seed = 1;
  InitialDensity initial = InitialDensity::uniform();
  std::vector<double> snapshot_times;

  void validate() const;
};

struct KineticParticle {
  Vec2 x, v;
  Vec2 x_anchor;          // flight start; x is recomputed from here so the
  double t_anchor = 0.0;  // path does not depend on where advance() stops
  double t_next = 0.0;    // absolute time of the pending collision
  double t_local = 0.0;   // absorption time once dead
  bool alive = true;
  Pcg32 rng;
};

struct KineticEnsemble {
  std::vector<KineticParticle> particles;
  double time = 0.0;
  long total_collisions = 0;

  double survival_mass() const;
};

KineticEnsemble init_ensemble(const KineticRunConfig& config, const DomainSpec& dom,
                              const Equilibrium& eq);

/// Advances every live particle to `until` (exact in-flight absorption, no
/// time-step bias).  Parallel over particles; per-particle streams make the
/// result independent of the schedule.
void advance(KineticEnsemble& ens, const DomainSpec& dom, const Equilibrium& eq,
             const KineticRunConfig& config, double until);

/// Histogram of live particles; integrates to the surviving fraction.
DensityField estimate_density(const KineticEnsemble& ens, const Grid& grid);

}  // namespace starfrac
