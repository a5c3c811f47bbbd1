// SPDX-License-Identifier: Apache-2.0
#include "starfrac/kinetic_mc.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace starfrac {

void KineticRunConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha in (0,2)");
  if (!(T_final >= 0.0)) throw std::invalid_argument("T_final must be >= 0");
  if (n_particles < 1) throw std::invalid_argument("n_particles >= 1");
  for (double t : snapshot_times)
    if (t < 0.0 || t > T_final)
      throw std::invalid_argument("snapshot_times must lie in [0, T_final]");
}

double KineticEnsemble::survival_mass() const {
  if (particles.empty()) return 0.0;
  long alive = 0;
  for (const auto& p : particles)
    if (p.alive) ++alive;
  return static_cast<double>(alive) / static_cast<double>(particles.size());
}

KineticEnsemble init_ensemble(const KineticRunConfig& config, const DomainSpec& dom,
                              const Equilibrium& eq) {
  config.validate();
  const double mean_wait = std::pow(config.eps, config.alpha);
  KineticEnsemble ens;
  ens.particles.resize(config.n_particles);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < config.n_particles; ++i) {
    KineticParticle& p = ens.particles[i];
    p.rng = Pcg32::for_stream(config.seed, static_cast<std::uint64_t>(i));
    p.x = config.initial.sample(p.rng, dom);
    p.v = eq.sample(p.rng);
    p.x_anchor = p.x;
    p.t_anchor = 0.0;
    p.t_next = p.rng.exponential(mean_wait);
    p.alive = true;
    p.t_local = 0.0;
  }
  return ens;
}

void advance(KineticEnsemble& ens, const DomainSpec& dom, const Equilibrium& eq,
             const KineticRunConfig& config, double until) {
  if (until < ens.time) throw std::invalid_argument("cannot advance backwards");
  if (until == ens.time) return;
  const double speed_scale = std::pow(config.eps, 1.0 - config.alpha);
  const double mean_wait = std::pow(config.eps, config.alpha);
  long collisions = 0;

#pragma omp parallel for schedule(static) reduction(+ : collisions)
  for (long i = 0; i < static_cast<long>(ens.particles.size()); ++i) {
    KineticParticle& p = ens.particles[i];
    if (!p.alive) continue;
    while (true) {
      const bool collides = p.t_next <= until;
      const double t_stop = collides ? p.t_next : until;
      const double speed = p.v.norm();
      if (speed > 0.0) {
        // exit test over the whole flight leg, measured from the anchor
        const double t_exit =
            p.t_anchor + dom.free_path(p.x_anchor, p.v) / speed_scale;
        if (t_exit <= t_stop) {
          p.x = dom.ray_exit(p.x_anchor, (1.0 / speed) * p.v).point;
          p.alive = false;
          p.t_local = t_exit;
          break;
        }
        p.x = p.x_anchor + (speed_scale * (t_stop - p.t_anchor)) * p.v;
        if (!dom.contains(p.x)) {
          // Landed in the boundary tolerance skin; absorb there.
          p.alive = false;
          p.t_local = t_stop;
          break;
        }
      }
      if (!collides) break;
      p.v = eq.sample(p.rng);
      ++collisions;
      p.x_anchor = p.x;
      p.t_anchor = t_stop;
      p.t_next = t_stop + p.rng.exponential(mean_wait);
      if (t_stop >= until) break;
    }
  }
  ens.total_collisions += collisions;
  ens.time = until;
}

DensityField estimate_density(const KineticEnsemble& ens, const Grid& grid) {
  std::vector<Vec2> alive;
  alive.reserve(ens.particles.size());
  for (const auto& p : ens.particles)
    if (p.alive) alive.push_back(p.x);
  DensityField f = deposit_positions(grid, alive, ens.particles.size());
  f.time = ens.time;
  return f;
}

}  // namespace starfrac
