// SPDX-License-Identifier: Apache-2.0
#include "starfrac/jump_mc.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "starfrac/equilibrium.hpp"

namespace starfrac {

void JumpRunConfig::validate(const DomainSpec& dom) const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha in (0,2)");
  if (!(r_min > 0.0)) throw std::invalid_argument("r_min must be positive");
  if (!(T_final >= 0.0)) throw std::invalid_argument("T_final must be >= 0");
  if (n_particles < 1) throw std::invalid_argument("n_particles >= 1");
  for (double t : snapshot_times)
    if (t < 0.0 || t > T_final)
      throw std::invalid_argument("snapshot_times must lie in [0, T_final]");
  if (r_min >= dom.inradius() / 10.0)
    std::cerr << "jump_mc: r_min " << r_min
              << " is large relative to the domain (inradius " << dom.inradius()
              << "); truncation bias may dominate\n";
}

double JumpEnsemble::survival_mass() const {
  if (particles.empty()) return 0.0;
  long alive = 0;
  for (const auto& p : particles)
    if (p.alive) ++alive;
  return static_cast<double>(alive) / static_cast<double>(particles.size());
}

double event_rate(double alpha, double r_min, int dim) {
  return std::tgamma(alpha) * Equilibrium::sphere_measure(dim) *
         std::pow(r_min, -alpha);
}

Vec2 sample_jump(Pcg32& rng, double alpha, double r_min, int dim) {
  const double r = r_min * std::pow(1.0 - rng.u01(), -1.0 / alpha);
  if (dim == 1) return {rng.u01() < 0.5 ? -r : r, 0.0};
  const double theta = 2.0 * M_PI * rng.u01();
  return {r * std::cos(theta), r * std::sin(theta)};
}

JumpEnsemble init_ensemble(const JumpRunConfig& config, const DomainSpec& dom) {
  config.validate(dom);
  const double mean_wait =
      1.0 / event_rate(config.alpha, config.r_min, dom.dim());
  JumpEnsemble ens;
  ens.particles.resize(config.n_particles);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < config.n_particles; ++i) {
    JumpParticle& p = ens.particles[i];
    p.rng = Pcg32::for_stream(config.seed, static_cast<std::uint64_t>(i));
    p.x = config.initial.sample(p.rng, dom);
    p.t_next = p.rng.exponential(mean_wait);
    p.alive = true;
    p.t_local = 0.0;
  }
  return ens;
}

void advance(JumpEnsemble& ens, const DomainSpec& dom, const JumpRunConfig& config,
             double until) {
  if (until < ens.time) throw std::invalid_argument("cannot advance backwards");
  if (until == ens.time) return;
  const int dim = dom.dim();
  const double mean_wait = 1.0 / event_rate(config.alpha, config.r_min, dim);

#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(ens.particles.size()); ++i) {
    JumpParticle& p = ens.particles[i];
    if (!p.alive) continue;
    while (p.t_next <= until) {
      const double t_event = p.t_next;
      p.t_next = t_event + p.rng.exponential(mean_wait);
      const Vec2 w = sample_jump(p.rng, config.alpha, config.r_min, dim);
      if (dom.segment_inside(p.x, p.x + w)) {
        p.x = p.x + w;
      } else {
        p.alive = false;
        p.t_local = t_event;
        break;
      }
    }
  }
  ens.time = until;
}

DensityField estimate_density(const JumpEnsemble& ens, const Grid& grid) {
  std::vector<Vec2> alive;
  alive.reserve(ens.particles.size());
  for (const auto& p : ens.particles)
    if (p.alive) alive.push_back(p.x);
  DensityField f = deposit_positions(grid, alive, ens.particles.size());
  f.time = ens.time;
  return f;
}

HazardEstimate empirical_kill_hazard(const DomainSpec& dom, const Vec2& x,
                                     double alpha, double r_min, long n_trials,
                                     std::uint64_t seed) {
  if (!dom.contains(x))
    throw std::invalid_argument("hazard estimate needs an interior point");
  if (n_trials < 1) throw std::invalid_argument("n_trials >= 1");
  const int dim = dom.dim();
  long kills = 0;
#pragma omp parallel for schedule(static) reduction(+ : kills)
  for (long i = 0; i < n_trials; ++i) {
    Pcg32 rng = Pcg32::for_stream(seed, static_cast<std::uint64_t>(i));
    const Vec2 w = sample_jump(rng, alpha, r_min, dim);
    if (!dom.segment_inside(x, x + w)) ++kills;
  }
  const double lambda = event_rate(alpha, r_min, dim);
  const double p = static_cast<double>(kills) / static_cast<double>(n_trials);
  HazardEstimate est;
  est.hazard = lambda * p;
  est.sigma = lambda * std::sqrt(std::max(p * (1.0 - p), 0.0) /
                                 static_cast<double>(n_trials));
  return est;
}

}  // namespace starfrac
