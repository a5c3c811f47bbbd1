// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "starfrac/geometry.hpp"
#include "starfrac/grid.hpp"
#include "starfrac/initial_density.hpp"
#include "starfrac/rng.hpp"

namespace starfrac {

/// Jump process generated by the killed nonlocal operator: isotropic jumps
/// with Pareto radius R >= r_min drawn from the kernel Gamma(alpha+1)
/// |w|^(-d-alpha), killed when the jump segment leaves the domain.  No
/// compensating drift is added for the removed small jumps; their principal
/// value vanishes by symmetry whenever B(x, r_min) sits inside the visible
/// star of x, and the remaining bias is O(r_min^(2-alpha)) near the boundary.
struct JumpRunConfig {
  double alpha = 1.0;
  double r_min = 1e-2;
  double T_final = 0.1;
  long n_particles = 1000;
  std::uint64_t seed = 1;
  InitialDensity initial = InitialDensity::uniform();
  std::vector<double> snapshot_times;

  /// Warns on stderr when r_min >= inradius/10.
  void validate(const DomainSpec& dom) const;
};

struct JumpParticle {
  Vec2 x;
  double t_next = 0.0;   // absolute time of the pending jump, so the path
                         // does not depend on where advance() stops
  double t_local = 0.0;  // kill time once dead; position stays at the last
                         // interior site
  bool alive = true;
  Pcg32 rng;
};

struct JumpEnsemble {
  std::vector<JumpParticle> particles;
  double time = 0.0;

  double survival_mass() const;
};

/// Total event rate Gamma(alpha) |S^(d-1)| r_min^(-alpha); the kernel mass
/// of all admissible jumps, independent of position.
double event_rate(double alpha, double r_min, int dim);

/// Isotropic direction, radius r_min * U^(-1/alpha).
Vec2 sample_jump(Pcg32& rng, double alpha, double r_min, int dim);

JumpEnsemble init_ensemble(const JumpRunConfig& config, const DomainSpec& dom);

void advance(JumpEnsemble& ens, const DomainSpec& dom, const JumpRunConfig& config,
             double until);

DensityField estimate_density(const JumpEnsemble& ens, const Grid& grid);

struct HazardEstimate {
  double hazard = 0.0;  // event_rate * (fraction of jumps whose segment exits)
  double sigma = 0.0;   // binomial standard error of the estimate
};

/// Single-jump kill hazard from a fixed point; its mean equals the kernel
/// mass of the exit set, which increases to the killing rate as r_min -> 0.
HazardEstimate empirical_kill_hazard(const DomainSpec& dom, const Vec2& x,
                                     double alpha, double r_min, long n_trials,
                                     std::uint64_t seed);

}  // namespace starfrac
