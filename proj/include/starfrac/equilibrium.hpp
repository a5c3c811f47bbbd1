// SPDX-License-Identifier: Apache-2.0
/**
 * Heavy-tailed velocity equilibrium in dimension d = 1 or 2.
 *
 * The density is radial and piecewise:
 *
 *     M(v) = a                for |v| <  1,
 *     M(v) = C |v|^(-d-alpha) for |v| >= 1,      0 < alpha < 2.
 *
 * Normalized mode ties the plateau to the tail (a = C) and fixes unit mass
 * through  a vol(B_1) + C |S^{d-1}| / alpha = 1.  The tail coefficient C then
 * multiplies every limiting nonlocal operator, so consumers must scale
 * accordingly.  The "plateau_one" mode instead pins a = C = 1; the density is
 * then not a probability and cannot be sampled, but it is convenient for
 * operator-only studies.
 */
#pragma once

#include "starfrac/geometry.hpp"
#include "starfrac/rng.hpp"

namespace starfrac {

class Equilibrium {
 public:
  enum class Mode { Normalized, PlateauOne };

  Equilibrium(int dim, double alpha, Mode mode = Mode::Normalized);

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  Mode mode() const { return mode_; }

  /// Tail coefficient C; equals the plateau height a in both modes.
  double tail_coefficient() const { return c_; }
  double plateau() const { return a_; }

  /// Total mass; 1 in normalized mode.
  double mass() const { return mass_; }

  /// Probability that a sampled speed lies in the unit ball.
  double inner_probability() const;

  double density(const Vec2& v) const;
  double density_radial(double speed) const;

  /// CDF of the speed |V| (normalized mode only).
  double speed_cdf(double s) const;

  /// Draw a velocity.  Normalized mode only; throws std::logic_error in
  /// plateau_one mode.  1D velocities have y == 0.
  Vec2 sample(Pcg32& rng) const;

  /// Surface measure of the unit sphere S^{d-1}: 2 in 1D, 2*pi in 2D.
  static double sphere_measure(int dim);
  /// Volume of the unit ball: 2 in 1D, pi in 2D.
  static double ball_volume(int dim);

 private:
  int dim_;
  double alpha_;
  Mode mode_;
  double a_ = 0.0;
  double c_ = 0.0;
  double mass_ = 0.0;
};

}  // namespace starfrac
