// SPDX-License-Identifier: Apache-2.0
#include "starfrac/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace starfrac {

double Equilibrium::sphere_measure(int dim) {
  if (dim == 1) return 2.0;
  if (dim == 2) return 2.0 * M_PI;
  throw std::invalid_argument("equilibrium supports dim 1 or 2");
}

double Equilibrium::ball_volume(int dim) {
  if (dim == 1) return 2.0;
  if (dim == 2) return M_PI;
  throw std::invalid_argument("equilibrium supports dim 1 or 2");
}

Equilibrium::Equilibrium(int dim, double alpha, Mode mode)
    : dim_(dim), alpha_(alpha), mode_(mode) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("equilibrium supports dim 1 or 2");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("equilibrium requires 0 < alpha < 2");
  const double ball = ball_volume(dim);
  const double tail_factor = sphere_measure(dim) / alpha;
  if (mode == Mode::Normalized) {
    // a = C and a*ball + C*tail_factor = 1.
    c_ = 1.0 / (ball + tail_factor);
    a_ = c_;
    mass_ = 1.0;
  } else {
    a_ = 1.0;
    c_ = 1.0;
    mass_ = ball + tail_factor;
  }
}

double Equilibrium::inner_probability() const { return a_ * ball_volume(dim_) / mass_; }

double Equilibrium::density_radial(double speed) const {
  if (speed < 0.0) throw std::invalid_argument("speed must be >= 0");
  if (speed < 1.0) return a_;
  return c_ * std::pow(speed, -static_cast<double>(dim_) - alpha_);
}

double Equilibrium::density(const Vec2& v) const { return density_radial(v.norm()); }

double Equilibrium::speed_cdf(double s) const {
  if (mode_ != Mode::Normalized)
    throw std::logic_error("speed_cdf requires the normalized mode");
  if (s <= 0.0) return 0.0;
  const double p_in = a_ * ball_volume(dim_);
  if (s < 1.0) return p_in * std::pow(s, dim_);
  return p_in + (c_ * sphere_measure(dim_) / alpha_) * (1.0 - std::pow(s, -alpha_));
}

Vec2 Equilibrium::sample(Pcg32& rng) const {
  if (mode_ != Mode::Normalized)
    throw std::logic_error("sample requires the normalized mode");
  const double p_in = a_ * ball_volume(dim_);
  double speed;
  if (rng.u01() < p_in) {
    // Uniform in the unit ball: |V| has density d * s^(d-1).
    speed = dim_ == 1 ? rng.u01() : std::sqrt(rng.u01());
  } else {
    // Pareto tail: P(|V| > s) = s^(-alpha) for s >= 1.
    speed = std::pow(1.0 - rng.u01(), -1.0 / alpha_);
  }
  if (dim_ == 1) return {rng.u01() < 0.5 ? -speed : speed, 0.0};
  const double theta = 2.0 * M_PI * rng.u01();
  return {speed * std::cos(theta), speed * std::sin(theta)};
}

}  // namespace starfrac
