// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "starfrac/geometry.hpp"
#include "starfrac/grid.hpp"
#include "starfrac/rng.hpp"

namespace starfrac {

/// Initial spatial density, defined up to normalization.  Sampling is exact
/// rejection against the domain and the weight envelope; projection onto a
/// grid is midpoint sampling normalized to unit mass.
class InitialDensity {
 public:
  enum class Kind { Uniform, UniformBox, GaussianTruncated, GridTable };

  static InitialDensity uniform();
  static InitialDensity uniform_box(const Vec2& lo, const Vec2& hi);
  static InitialDensity gaussian_truncated(const Vec2& center, double sigma);
  static InitialDensity grid_table(const Grid& grid, std::vector<double> weights);

  Kind kind() const { return kind_; }
  /// Unnormalized density at x; zero outside the support.
  double weight(const Vec2& x) const;
  /// One exact draw from the normalized density restricted to dom.
  /// Throws after 10^6 rejected proposals.
  Vec2 sample(Pcg32& rng, const DomainSpec& dom) const;

 private:
  Kind kind_ = Kind::Uniform;
  Vec2 box_lo_, box_hi_;
  bool has_box_ = false;
  Vec2 center_;
  double sigma_ = 1.0;
  std::shared_ptr<const Grid> table_grid_;
  std::vector<double> table_;
  double w_max_ = 1.0;
};

/// Grid projection of the density, normalized so field_mass == 1.
DensityField initial_field(const InitialDensity& density, const Grid& grid);

}  // namespace starfrac
