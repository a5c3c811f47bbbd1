// SPDX-License-Identifier: Apache-2.0
#include "starfrac/initial_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace starfrac {

namespace {
constexpr long kRejectionCap = 1000000;
}

InitialDensity InitialDensity::uniform() { return InitialDensity(); }

InitialDensity InitialDensity::uniform_box(const Vec2& lo, const Vec2& hi) {
  if (!(lo.x < hi.x)) throw std::invalid_argument("uniform_box needs lo < hi");
  InitialDensity d;
  d.kind_ = Kind::UniformBox;
  d.box_lo_ = lo;
  d.box_hi_ = hi;
  d.has_box_ = true;
  return d;
}

InitialDensity InitialDensity::gaussian_truncated(const Vec2& center, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
  InitialDensity d;
  d.kind_ = Kind::GaussianTruncated;
  d.center_ = center;
  d.sigma_ = sigma;
  return d;
}

InitialDensity InitialDensity::grid_table(const Grid& grid,
                                          std::vector<double> weights) {
  if (static_cast<int>(weights.size()) != grid.n_cells())
    throw std::invalid_argument("grid_table weights must match cell count");
  double w_max = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("grid_table weights must be >= 0");
    w_max = std::max(w_max, w);
  }
  if (w_max == 0.0) throw std::invalid_argument("grid_table weights are all zero");
  InitialDensity d;
  d.kind_ = Kind::GridTable;
  d.table_grid_ = std::make_shared<Grid>(grid);
  d.table_ = std::move(weights);
  d.w_max_ = w_max;
  return d;
}

double InitialDensity::weight(const Vec2& x) const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0;
    case Kind::UniformBox:
      return (x.x >= box_lo_.x && x.x <= box_hi_.x && x.y >= box_lo_.y &&
              x.y <= box_hi_.y)
                 ? 1.0
                 : 0.0;
    case Kind::GaussianTruncated: {
      const double s2 = (x - center_).norm2();
      return std::exp(-0.5 * s2 / (sigma_ * sigma_));
    }
    case Kind::GridTable: {
      const int c = table_grid_->locate(x);
      return c >= 0 ? table_[c] : 0.0;
    }
  }
  return 0.0;
}

Vec2 InitialDensity::sample(Pcg32& rng, const DomainSpec& dom) const {
  Vec2 lo = dom.box_lo(), hi = dom.box_hi();
  if (has_box_) {
    lo = {std::max(lo.x, box_lo_.x), std::max(lo.y, box_lo_.y)};
    hi = {std::min(hi.x, box_hi_.x), std::min(hi.y, box_hi_.y)};
    if (!(lo.x < hi.x) || (dom.dim() == 2 && !(lo.y < hi.y)))
      throw std::runtime_error("initial density box does not meet the domain");
  }
  for (long attempt = 0; attempt < kRejectionCap; ++attempt) {
    Vec2 p{lo.x + rng.u01() * (hi.x - lo.x), 0.0};
    if (dom.dim() == 2) p.y = lo.y + rng.u01() * (hi.y - lo.y);
    if (!dom.contains(p)) continue;
    const double w = weight(p);
    if (w >= w_max_ || rng.u01() * w_max_ < w) return p;
  }
  throw std::runtime_error("initial density has no mass inside the domain "
                           "(rejection cap exceeded)");
}

DensityField initial_field(const InitialDensity& density, const Grid& grid) {
  DensityField f;
  f.values.resize(grid.n_cells());
  double total = 0.0;
  for (int i = 0; i < grid.n_cells(); ++i) {
    f.values[i] = density.weight(grid.centers[i]);
    total += f.values[i];
  }
  total *= grid.cell_volume();
  if (!(total > 0.0))
    throw std::runtime_error("initial density vanishes on every grid cell");
  for (double& v : f.values) v /= total;
  return f;
}

}  // namespace starfrac
