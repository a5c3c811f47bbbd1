// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "starfrac/geometry.hpp"

namespace starfrac {

/// Uniform cell-centered grid over the domain bounding box.  Cells whose
/// center is not strictly interior are masked out; fields live on the
/// surviving cells only.  In 1D (interval domains) ny == 1 and the y
/// coordinate is carried as 0.
struct Grid {
  explicit Grid(DomainSpec d) : dom(std::move(d)) {}

  DomainSpec dom;
  int dim = 1;
  int nx = 0, ny = 1;
  Vec2 lo, hi;
  double hx = 0.0, hy = 1.0;
  std::vector<int> cell_index;   // flat node -> inside-cell index, -1 if masked
  std::vector<int> flat_of_cell; // inside-cell index -> flat node
  std::vector<Vec2> centers;     // per inside cell

  int n_cells() const { return static_cast<int>(centers.size()); }
  double cell_volume() const { return dim == 1 ? hx : hx * hy; }
  int flat(int ix, int iy) const { return iy * nx + ix; }
  Vec2 node_center(int ix, int iy) const {
    return {lo.x + (ix + 0.5) * hx, dim == 1 ? 0.0 : lo.y + (iy + 0.5) * hy};
  }
  /// Inside-cell index whose cell contains p, snapping to the nearest inside
  /// neighbor when p falls in a masked boundary sliver; -1 if none.
  int locate(const Vec2& p) const;
};

Grid make_grid(const DomainSpec& dom, int nx, int ny = 0);

/// Density values per inside cell; integrates via sum(values) * cell_volume.
struct DensityField {
  std::vector<double> values;
  double time = 0.0;
};

double field_mass(const Grid& grid, const DensityField& f);
double field_l2(const Grid& grid, const DensityField& f);
double l1_distance(const Grid& grid, const DensityField& f, const DensityField& g);

/// Histogram density from point samples: each position adds 1/(n_total*vol)
/// to its cell, so the field integrates to (deposited count)/n_total.
/// Integer per-cell counts keep the result schedule-independent.
DensityField deposit_positions(const Grid& grid, const std::vector<Vec2>& positions,
                               std::size_t n_total);

}  // namespace starfrac
