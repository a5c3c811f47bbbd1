// SPDX-License-Identifier: Apache-2.0
#include "starfrac/grid.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace starfrac {

Grid make_grid(const DomainSpec& dom, int nx, int ny) {
  if (nx < 2) throw std::invalid_argument("grid needs nx >= 2");
  Grid g(dom);
  g.dim = dom.dim();
  g.lo = dom.box_lo();
  g.hi = dom.box_hi();
  g.nx = nx;
  g.hx = (g.hi.x - g.lo.x) / nx;
  if (g.dim == 1) {
    g.ny = 1;
    g.hy = 1.0;
  } else {
    g.ny = ny > 0 ? ny : nx;
    g.hy = (g.hi.y - g.lo.y) / g.ny;
  }
  g.cell_index.assign(static_cast<size_t>(g.nx) * g.ny, -1);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const Vec2 c = g.node_center(ix, iy);
      if (!dom.contains(c)) continue;
      g.cell_index[g.flat(ix, iy)] = g.n_cells();
      g.flat_of_cell.push_back(g.flat(ix, iy));
      g.centers.push_back(c);
    }
  if (g.centers.empty()) throw std::runtime_error("grid has no interior cells");
  return g;
}

int Grid::locate(const Vec2& p) const {
  const int ix = static_cast<int>(std::floor((p.x - lo.x) / hx));
  const int iy = dim == 1 ? 0 : static_cast<int>(std::floor((p.y - lo.y) / hy));
  if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return -1;
  const int c = cell_index[flat(ix, iy)];
  if (c >= 0) return c;
  int best = -1;
  double best_d2 = 0.0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const int jx = ix + dx, jy = iy + dy;
      if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
      const int cj = cell_index[flat(jx, jy)];
      if (cj < 0) continue;
      const double d2 = (p - centers[cj]).norm2();
      if (best < 0 || d2 < best_d2) {
        best = cj;
        best_d2 = d2;
      }
    }
  return best;
}

double field_mass(const Grid& grid, const DensityField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * grid.cell_volume();
}

double field_l2(const Grid& grid, const DensityField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s * grid.cell_volume());
}

double l1_distance(const Grid& grid, const DensityField& f, const DensityField& g) {
  if (f.values.size() != g.values.size())
    throw std::invalid_argument("fields live on different grids");
  double s = 0.0;
  for (size_t i = 0; i < f.values.size(); ++i) s += std::abs(f.values[i] - g.values[i]);
  return s * grid.cell_volume();
}

DensityField deposit_positions(const Grid& grid, const std::vector<Vec2>& positions,
                               std::size_t n_total) {
  std::vector<long> counts(grid.n_cells(), 0);
  for (const Vec2& p : positions) {
    const int c = grid.locate(p);
    if (c >= 0) ++counts[c];
  }
  DensityField f;
  f.values.resize(grid.n_cells());
  const double w = 1.0 / (static_cast<double>(n_total) * grid.cell_volume());
  for (int i = 0; i < grid.n_cells(); ++i) f.values[i] = counts[i] * w;
  return f;
}

}  // namespace starfrac
