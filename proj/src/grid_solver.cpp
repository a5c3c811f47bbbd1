// SPDX-License-Identifier: Apache-2.0
#include "starfrac/grid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starfrac/quadrature.hpp"

namespace starfrac {

namespace {

/// Scatters coef at point y into the row using bilinear weights over the
/// inside cells only, renormalized; a masked-out sliver falls back to the
/// nearest inside cell so that constants are reproduced exactly.
struct RowAccum {
  const Grid& grid;
  std::vector<double> dense;
  std::vector<char> seen;
  std::vector<int> touched;

  explicit RowAccum(const Grid& g)
      : grid(g), dense(g.n_cells(), 0.0), seen(g.n_cells(), 0) {}

  void add_cell(int c, double coef) {
    if (!seen[c]) {
      seen[c] = 1;
      touched.push_back(c);
    }
    dense[c] += coef;
  }

  void add_point(const Vec2& y, double coef) {
    const double gx = (y.x - grid.lo.x) / grid.hx - 0.5;
    const int ix0 = static_cast<int>(std::floor(gx));
    const double fx = gx - ix0;
    int iy0 = 0;
    double fy = 0.0;
    if (grid.dim == 2) {
      const double gy = (y.y - grid.lo.y) / grid.hy - 0.5;
      iy0 = static_cast<int>(std::floor(gy));
      fy = gy - iy0;
    }
    int cells[4];
    double w[4];
    int m = 0;
    const int ny_span = grid.dim == 2 ? 2 : 1;
    for (int dy = 0; dy < ny_span; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const int ix = ix0 + dx, iy = iy0 + dy;
        if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny) continue;
        const int c = grid.cell_index[grid.flat(ix, iy)];
        if (c < 0) continue;
        const double wx = dx ? fx : 1.0 - fx;
        const double wy = grid.dim == 2 ? (dy ? fy : 1.0 - fy) : 1.0;
        cells[m] = c;
        w[m] = wx * wy;
        ++m;
      }
    double wsum = 0.0;
    for (int k = 0; k < m; ++k) wsum += w[k];
    if (wsum > 0.0) {
      for (int k = 0; k < m; ++k)
        if (w[k] != 0.0) add_cell(cells[k], coef * w[k] / wsum);
      return;
    }
    int best = -1;
    double best_d2 = 0.0;
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        const int ix = ix0 + dx, iy = grid.dim == 2 ? iy0 + dy : 0;
        if (grid.dim == 1 && dy != 0) continue;
        if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny) continue;
        const int c = grid.cell_index[grid.flat(ix, iy)];
        if (c < 0) continue;
        const double d2 = (y - grid.centers[c]).norm2();
        if (best < 0 || d2 < best_d2) {
          best = c;
          best_d2 = d2;
        }
      }
    if (best >= 0) add_cell(best, coef);
    // Otherwise the mass is dropped, acting as extra killing on a region the
    // grid cannot represent.
  }

  void reset() {
    for (int c : touched) {
      dense[c] = 0.0;
      seen[c] = 0;
    }
    touched.clear();
  }
};

}  // namespace

void OperatorMatrix::apply(const std::vector<double>& x,
                           std::vector<double>& y) const {
  y.resize(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

OperatorMatrix assemble(const DomainSpec& dom, const Grid& grid, double alpha,
                        const SolverParams& params) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha in (0,2)");
  const double h_max = grid.dim == 1 ? grid.hx : std::max(grid.hx, grid.hy);
  if (!(h_max < dom.inradius() / 4.0))
    throw std::invalid_argument("grid too coarse: cell width must be < inradius/4");
  if (grid.dim == 2 && (params.n_dir < 16 || params.n_dir % 2 != 0))
    throw std::invalid_argument("n_dir must be even and >= 16");
  if (!(params.probe_factor > 0.0) || params.radial_order < 2 ||
      !(params.panel_growth > 1.0))
    throw std::invalid_argument("solver parameters out of range");

  const int n = grid.n_cells();
  const int n_dir = grid.dim == 1 ? 2 : params.n_dir;
  const int half = n_dir / 2;
  std::vector<Vec2> sigma(n_dir);
  double ang_w = 1.0;
  if (grid.dim == 1) {
    sigma = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (int j = 0; j < n_dir; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / n_dir;
      sigma[j] = {std::cos(th), std::sin(th)};
    }
    ang_w = 2.0 * M_PI / n_dir;
  }
  const GaussRule& rule = gauss_legendre(params.radial_order);
  const double pf = std::tgamma(alpha + 1.0);

  OperatorMatrix mat;
  mat.n = n;
  mat.scale = params.scale;
  mat.n_dir = n_dir;
  mat.row_ptr.assign(n + 1, 0);

  std::vector<std::vector<int>> row_cols(n);
  std::vector<std::vector<double>> row_vals(n);
  long radial_nodes = 0;

#pragma omp parallel reduction(+ : radial_nodes)
  {
    RowAccum acc(grid);
    std::vector<double> dist(n_dir);
#pragma omp for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) {
      const Vec2 x = grid.centers[i];
      for (int j = 0; j < n_dir; ++j) dist[j] = dom.ray_exit(x, sigma[j]).distance;
      const double delta = dom.boundary_distance(x);
      double rho0 = delta;
      for (double d : dist) rho0 = std::min(rho0, d);

      double h_i = 0.0;
      for (double d : dist) h_i += std::pow(d, -alpha);
      h_i *= std::tgamma(alpha) * ang_w;
      acc.add_cell(i, -h_i);

      const double r_p = std::min(params.probe_factor * h_max, 0.5 * rho0);
      // Near-field core: int_0^{r_p} D2(r) r^(-1-alpha) dr with the paired
      // second difference frozen at the probe radius, where
      // D2(r)/r^2 is the directional curvature the grid can resolve.
      const double c_core = ang_w * std::pow(r_p, -alpha) / (2.0 - alpha);
      for (int p = 0; p < half; ++p) {
        acc.add_point(x + r_p * sigma[p], pf * c_core);
        acc.add_point(x - r_p * sigma[p], pf * c_core);
        acc.add_cell(i, -2.0 * pf * c_core);
      }
      // Far field: geometrically graded Gauss panels per direction.
      for (int j = 0; j < n_dir; ++j) {
        double a = r_p;
        while (a < dist[j]) {
          const double b = std::min(a * params.panel_growth, dist[j]);
          const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
          for (int q = 0; q < params.radial_order; ++q) {
            const double r = mid + hw * rule.nodes[q];
            const double coef =
                pf * ang_w * hw * rule.weights[q] * std::pow(r, -1.0 - alpha);
            acc.add_point(x + r * sigma[j], coef);
            acc.add_cell(i, -coef);
          }
          radial_nodes += params.radial_order;
          a = b;
        }
      }

      std::sort(acc.touched.begin(), acc.touched.end());
      row_cols[i].reserve(acc.touched.size());
      row_vals[i].reserve(acc.touched.size());
      for (int c : acc.touched) {
        row_cols[i].push_back(c);
        row_vals[i].push_back(params.scale * acc.dense[c]);
      }
      acc.reset();
    }
  }

  mat.radial_nodes = radial_nodes;
  mat.diagonal.assign(n, 0.0);
  for (int i = 0; i < n; ++i) mat.row_ptr[i + 1] = mat.row_ptr[i] + row_cols[i].size();
  mat.col.reserve(mat.row_ptr[n]);
  mat.val.reserve(mat.row_ptr[n]);
  for (int i = 0; i < n; ++i) {
    for (size_t k = 0; k < row_cols[i].size(); ++k) {
      mat.col.push_back(row_cols[i][k]);
      mat.val.push_back(row_vals[i][k]);
      if (row_cols[i][k] == i) mat.diagonal[i] = row_vals[i][k];
    }
    mat.max_abs_diag = std::max(mat.max_abs_diag, std::abs(mat.diagonal[i]));
  }
  return mat;
}

EvolveResult evolve(const DensityField& init, const Grid& grid,
                    const OperatorMatrix& matrix, double T, double dt) {
  if (static_cast<int>(init.values.size()) != matrix.n)
    throw std::invalid_argument("field size does not match the matrix");
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("need dt > 0, T >= 0");
  if (dt > 0.9 / matrix.max_abs_diag)
    throw std::invalid_argument("dt exceeds the stability bound 0.9/max|diag|");

  EvolveResult out;
  DensityField state = init;
  state.time = 0.0;
  auto record = [&](double t) {
    state.time = t;
    out.times.push_back(t);
    out.mass.push_back(field_mass(grid, state));
    out.l2.push_back(field_l2(grid, state));
    out.fields.push_back(state);
    const size_t k = out.times.size();
    for (double v : state.values)
      if (v < 0.0) out.positivity_ok = false;
    if (k > 1) {
      if (out.l2[k - 1] > out.l2[k - 2] * (1.0 + 1e-12)) out.l2_monotone = false;
      if (out.mass[k - 1] > out.mass[k - 2] * (1.0 + 1e-12)) out.mass_monotone = false;
    }
  };
  record(0.0);

  std::vector<double> rate;
  double t = 0.0;
  while (t < T - 1e-12 * (1.0 + T)) {
    const double step = std::min(dt, T - t);
    matrix.apply(state.values, rate);
    for (int i = 0; i < matrix.n; ++i) state.values[i] += step * rate[i];
    t += step;
    record(t);
  }
  return out;
}

double weak_residual(const EvolveResult& traj, const Grid& grid,
                     const DomainSpec& dom, const TestFunction& phi, double alpha,
                     double scale, const OperatorParams& op_params) {
  if (traj.times.size() < 2) throw std::invalid_argument("trajectory too short");
  const double T = traj.times.back();
  const int n = grid.n_cells();
  std::vector<double> phi_v(n), gen_v(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    phi_v[i] = phi.value(grid.centers[i]);
    gen_v[i] = scale * generator(dom, phi, grid.centers[i], alpha, op_params);
  }
  const double vol = grid.cell_volume();
  auto pair_at = [&](size_t k, double& a, double& b) {
    a = b = 0.0;
    const auto& v = traj.fields[k].values;
    for (int i = 0; i < n; ++i) {
      a += v[i] * phi_v[i];
      b += v[i] * gen_v[i];
    }
    a *= vol;
    b *= vol;
  };
  auto psi = [&](double t) { const double u = 1.0 - t / T; return u * u; };
  auto dpsi = [&](double t) { return -2.0 * (1.0 - t / T) / T; };

  double a0, b0;
  pair_at(0, a0, b0);
  double residual = psi(0.0) * a0;
  double prev_t = traj.times[0];
  double prev_f = dpsi(prev_t) * a0 + psi(prev_t) * b0;
  for (size_t k = 1; k < traj.times.size(); ++k) {
    double a, b;
    pair_at(k, a, b);
    const double t = traj.times[k];
    const double f = dpsi(t) * a + psi(t) * b;
    residual += 0.5 * (t - prev_t) * (prev_f + f);
    prev_t = t;
    prev_f = f;
  }
  return std::abs(residual);
}

}  // namespace starfrac
