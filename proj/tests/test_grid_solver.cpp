// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "starfrac/grid_solver.hpp"
#include "starfrac/initial_density.hpp"
#include "starfrac/rng.hpp"

using namespace starfrac;

namespace {

// sup-norm relative error of the matrix action against the pointwise
// generator, sampled at interior evaluation points
double matrix_vs_pointwise(const DomainSpec& dom, const Grid& grid,
                           const OperatorMatrix& m, const TestFunction& phi,
                           double alpha, int n_points, double min_delta,
                           std::uint64_t stream) {
  std::vector<double> values(grid.n_cells());
  for (int c = 0; c < grid.n_cells(); ++c) values[c] = phi.value(grid.centers[c]);
  std::vector<double> action(grid.n_cells());
  m.apply(values, action);

  Pcg32 rng = Pcg32::for_stream(42, stream);
  double max_diff = 0.0, max_exact = 0.0;
  const OperatorParams op;
  for (int i = 0; i < n_points; ++i) {
    Vec2 p;
    do {
      p = {grid.lo.x + (grid.hi.x - grid.lo.x) * rng.u01(),
           grid.dim == 1 ? 0.0
                         : grid.lo.y + (grid.hi.y - grid.lo.y) * rng.u01()};
    } while (!dom.contains(p) || dom.boundary_distance(p) < min_delta);
    const int c = grid.locate(p);
    REQUIRE(c >= 0);
    const double exact = generator(dom, phi, grid.centers[c], alpha, op);
    max_diff = std::max(max_diff, std::abs(action[c] - exact));
    max_exact = std::max(max_exact, std::abs(exact));
  }
  REQUIRE(max_exact > 0.0);
  return max_diff / max_exact;
}

}  // namespace

TEST_CASE("matrix rows have the generator sign structure") {
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  const Grid g = make_grid(dk, 32);
  const OperatorMatrix m = assemble(dk, g, 1.0, {});
  REQUIRE(m.n == g.n_cells());
  for (int i = 0; i < m.n; ++i) {
    CHECK(m.diagonal[i] < 0.0);
    std::set<int> cols;
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      CHECK(cols.insert(m.col[k]).second);  // no duplicate columns
      if (m.col[k] != i) CHECK(m.val[k] >= 0.0);
    }
  }
  CHECK(m.max_abs_diag > 0.0);
  CHECK(m.nnz() > m.n);
}

TEST_CASE("row sums reproduce minus the killing rate") {
  // L applied to the constant 1 field leaves only -h(x_i), because the jump
  // part integrates phi(y) - phi(x) = 0.  The matrix resolves h with its own
  // n_dir directions while the reference below uses a finer angular grid, so
  // cells near the boundary (where h varies fastest in angle) agree only to
  // the angular quadrature error; deep cells agree to roundoff.
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  const Grid g = make_grid(dk, 48);
  SolverParams sp;
  sp.scale = 0.7;
  const OperatorMatrix m = assemble(dk, g, 1.0, sp);
  std::vector<double> ones(g.n_cells(), 1.0), out(g.n_cells());
  m.apply(ones, out);
  const OperatorParams op;
  for (int i = 0; i < g.n_cells(); ++i) {
    const double h = killing_rate(dk, g.centers[i], 1.0, op);
    const double tol = dk.boundary_distance(g.centers[i]) >= 0.3 ? 1e-10 : 1e-4;
    CHECK(out[i] == doctest::Approx(-0.7 * h).epsilon(tol));
    CHECK(out[i] < 0.0);
  }
}

TEST_CASE("1d matrix action matches the pointwise generator") {
  const DomainSpec iv = DomainSpec::interval(-1, 1);
  const Grid g = make_grid(iv, 200);
  const OperatorMatrix m = assemble(iv, g, 1.0, {});
  const TestFunction phi = TestFunction::interval_bump(0, 1);
  const double rel = matrix_vs_pointwise(iv, g, m, phi, 1.0, 20, 0.1, 1);
  CHECK(rel < 0.02);

  // center-cell action against the closed form -16/3
  const int c = g.locate({0, 0});
  std::vector<double> values(g.n_cells()), out(g.n_cells());
  for (int i = 0; i < g.n_cells(); ++i) values[i] = phi.value(g.centers[i]);
  m.apply(values, out);
  CHECK(out[c] == doctest::Approx(-16.0 / 3.0).epsilon(0.02));
}

TEST_CASE("2d matrix action matches the pointwise generator") {
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  const Grid g = make_grid(dk, 64);
  const OperatorMatrix m = assemble(dk, g, 1.0, {});
  // profiles whose curvature the 64x64 bilinear interpolation resolves; the
  // sup over every interior cell is below 2% for each, so any sampled point
  // set passes
  Poly2 tilt;
  tilt.cx = 0.8;
  tilt.cy = -0.5;
  const TestFunction phis[] = {
      TestFunction::disk_bump({0, 0}, 1.0),
      TestFunction::disk_bump({0.3, -0.2}, 0.65).times_polynomial(tilt),
      TestFunction::flat_top({0, 0}, 0.3, 0.8),
  };
  std::uint64_t stream = 3;
  for (const TestFunction& phi : phis) {
    const double rel = matrix_vs_pointwise(dk, g, m, phi, 1.0, 20, 0.1, stream);
    CHECK(rel < 0.02);
    ++stream;
  }
}

TEST_CASE("assembly validates resolution and parameters") {
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  const Grid coarse = make_grid(dk, 6);  // cell width 1/3 > inradius/4
  CHECK_THROWS_AS(assemble(dk, coarse, 1.0, {}), std::invalid_argument);
  const Grid g = make_grid(dk, 32);
  SolverParams bad;
  bad.n_dir = 7;
  CHECK_THROWS_AS(assemble(dk, g, 1.0, bad), std::invalid_argument);
  SolverParams neg;
  neg.probe_factor = 0.0;
  CHECK_THROWS_AS(assemble(dk, g, 1.0, neg), std::invalid_argument);
}

TEST_CASE("explicit euler respects the stability bound") {
  const DomainSpec iv = DomainSpec::interval(-1, 1);
  const Grid g = make_grid(iv, 100);
  const OperatorMatrix m = assemble(iv, g, 1.0, {});
  const DensityField rho0 = initial_field(
      InitialDensity::gaussian_truncated({0, 0}, 0.3), g);
  CHECK_THROWS_AS(evolve(rho0, g, m, 0.1, 1.0 / m.max_abs_diag),
                  std::invalid_argument);

  const double dt = 0.45 / m.max_abs_diag;
  const EvolveResult r = evolve(rho0, g, m, 0.05, dt);
  CHECK(r.positivity_ok);
  CHECK(r.l2_monotone);
  CHECK(r.mass_monotone);
  REQUIRE(r.times.size() == r.mass.size());
  CHECK(r.times.front() == 0.0);
  CHECK(r.times.back() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.mass.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.mass.back() < r.mass.front());
  CHECK(r.mass.back() > 0.5);
  // fields snapshot start and end states
  REQUIRE(r.fields.size() >= 2);
  CHECK(r.fields.front().time == 0.0);
  CHECK(r.fields.back().time == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("zero initial data stays zero") {
  const DomainSpec iv = DomainSpec::interval(-1, 1);
  const Grid g = make_grid(iv, 50);
  const OperatorMatrix m = assemble(iv, g, 1.0, {});
  DensityField zero;
  zero.values.assign(g.n_cells(), 0.0);
  const EvolveResult r = evolve(zero, g, m, 0.02, 0.4 / m.max_abs_diag);
  for (double v : r.fields.back().values) CHECK(v == 0.0);
  CHECK(r.positivity_ok);
}

TEST_CASE("weak residual shrinks under space-time refinement") {
  const DomainSpec iv = DomainSpec::interval(-1, 1);
  const TestFunction phi = TestFunction::interval_bump(0, 1);
  const InitialDensity rho_in = InitialDensity::gaussian_truncated({0, 0}, 0.3);
  const OperatorParams op;
  const double T = 0.05;

  auto run = [&](int cells, double dt) {
    const Grid g = make_grid(iv, cells);
    const OperatorMatrix m = assemble(iv, g, 1.0, {});
    const DensityField r0 = initial_field(rho_in, g);
    const EvolveResult tr = evolve(r0, g, m, T, dt);
    REQUIRE(tr.positivity_ok);
    return weak_residual(tr, g, iv, phi, 1.0, 1.0, op);
  };

  // shared dt pair so the refinement halves both h and dt
  const Grid gf = make_grid(iv, 200);
  const OperatorMatrix mf = assemble(iv, gf, 1.0, {});
  const Grid gc = make_grid(iv, 100);
  const OperatorMatrix mc = assemble(iv, gc, 1.0, {});
  const double dt_c = std::min(0.45 / mc.max_abs_diag, 0.9 / mf.max_abs_diag);
  const double res_c = run(100, dt_c);
  const double res_f = run(200, dt_c / 2.0);
  CHECK(res_f * 1.5 <= res_c);
}
