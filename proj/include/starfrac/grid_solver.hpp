// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "starfrac/geometry.hpp"
#include "starfrac/grid.hpp"
#include "starfrac/nonlocal_op.hpp"
#include "starfrac/test_function.hpp"

namespace starfrac {

struct SolverParams {
  int n_dir = 64;             // angular directions per row in 2D (even)
  int radial_order = 8;       // Gauss-Legendre nodes per radial panel
  double panel_growth = 2.0;  // geometric grading of radial panels
  double probe_factor = 1.6;  // near-field probe radius in cell widths
  double scale = 1.0;         // multiplies the whole generator (tail coefficient)
};

/// CSR action of the discrete generator scale * (-h + L).  Structure: all
/// off-diagonal entries >= 0, diagonal <= 0, row sums = -scale * h_i up to
/// interpolation fallbacks (<= 0 always).
struct OperatorMatrix {
  int n = 0;
  std::vector<int> row_ptr, col;
  std::vector<double> val;
  std::vector<double> diagonal;
  double scale = 1.0;
  // assembly stats
  int n_dir = 0;
  long radial_nodes = 0;
  double max_abs_diag = 0.0;

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  long nnz() const { return static_cast<long>(val.size()); }
};

/// Row i integrates the jump kernel over the visible star of cell center i
/// against cell values read by inside-renormalized bilinear interpolation.
/// The principal-value core below the probe radius uses an antipodally
/// paired second difference with the kernel integrated analytically.
/// Requires cell width < inradius/4.
OperatorMatrix assemble(const DomainSpec& dom, const Grid& grid, double alpha,
                        const SolverParams& params);

struct EvolveResult {
  std::vector<double> times;          // every accepted step, starting at 0
  std::vector<DensityField> fields;   // matching snapshots of the state
  std::vector<double> mass, l2;       // per step diagnostics
  bool positivity_ok = true;
  bool l2_monotone = true;
  bool mass_monotone = true;
};

/// Forward Euler.  Throws if dt exceeds the stability bound 0.9/max|diag|.
EvolveResult evolve(const DensityField& init, const Grid& grid,
                    const OperatorMatrix& matrix, double T, double dt);

/// Absolute residual of the weak formulation with time weight (1 - t/T)^2:
///   psi(0) <rho_in, phi> + int psi' <rho, phi> + psi <rho, scale*(L-h) phi>
/// where the generator action on phi is evaluated by the pointwise operator,
/// independent of the matrix discretization.
double weak_residual(const EvolveResult& traj, const Grid& grid,
                     const DomainSpec& dom, const TestFunction& phi, double alpha,
                     double scale, const OperatorParams& op_params);

}  // namespace starfrac
