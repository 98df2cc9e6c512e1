#pragma once

#include <utility>
#include <vector>

#include "kwnr/velocity_grid.hpp"

namespace kwnr {

/// 1D derivative stencil for row i of an n-point uniform grid with spacing h:
/// 4th-order central in the interior, 2nd-order central one layer in, and
/// 2nd-order one-sided at the ends. Returns (column index, coefficient) pairs.
std::vector<std::pair<int, double>> derivative_stencil_1d(int n, int i, double h);

/// d/dv_axis of f by the stencils above, axis in {0,1,2}.
void apply_derivative(const VelocityGrid& grid, const VelocityField& f, int axis,
                      VelocityField& out);

VelocityField derivative(const VelocityGrid& grid, const VelocityField& f, int axis);

/// Maxwellian-factored derivative: d_a f computed as
///   sqrt(mu) * FD_a(f / sqrt(mu)) - (v_a / 2) f,
/// with FD the stencils above. Agrees with apply_derivative to the stencil
/// order on smooth fields, and is exact whenever f / sqrt(mu) is a polynomial
/// the stencil integrates exactly — in particular on all five collision
/// invariants, so the discrete L inherits the exact null space.
void apply_maxwellian_derivative(const VelocityGrid& grid, const VelocityField& f,
                                 int axis, VelocityField& out);

VelocityField maxwellian_derivative(const VelocityGrid& grid, const VelocityField& f,
                                    int axis);

}  // namespace kwnr
